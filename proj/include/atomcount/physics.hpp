#pragma once

#include <utility>
#include <vector>

namespace atomcount {

// Cavity and atom constants. All frequency-like quantities are stored as
// nu = omega/2pi in Hz (the convention the numbers are usually quoted in);
// only ratios of them enter the dimensionless results below.
struct CavityParams {
  double g0 = 24.0e6;          // peak atom-cavity coupling
  double kappa = 4.2e6;        // cavity field decay
  double gamma = 2.6e6;        // atomic dipole decay
  double delta_c = 0.0;        // probe-cavity detuning
  double delta_4 = 4.0e6;      // probe-atom detuning
  double nbar_empty = 0.02;    // empty-cavity intracavity photon number
  double w0 = 23.6e-6;         // mode waist, m
  double lambda0 = 852.4e-9;   // mode wavelength, m

  bool strong_coupling() const { return g0 > kappa && g0 > gamma; }
  void validate() const;
};

// Coupled-manifold telegraph model: k = 0..n_max atoms strongly coupled,
// with k-independent upward rate and downward rate falling as 1/k^2.
// y is the rate ratio gamma_{0->1} / gamma_{1->0}.
struct ManifoldModel {
  double y = 0.5;
  int n_max = 20;

  void validate() const;
};

// g(rho, z) = g0 * g_factor * sin(2 pi z / lambda0) * exp(-2 rho^2 / w0^2)
double coupling_at(const CavityParams& p, double rho, double z,
                   double g_factor = 1.0);

// single-atom cooperativity C1 = g^2 / (2 kappa gamma)
double cooperativity(const CavityParams& p, double g);

// transmission suppression factor f ~ 4 C1^2 for one maximally coupled atom
double suppression_factor(const CavityParams& p);

// (n0, N0) = (gamma^2 / 2 g0^2, 2 kappa gamma / g0^2)
std::pair<double, double> critical_numbers(const CavityParams& p);

// Normalized transmission level of the k-coupled manifold: 1 for k = 0,
// i1_over_i0 / k^2 for k >= 1.
double intensity_level(int k, double i1_over_i0);

// Steady state of the telegraph chain restricted to k <= n_atoms:
// p_k proportional to (k!)^2 y^k. Computed in log space so large n_max
// does not overflow. Requires 0 <= n_atoms <= model.n_max.
std::vector<double> steady_state_distribution(const ManifoldModel& model,
                                              int n_atoms);

// Predicted plateau height for N trapped atoms: p_0^(N)(y), the steady-state
// fraction of time the manifold is empty, which is what the slow detection
// chain averages the normalized transmission to.
double plateau_prediction(const ManifoldModel& model, int n_atoms);

}  // namespace atomcount
