#pragma once

#include <utility>
#include <vector>

#include "atomcount/analysis.hpp"

namespace atomcount {

// Pure death process: dP_N/dt = -Gamma (N P_N - (N+1) P_{N+1}).
// Its solution is binomial thinning of the initial distribution with
// per-atom survival s = exp(-Gamma (t - t0)).
struct DeathModel {
  double Gamma = 8.5;
  double t0 = 0.0;
  std::vector<double> p_init;  // index = N, sums to 1

  void validate() const;
};

// P_n(t) = sum_{m >= n} p_init[m] C(m,n) s^n (1-s)^(m-n). Requires t >= t0.
std::vector<double> death_propagate(const DeathModel& model, double t);

// P(X >= 3) for X ~ Poisson(mu), via the exact complement
// 1 - e^-mu (1 + mu + mu^2/2).
double poisson_tail_ge3(double mu);

// Inverts poisson_tail_ge3 by bracketed bisection to |tail - target| <= 1e-10.
// Requires target in (0, 1).
double solve_poisson_mu(double phi_ge3);

struct InitialEstimate {
  std::vector<double> probs;  // length n_max + 1, sums to 1
  double mu_hat;              // NaN when the aggregate mass was ~0
};

// p[0..n_resolved] from the first grid point of the curves; the aggregate
// mass is spread over N = n_resolved+1 .. n_max with the shape of a Poisson
// whose >= n_resolved+1 tail reproduces that mass, then the whole vector is
// renormalized.
InitialEstimate build_initial_distribution(const PopulationCurves& curves,
                                           int n_max);

struct FitResult {
  double Gamma_hat = 0.0;
  double mu_hat = 0.0;
  double residual = 0.0;       // sum of squares at Gamma_hat
  int iterations = 0;
  int clamp_warnings = 0;      // time bins that needed clamping/renormalizing
  bool at_bracket_edge = false;
};

// Least-squares fit of Gamma by golden-section search on
// J(Gamma) = sum_bands sum_t (P_band(t; Gamma) - Phi_band(t))^2,
// where the model's aggregate row is the complement of the resolved rows.
// Curve rows are clamped to [0,1] and renormalized per time bin first;
// the number of bins needing repair is reported. The search stops when the
// bracket width falls below 1e-3 of the running estimate; an estimate
// pinned to a bracket end is flagged rather than an error.
FitResult fit_gamma(const PopulationCurves& curves,
                    const std::vector<double>& p_init,
                    std::pair<double, double> bracket);

}  // namespace atomcount
