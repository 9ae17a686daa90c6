#include "atomcount/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace atomcount {

void CavityParams::validate() const {
  if (!(g0 > 0.0) || !(kappa > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("CavityParams: g0, kappa, gamma must be positive");
  if (!(nbar_empty > 0.0))
    throw std::invalid_argument("CavityParams: nbar_empty must be positive");
  if (!(w0 > 0.0) || !(lambda0 > 0.0))
    throw std::invalid_argument("CavityParams: w0 and lambda0 must be positive");
  if (!std::isfinite(delta_c) || !std::isfinite(delta_4))
    throw std::invalid_argument("CavityParams: detunings must be finite");
}

void ManifoldModel::validate() const {
  if (!(y > 0.0) || !std::isfinite(y))
    throw std::invalid_argument("ManifoldModel: y must be positive and finite");
  if (n_max < 0)
    throw std::invalid_argument("ManifoldModel: n_max must be >= 0");
}

double coupling_at(const CavityParams& p, double rho, double z,
                   double g_factor) {
  p.validate();
  double axial = std::sin(2.0 * M_PI * z / p.lambda0);
  double radial = std::exp(-2.0 * rho * rho / (p.w0 * p.w0));
  return p.g0 * g_factor * axial * radial;
}

double cooperativity(const CavityParams& p, double g) {
  p.validate();
  return g * g / (2.0 * p.kappa * p.gamma);
}

double suppression_factor(const CavityParams& p) {
  double c1 = cooperativity(p, p.g0);
  return 4.0 * c1 * c1;
}

std::pair<double, double> critical_numbers(const CavityParams& p) {
  p.validate();
  double n0 = p.gamma * p.gamma / (2.0 * p.g0 * p.g0);
  double N0 = 2.0 * p.kappa * p.gamma / (p.g0 * p.g0);
  return {n0, N0};
}

double intensity_level(int k, double i1_over_i0) {
  if (k < 0) throw std::invalid_argument("intensity_level: k must be >= 0");
  if (!(i1_over_i0 >= 0.0))
    throw std::invalid_argument("intensity_level: i1_over_i0 must be >= 0");
  if (k == 0) return 1.0;
  return i1_over_i0 / (static_cast<double>(k) * static_cast<double>(k));
}

std::vector<double> steady_state_distribution(const ManifoldModel& model,
                                              int n_atoms) {
  model.validate();
  if (n_atoms < 0 || n_atoms > model.n_max)
    throw std::invalid_argument(
        "steady_state_distribution: n_atoms outside [0, n_max]");

  // log w_k = 2 log(k!) + k log y, normalized by log-sum-exp
  std::vector<double> logw(static_cast<std::size_t>(n_atoms) + 1);
  double logy = std::log(model.y);
  for (int k = 0; k <= n_atoms; ++k)
    logw[static_cast<std::size_t>(k)] =
        2.0 * std::lgamma(static_cast<double>(k) + 1.0) + k * logy;
  double m = *std::max_element(logw.begin(), logw.end());
  double s = 0.0;
  for (double lw : logw) s += std::exp(lw - m);
  double logz = m + std::log(s);

  std::vector<double> p(logw.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(logw[k] - logz);
  return p;
}

double plateau_prediction(const ManifoldModel& model, int n_atoms) {
  return steady_state_distribution(model, n_atoms)[0];
}

}  // namespace atomcount
