#include "atomcount/deathfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace atomcount {

void DeathModel::validate() const {
  if (!(Gamma >= 0.0) || !std::isfinite(Gamma))
    throw std::invalid_argument("DeathModel: Gamma must be >= 0");
  if (p_init.empty())
    throw std::invalid_argument("DeathModel: p_init is empty");
  double s = 0.0;
  for (double p : p_init) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("DeathModel: p_init entries must be >= 0");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-9)
    throw std::invalid_argument("DeathModel: p_init must sum to 1");
}

std::vector<double> death_propagate(const DeathModel& model, double t) {
  model.validate();
  if (t < model.t0)
    throw std::invalid_argument("death_propagate: t before t0");

  const std::size_t nmax = model.p_init.size() - 1;
  double s = std::exp(-model.Gamma * (t - model.t0));
  if (s == 1.0) return model.p_init;  // t == t0 or Gamma == 0
  double q = 1.0 - s;

  std::vector<double> out(nmax + 1, 0.0);
  for (std::size_t m = 0; m <= nmax; ++m) {
    double pm = model.p_init[m];
    if (pm == 0.0) continue;
    // binomial pmf over survivors n = 0..m, built multiplicatively
    double term = std::pow(q, static_cast<double>(m));  // n = 0
    for (std::size_t n = 0; n <= m; ++n) {
      out[n] += pm * term;
      if (n < m)
        term *= static_cast<double>(m - n) / static_cast<double>(n + 1) * (s / q);
    }
  }
  return out;
}

double poisson_tail_ge3(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("poisson_tail_ge3: mu must be >= 0");
  return 1.0 - std::exp(-mu) * (1.0 + mu + 0.5 * mu * mu);
}

double solve_poisson_mu(double phi_ge3) {
  if (!(phi_ge3 > 0.0) || !(phi_ge3 < 1.0))
    throw std::invalid_argument("solve_poisson_mu: target must be in (0, 1)");

  double lo = 0.0, hi = 1.0;
  while (poisson_tail_ge3(hi) < phi_ge3) {
    hi *= 2.0;
    if (hi > 1e9)
      throw std::runtime_error("solve_poisson_mu: failed to bracket");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    double f = poisson_tail_ge3(mid) - phi_ge3;
    if (std::abs(f) <= 1e-10) return mid;
    if (f < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

InitialEstimate build_initial_distribution(const PopulationCurves& curves,
                                           int n_max) {
  if (curves.time.empty() || curves.phi.empty())
    throw std::invalid_argument("build_initial_distribution: empty curves");
  const int n_res = curves.n_resolved;
  if (n_max < n_res + 1)
    throw std::invalid_argument("build_initial_distribution: n_max too small");
  if (curves.phi.size() != static_cast<std::size_t>(n_res) + 2)
    throw std::invalid_argument("build_initial_distribution: row count mismatch");

  InitialEstimate est;
  est.probs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  est.mu_hat = std::numeric_limits<double>::quiet_NaN();

  for (int b = 0; b <= n_res; ++b)
    est.probs[static_cast<std::size_t>(b)] =
        std::max(0.0, curves.phi[static_cast<std::size_t>(b)].front());
  double tail = curves.phi.back().front();

  if (tail >= 1.0)
    throw std::invalid_argument(
        "build_initial_distribution: aggregate fraction must be < 1");
  if (tail > 1e-12) {
    est.mu_hat = solve_poisson_mu(tail);
    // Poisson(mu_hat) shape over the unresolved range, scaled to the
    // observed aggregate mass
    double logmu = std::log(est.mu_hat);
    std::vector<double> w(static_cast<std::size_t>(n_max) + 1, 0.0);
    double wsum = 0.0;
    for (int n = n_res + 1; n <= n_max; ++n) {
      double lp = -est.mu_hat + n * logmu -
                  std::lgamma(static_cast<double>(n) + 1.0);
      w[static_cast<std::size_t>(n)] = std::exp(lp);
      wsum += w[static_cast<std::size_t>(n)];
    }
    if (wsum > 0.0)
      for (int n = n_res + 1; n <= n_max; ++n)
        est.probs[static_cast<std::size_t>(n)] =
            tail * w[static_cast<std::size_t>(n)] / wsum;
  }

  double total = 0.0;
  for (double p : est.probs) total += p;
  if (!(total > 0.0))
    throw std::invalid_argument("build_initial_distribution: all-zero curves");
  for (double& p : est.probs) p /= total;
  return est;
}

namespace {

// clamp each point into [0, 1] and renormalize each time bin; returns the
// number of bins that needed repair
int sanitize_curves(PopulationCurves& c) {
  int warnings = 0;
  const std::size_t nb = c.phi.size(), nt = c.time.size();
  for (std::size_t j = 0; j < nt; ++j) {
    bool touched = false;
    double sum = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      double v = c.phi[b][j];
      if (!std::isfinite(v))
        throw std::invalid_argument("fit_gamma: non-finite curve value");
      double cl = std::clamp(v, 0.0, 1.0);
      if (cl != v) touched = true;
      c.phi[b][j] = cl;
      sum += cl;
    }
    if (!(sum > 0.0))
      throw std::invalid_argument("fit_gamma: zero-sum time bin");
    if (std::abs(sum - 1.0) > 0.02) touched = true;
    if (std::abs(sum - 1.0) > 1e-12)
      for (std::size_t b = 0; b < nb; ++b) c.phi[b][j] /= sum;
    if (touched) ++warnings;
  }
  return warnings;
}

double objective(const PopulationCurves& c, const DeathModel& base,
                 double gamma) {
  DeathModel m = base;
  m.Gamma = gamma;
  const int n_res = static_cast<int>(c.phi.size()) - 2;
  double j2 = 0.0;
  for (std::size_t j = 0; j < c.time.size(); ++j) {
    std::vector<double> p = death_propagate(m, c.time[j]);
    double resolved = 0.0;
    for (int b = 0; b <= n_res; ++b) {
      double pb = p[static_cast<std::size_t>(b)];
      resolved += pb;
      double d = pb - c.phi[static_cast<std::size_t>(b)][j];
      j2 += d * d;
    }
    double d = (1.0 - resolved) - c.phi.back()[j];
    j2 += d * d;
  }
  return j2;
}

}  // namespace

FitResult fit_gamma(const PopulationCurves& curves,
                    const std::vector<double>& p_init,
                    std::pair<double, double> bracket) {
  if (curves.time.empty())
    throw std::invalid_argument("fit_gamma: empty curves");
  if (!(bracket.second > bracket.first) || !(bracket.first > 0.0))
    throw std::invalid_argument("fit_gamma: need 0 < bracket_lo < bracket_hi");
  if (p_init.size() < curves.phi.size() - 1)
    throw std::invalid_argument("fit_gamma: p_init shorter than resolved bands");

  PopulationCurves data = curves;
  FitResult res;
  res.clamp_warnings = sanitize_curves(data);

  DeathModel base;
  base.t0 = data.time.front();
  base.p_init = p_init;
  base.Gamma = bracket.first;
  base.validate();

  // golden-section search
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = bracket.first, b = bracket.second;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = objective(data, base, x1);
  double f2 = objective(data, base, x2);
  int it = 0;
  while ((b - a) > 1e-3 * std::max(0.5 * (a + b), 1e-12) && it < 200) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = objective(data, base, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = objective(data, base, x2);
    }
    ++it;
  }
  res.Gamma_hat = 0.5 * (a + b);
  res.residual = objective(data, base, res.Gamma_hat);
  res.iterations = it;
  double width = bracket.second - bracket.first;
  res.at_bracket_edge = (res.Gamma_hat - bracket.first) < 2e-3 * width ||
                        (bracket.second - res.Gamma_hat) < 2e-3 * width;
  return res;
}

}  // namespace atomcount
