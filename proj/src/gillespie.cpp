#include "atomcount/gillespie.hpp"

#include <cmath>
#include <stdexcept>

#include "atomcount/physics.hpp"

namespace atomcount {

void RateModel::validate() const {
  if (!(gamma_10 > 0.0) || !std::isfinite(gamma_10))
    throw std::invalid_argument("RateModel: gamma_10 must be positive");
  if (!(y > 0.0) || !std::isfinite(y))
    throw std::invalid_argument("RateModel: y must be positive");
  if (!(Gamma_loss >= 0.0) || !std::isfinite(Gamma_loss))
    throw std::invalid_argument("RateModel: Gamma_loss must be >= 0");
  if (!(i1_over_i0 >= 0.0))
    throw std::invalid_argument("RateModel: i1_over_i0 must be >= 0");
}

void InitialDistribution::validate() const {
  if (n_max < 0)
    throw std::invalid_argument("InitialDistribution: n_max must be >= 0");
  switch (kind) {
    case Kind::fixed:
      if (fixed_n < 0 || fixed_n > n_max)
        throw std::invalid_argument(
            "InitialDistribution: fixed_n outside [0, n_max]");
      break;
    case Kind::poisson:
      if (!(mu >= 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("InitialDistribution: mu must be >= 0");
      break;
    case Kind::explicit_pmf: {
      if (pmf.empty() || pmf.size() > static_cast<std::size_t>(n_max) + 1)
        throw std::invalid_argument(
            "InitialDistribution: pmf length must be in [1, n_max + 1]");
      double s = 0.0;
      for (double p : pmf) {
        if (!(p >= 0.0) || !std::isfinite(p))
          throw std::invalid_argument(
              "InitialDistribution: pmf entries must be >= 0");
        s += p;
      }
      if (!(s > 0.0))
        throw std::invalid_argument("InitialDistribution: pmf sums to zero");
      break;
    }
  }
}

std::vector<double> InitialDistribution::probabilities() const {
  validate();
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
  switch (kind) {
    case Kind::fixed:
      p[static_cast<std::size_t>(fixed_n)] = 1.0;
      break;
    case Kind::poisson: {
      // truncated at n_max, renormalized; log form avoids factorial overflow
      if (mu == 0.0) {
        p[0] = 1.0;
        break;
      }
      double logmu = std::log(mu);
      double s = 0.0;
      for (int n = 0; n <= n_max; ++n) {
        double lp = -mu + n * logmu - std::lgamma(static_cast<double>(n) + 1.0);
        p[static_cast<std::size_t>(n)] = std::exp(lp);
        s += p[static_cast<std::size_t>(n)];
      }
      for (double& x : p) x /= s;
      break;
    }
    case Kind::explicit_pmf: {
      double s = 0.0;
      for (double x : pmf) s += x;
      for (std::size_t i = 0; i < pmf.size(); ++i) p[i] = pmf[i] / s;
      break;
    }
  }
  return p;
}

int InitialDistribution::sample(Rng& rng) const {
  std::vector<double> p = probabilities();
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    acc += p[n];
    if (u < acc) return static_cast<int>(n);
  }
  return n_max;
}

std::pair<int, int> EventTrajectory::state_at(double t) const {
  if (t < t_start || t > t_end)
    throw std::out_of_range("EventTrajectory::state_at: t outside span");
  int n = initial_n, k = initial_k;
  for (const auto& e : events) {
    if (e.time > t) break;
    n = e.n_trapped;
    k = e.n_coupled;
  }
  return {n, k};
}

namespace {

int sample_pmf(const std::vector<double>& p, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace

EventTrajectory simulate_trajectory(const RateModel& rates,
                                    const InitialDistribution& init,
                                    std::pair<double, double> t_span,
                                    std::uint64_t seed) {
  rates.validate();
  init.validate();
  if (!(t_span.second > t_span.first) || !std::isfinite(t_span.first) ||
      !std::isfinite(t_span.second))
    throw std::invalid_argument("simulate_trajectory: need t_end > t_start");

  Rng rng(seed);

  EventTrajectory traj;
  traj.t_start = t_span.first;
  traj.t_end = t_span.second;

  int n = init.sample(rng);
  int k = 0;
  if (n > 0) {
    ManifoldModel mm{rates.y, n};
    k = sample_pmf(steady_state_distribution(mm, n), rng);
  }
  traj.initial_n = n;
  traj.initial_k = k;

  double g01 = rates.gamma_01();
  double t = t_span.first;
  for (;;) {
    double r_up = (k < n) ? g01 : 0.0;
    double r_down =
        (k > 0) ? rates.gamma_10 / (static_cast<double>(k) * k) : 0.0;
    double r_loss = rates.Gamma_loss * n;
    double total = r_up + r_down + r_loss;
    if (total <= 0.0) break;  // absorbing (N = 0, k = 0 with no pumping)

    t += rng.exponential(total);
    if (t >= t_span.second) break;

    double u = rng.uniform() * total;
    if (u < r_up) {
      ++k;
    } else if (u < r_up + r_down) {
      --k;
    } else {
      // one of the N atoms leaves; it was coupled with probability k/N
      if (rng.uniform() * n < static_cast<double>(k)) --k;
      --n;
    }
    traj.events.push_back({t, n, k});
  }
  return traj;
}

std::map<std::pair<int, int>, double> occupancy_fractions(
    const EventTrajectory& traj) {
  double span = traj.t_end - traj.t_start;
  if (!(span > 0.0))
    throw std::invalid_argument("occupancy_fractions: empty time span");
  std::map<std::pair<int, int>, double> frac;
  traj.for_each_segment([&](double lo, double hi, int n, int k) {
    frac[{n, k}] += (hi - lo) / span;
  });
  return frac;
}

std::vector<EventTrajectory> batch_simulate(const RateModel& rates,
                                            const InitialDistribution& init,
                                            std::pair<double, double> t_span,
                                            int n_traces,
                                            std::uint64_t master_seed) {
  if (n_traces < 1)
    throw std::invalid_argument("batch_simulate: n_traces must be >= 1");
  std::vector<EventTrajectory> out;
  out.reserve(static_cast<std::size_t>(n_traces));
  for (int i = 0; i < n_traces; ++i)
    out.push_back(simulate_trajectory(
        rates, init, t_span, child_seed(master_seed, static_cast<std::uint64_t>(i))));
  return out;
}

}  // namespace atomcount
