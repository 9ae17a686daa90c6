#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "atomcount/rng.hpp"

namespace atomcount {

// Transition rates of the joint process {N trapped, k coupled}:
//   k -> k+1 at gamma_01 = y * gamma_10          (k < N)
//   k -> k-1 at gamma_10 / k^2                   (k > 0)
//   N -> N-1 at Gamma_loss * N; the departing atom is one of the coupled
//   manifold with probability k/N, in which case k drops too.
struct RateModel {
  double gamma_10 = 1.0e5;   // 1/s, manifold decay out of k = 1
  double y = 0.5;            // gamma_01 / gamma_10
  double Gamma_loss = 8.5;   // 1/s, per-atom trap loss
  double i1_over_i0 = 0.0;   // transmission of k = 1 relative to empty; 0 = derive

  double gamma_01() const { return y * gamma_10; }

  // telegraph must be fast against trap loss for plateaus to be meaningful
  bool timescale_separation_ok() const {
    return gamma_10 >= 100.0 * Gamma_loss;
  }

  void validate() const;
};

struct InitialDistribution {
  enum class Kind { fixed, poisson, explicit_pmf };

  Kind kind = Kind::poisson;
  int fixed_n = 1;             // kind == fixed
  double mu = 5.2;             // kind == poisson, truncated at n_max
  std::vector<double> pmf;     // kind == explicit_pmf, index = N
  int n_max = 20;

  void validate() const;

  // probabilities over N = 0..n_max, normalized
  std::vector<double> probabilities() const;

  int sample(Rng& rng) const;  // inverse CDF over probabilities()
};

struct TrajectoryEvent {
  double time;
  int n_trapped;
  int n_coupled;
};

// Piecewise-constant state record. State is (initial_n, initial_k) on
// [t_start, events[0].time) and events[i]'s values from events[i].time on.
struct EventTrajectory {
  double t_start = 0.0;
  double t_end = 0.0;
  int initial_n = 0;
  int initial_k = 0;
  std::vector<TrajectoryEvent> events;

  std::pair<int, int> state_at(double t) const;

  // f(t_lo, t_hi, n, k) for every constant segment, in time order
  template <typename F>
  void for_each_segment(F&& f) const {
    double t = t_start;
    int n = initial_n, k = initial_k;
    for (const auto& e : events) {
      if (e.time > t) f(t, e.time, n, k);
      t = e.time;
      n = e.n_trapped;
      k = e.n_coupled;
    }
    if (t_end > t) f(t, t_end, n, k);
  }
};

// Exact stochastic simulation of the joint process over t_span.
// N is drawn from init; k starts from the manifold steady state for that N
// (the telegraph equilibrates within ~10/gamma_10, far below any analysis
// timescale). Deterministic for fixed (inputs, seed).
EventTrajectory simulate_trajectory(const RateModel& rates,
                                    const InitialDistribution& init,
                                    std::pair<double, double> t_span,
                                    std::uint64_t seed);

// Fraction of [t_start, t_end] spent in each visited (N, k) state.
std::map<std::pair<int, int>, double> occupancy_fractions(
    const EventTrajectory& traj);

// n_traces independent trajectories with per-trace seeds child_seed(master, i).
std::vector<EventTrajectory> batch_simulate(const RateModel& rates,
                                            const InitialDistribution& init,
                                            std::pair<double, double> t_span,
                                            int n_traces,
                                            std::uint64_t master_seed);

}  // namespace atomcount
