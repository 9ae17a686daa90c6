#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "atomcount/gillespie.hpp"

namespace atomcount {

struct DetectionConfig {
  double sample_rate = 1.0e4;          // Hz
  double detector_bandwidth = 1.0e3;   // Hz, analog stage
  double digital_bandwidth = 1.0e2;    // Hz, post-processing stage
  double noise_rms = 0.18;             // additive white Gaussian, per raw sample
  double amplitude_scale = 0.0;        // normalized -> physical; 0 = unset

  void validate() const;
};

// Normalized cavity transmission as a step function of time:
// value values[i] on [times[i], times[i+1]) and values.back() up to t_end.
struct StepSignal {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<double> times;   // times.front() == t_start, strictly increasing
  std::vector<double> values;

  void validate() const;
};

struct TraceMeta {
  std::uint64_t seed = 0;
  std::string units = "normalized";            // or "physical"
  std::vector<double> filter_cascade;          // bandwidths applied, in order
};

struct Trace {
  double dt = 1.0e-4;
  double t0 = 0.0;
  std::vector<double> samples;
  TraceMeta meta;

  double time_of(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double t_end() const { return t0 + static_cast<double>(samples.size()) * dt; }
};

// Map trajectory states to normalized transmission levels:
// 1 for k = 0 and i1_over_i0 / k^2 for k >= 1.
StepSignal render_levels(const EventTrajectory& traj, double i1_over_i0);

// Detector model. Each sample is the exact time average of the step signal
// over its sample interval, plus white Gaussian noise of sd noise_rms, then
// two unity-DC-gain single-pole low-pass stages (detector_bandwidth, then
// digital_bandwidth). Deterministic given seed.
Trace sample_and_detect(const StepSignal& signal, const DetectionConfig& cfg,
                        std::uint64_t seed);

// One single-pole low-pass stage, pole time constant 1/(2 pi bandwidth),
// exact exponential step mapping a = 1 - exp(-dt/tau), state seeded with the
// first sample. Requires bandwidth < sample_rate / 2. Appends to the
// trace's filter cascade record.
Trace filter_trace(const Trace& trace, double bandwidth);

// Physical-units view: every sample multiplied by amplitude_scale.
Trace to_physical(const Trace& trace, double amplitude_scale);

}  // namespace atomcount
