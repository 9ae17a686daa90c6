#include "atomcount/detection.hpp"

#include <cmath>
#include <stdexcept>

#include "atomcount/physics.hpp"
#include "atomcount/rng.hpp"

namespace atomcount {

void DetectionConfig::validate() const {
  if (!(sample_rate > 0.0))
    throw std::invalid_argument("DetectionConfig: sample_rate must be positive");
  if (!(detector_bandwidth > 0.0) || !(digital_bandwidth > 0.0))
    throw std::invalid_argument("DetectionConfig: bandwidths must be positive");
  if (!(sample_rate > 2.0 * detector_bandwidth))
    throw std::invalid_argument(
        "DetectionConfig: need sample_rate > 2 * detector_bandwidth");
  if (!(detector_bandwidth > 2.0 * digital_bandwidth))
    throw std::invalid_argument(
        "DetectionConfig: need detector_bandwidth > 2 * digital_bandwidth");
  if (!(noise_rms >= 0.0))
    throw std::invalid_argument("DetectionConfig: noise_rms must be >= 0");
  if (!(amplitude_scale >= 0.0))
    throw std::invalid_argument("DetectionConfig: amplitude_scale must be >= 0");
}

void StepSignal::validate() const {
  if (times.empty() || times.size() != values.size())
    throw std::invalid_argument("StepSignal: times/values size mismatch");
  if (times.front() != t_start)
    throw std::invalid_argument("StepSignal: times must start at t_start");
  if (!(t_end > t_start))
    throw std::invalid_argument("StepSignal: need t_end > t_start");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("StepSignal: times must be strictly increasing");
  if (times.back() >= t_end)
    throw std::invalid_argument("StepSignal: segment starts past t_end");
}

StepSignal render_levels(const EventTrajectory& traj, double i1_over_i0) {
  if (!(i1_over_i0 >= 0.0))
    throw std::invalid_argument("render_levels: i1_over_i0 must be >= 0");
  StepSignal s;
  s.t_start = traj.t_start;
  s.t_end = traj.t_end;
  traj.for_each_segment([&](double lo, double, int, int k) {
    s.times.push_back(lo);
    s.values.push_back(intensity_level(k, i1_over_i0));
  });
  if (s.times.empty()) {
    s.times.push_back(traj.t_start);
    s.values.push_back(intensity_level(traj.initial_k, i1_over_i0));
  }
  s.validate();
  return s;
}

namespace {

// exact interval averages of a step signal on n bins of width dt from t_start
std::vector<double> bin_averages(const StepSignal& sig, double dt,
                                 std::size_t n) {
  std::vector<double> out(n);
  std::size_t seg = 0;
  const std::size_t nseg = sig.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    double lo = sig.t_start + static_cast<double>(i) * dt;
    double hi = lo + dt;
    double acc = 0.0;
    // advance to the segment containing lo
    while (seg + 1 < nseg && sig.times[seg + 1] <= lo) ++seg;
    std::size_t j = seg;
    double pos = lo;
    while (pos < hi) {
      // the last segment's value holds through hi even when rounding puts
      // hi an ulp past t_end, so the walk always makes progress
      double seg_end = (j + 1 < nseg) ? std::min(sig.times[j + 1], hi) : hi;
      acc += sig.values[j] * (seg_end - pos);
      pos = seg_end;
      if (j + 1 < nseg && pos >= sig.times[j + 1]) ++j;
    }
    out[i] = acc / dt;
  }
  return out;
}

void lowpass_inplace(std::vector<double>& x, double dt, double bandwidth) {
  double tau = 1.0 / (2.0 * M_PI * bandwidth);
  double a = 1.0 - std::exp(-dt / tau);
  double state = x.empty() ? 0.0 : x[0];
  for (double& v : x) {
    state += a * (v - state);
    v = state;
  }
}

}  // namespace

Trace sample_and_detect(const StepSignal& signal, const DetectionConfig& cfg,
                        std::uint64_t seed) {
  signal.validate();
  cfg.validate();

  double dt = 1.0 / cfg.sample_rate;
  double span = signal.t_end - signal.t_start;
  auto n = static_cast<std::size_t>(std::floor(span / dt * (1.0 + 1e-12)));
  if (n == 0)
    throw std::invalid_argument(
        "sample_and_detect: span shorter than one sample interval");

  Trace tr;
  tr.dt = dt;
  tr.t0 = signal.t_start;
  tr.meta.seed = seed;
  tr.meta.units = "normalized";
  tr.samples = bin_averages(signal, dt, n);

  if (cfg.noise_rms > 0.0) {
    Rng rng(seed);
    for (double& v : tr.samples) v += cfg.noise_rms * rng.gaussian();
  }

  lowpass_inplace(tr.samples, dt, cfg.detector_bandwidth);
  tr.meta.filter_cascade.push_back(cfg.detector_bandwidth);
  lowpass_inplace(tr.samples, dt, cfg.digital_bandwidth);
  tr.meta.filter_cascade.push_back(cfg.digital_bandwidth);
  return tr;
}

Trace filter_trace(const Trace& trace, double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("filter_trace: bandwidth must be positive");
  double sample_rate = 1.0 / trace.dt;
  if (!(bandwidth < 0.5 * sample_rate))
    throw std::invalid_argument(
        "filter_trace: bandwidth must be below half the sample rate");
  Trace out = trace;
  lowpass_inplace(out.samples, out.dt, bandwidth);
  out.meta.filter_cascade.push_back(bandwidth);
  return out;
}

Trace to_physical(const Trace& trace, double amplitude_scale) {
  if (!(amplitude_scale > 0.0))
    throw std::invalid_argument("to_physical: amplitude_scale must be positive");
  if (trace.meta.units == "physical")
    throw std::invalid_argument("to_physical: trace already in physical units");
  Trace out = trace;
  for (double& v : out.samples) v *= amplitude_scale;
  out.meta.units = "physical";
  return out;
}

}  // namespace atomcount
