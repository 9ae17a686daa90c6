#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomcount/detection.hpp"
#include "atomcount/trace_io.hpp"
#include "doctest.h"

using namespace atomcount;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("render_levels maps states to transmission") {
  EventTrajectory traj;
  traj.t_start = 0.0;
  traj.t_end = 1.0;
  traj.initial_n = 2;
  traj.initial_k = 0;
  traj.events.push_back({0.25, 2, 1});
  traj.events.push_back({0.5, 2, 2});
  traj.events.push_back({0.75, 1, 0});

  auto sig = render_levels(traj, 0.4);
  REQUIRE(sig.times.size() == 4);
  CHECK(sig.t_start == 0.0);
  CHECK(sig.t_end == 1.0);
  CHECK(sig.values[0] == doctest::Approx(1.0));
  CHECK(sig.values[1] == doctest::Approx(0.4));
  CHECK(sig.values[2] == doctest::Approx(0.1));
  CHECK(sig.values[3] == doctest::Approx(1.0));

  EventTrajectory quiet;
  quiet.t_start = 0.0;
  quiet.t_end = 0.5;
  quiet.initial_n = 0;
  quiet.initial_k = 0;
  auto flat = render_levels(quiet, 0.4);
  REQUIRE(flat.times.size() == 1);
  CHECK(flat.values[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(render_levels(traj, -0.1), std::invalid_argument);
}

TEST_CASE("sampling takes exact interval averages") {
  DetectionConfig cfg;
  cfg.noise_rms = 0.0;
  double dt = 1.0 / cfg.sample_rate;

  // constant signal passes through the whole chain unchanged
  StepSignal flat;
  flat.t_start = 0.0;
  flat.t_end = 20 * dt;
  flat.times = {0.0};
  flat.values = {0.7};
  auto tr = sample_and_detect(flat, cfg, 1);
  REQUIRE(tr.samples.size() == 20);
  for (double v : tr.samples) CHECK(v == 0.7);
  CHECK(tr.dt == dt);
  CHECK(tr.t0 == 0.0);
  REQUIRE(tr.meta.filter_cascade.size() == 2);
  CHECK(tr.meta.filter_cascade[0] == cfg.detector_bandwidth);
  CHECK(tr.meta.filter_cascade[1] == cfg.digital_bandwidth);

  // a step inside the first bin: the filters seed on the first sample, so
  // sample 0 is exactly the bin average
  StepSignal split;
  split.t_start = 0.0;
  split.t_end = 10 * dt;
  split.times = {0.0, 0.5 * dt};
  split.values = {2.0, 4.0};
  tr = sample_and_detect(split, cfg, 1);
  CHECK(tr.samples[0] == doctest::Approx(3.0).epsilon(1e-12));

  // quarter split
  split.times = {0.0, 0.25 * dt};
  split.values = {0.0, 1.0};
  tr = sample_and_detect(split, cfg, 1);
  CHECK(tr.samples[0] == doctest::Approx(0.75).epsilon(1e-12));

  StepSignal tiny;
  tiny.t_start = 0.0;
  tiny.t_end = 0.4 * dt;
  tiny.times = {0.0};
  tiny.values = {1.0};
  CHECK_THROWS_AS(sample_and_detect(tiny, cfg, 1), std::invalid_argument);
}

TEST_CASE("low-pass step response and DC gain") {
  const double B = 250.0;
  const double fs = 100.0 * B;
  Trace tr;
  tr.dt = 1.0 / fs;
  tr.t0 = 0.0;
  tr.samples.assign(50, 0.0);
  tr.samples.resize(450, 1.0);

  auto out = filter_trace(tr, B);
  REQUIRE(out.meta.filter_cascade.size() == 1);
  CHECK(out.meta.filter_cascade[0] == B);
  for (std::size_t i = 0; i < 50; ++i) CHECK(out.samples[i] == 0.0);

  // each output sample reflects the signal up to the end of its bin, so
  // elapsed time at index i is (i - 49) * dt from the step edge
  double c = 1.0 - std::exp(-1.0);
  double tau = 1.0 / (2.0 * M_PI * B);
  double t_cross = -1.0;
  for (std::size_t i = 50; i < out.samples.size(); ++i) {
    if (out.samples[i] >= c) {
      double y0 = out.samples[i - 1];
      double y1 = out.samples[i];
      double e1 = static_cast<double>(i - 49) * tr.dt;
      t_cross = e1 - tr.dt * (y1 - c) / (y1 - y0);
      break;
    }
  }
  REQUIRE(t_cross > 0.0);
  CHECK(std::abs(t_cross - tau) / tau < 0.02);

  // unity DC gain: constant input is a fixed point
  Trace dc;
  dc.dt = 1e-4;
  dc.t0 = 0.0;
  dc.samples.assign(5000, 0.8315);
  auto held = filter_trace(filter_trace(dc, 1000.0), 100.0);
  for (double v : held.samples) CHECK(std::abs(v - 0.8315) <= 1e-9 * 0.8315);

  CHECK_THROWS_AS(filter_trace(dc, 5000.0), std::invalid_argument);
  CHECK_THROWS_AS(filter_trace(dc, 0.0), std::invalid_argument);
}

TEST_CASE("noise variance through the cascade") {
  // white noise of unit variance into the 1 kHz + 100 Hz stages at 10 kS/s;
  // discrete two-pole prediction for the output variance
  const double expected = 0.028738811345642823;

  DetectionConfig cfg;
  cfg.noise_rms = 1.0;
  StepSignal zero;
  zero.t_start = 0.0;
  zero.t_end = 30.0;
  zero.times = {0.0};
  zero.values = {0.0};
  auto tr = sample_and_detect(zero, cfg, 20260501);

  double mean = 0.0;
  std::size_t skip = 2000;  // settle past the seeded-state transient
  std::size_t n = tr.samples.size() - skip;
  for (std::size_t i = skip; i < tr.samples.size(); ++i) mean += tr.samples[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = skip; i < tr.samples.size(); ++i) {
    double d = tr.samples[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);

  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - expected) / expected < 0.10);
}

TEST_CASE("noisy plateau statistics") {
  EventTrajectory quiet;
  quiet.t_start = 0.0;
  quiet.t_end = 2.0;
  quiet.initial_n = 0;
  quiet.initial_k = 0;
  auto sig = render_levels(quiet, 0.4);

  DetectionConfig cfg;  // noise_rms 0.18
  auto tr = sample_and_detect(sig, cfg, 77);
  double mean = 0.0;
  for (double v : tr.samples) mean += v;
  mean /= static_cast<double>(tr.samples.size());
  double var = 0.0;
  for (double v : tr.samples) var += (v - mean) * (v - mean);
  var /= static_cast<double>(tr.samples.size() - 1);

  CHECK(std::abs(mean - 1.0) < 0.01);
  CHECK(std::sqrt(var) < 0.05);  // bands 1.0 / 0.4 / 0.1 stay separable
}

TEST_CASE("detection is deterministic in the seed") {
  EventTrajectory quiet;
  quiet.t_start = 0.0;
  quiet.t_end = 0.3;
  quiet.initial_n = 0;
  quiet.initial_k = 0;
  auto sig = render_levels(quiet, 0.4);
  DetectionConfig cfg;
  auto a = sample_and_detect(sig, cfg, 42);
  auto b = sample_and_detect(sig, cfg, 42);
  auto c = sample_and_detect(sig, cfg, 43);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i] == b.samples[i]);
  bool differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    if (a.samples[i] != c.samples[i]) differs = true;
  CHECK(differs);
}

TEST_CASE("physical units view") {
  Trace tr;
  tr.dt = 1e-4;
  tr.t0 = 0.0;
  tr.samples = {1.0, 0.5};
  auto ph = to_physical(tr, 0.1414213562);
  CHECK(ph.meta.units == "physical");
  CHECK(ph.samples[0] == doctest::Approx(0.1414213562));
  CHECK(tr.meta.units == "normalized");  // original untouched
  CHECK_THROWS_AS(to_physical(ph, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(to_physical(tr, 0.0), std::invalid_argument);
}

TEST_CASE("config validation") {
  DetectionConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.sample_rate = 1500.0;  // not > 2 * detector bandwidth
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = DetectionConfig{};
  cfg.digital_bandwidth = 600.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = DetectionConfig{};
  cfg.noise_rms = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("trace csv round trip") {
  EventTrajectory quiet;
  quiet.t_start = 0.034;
  quiet.t_end = 0.3;
  quiet.initial_n = 0;
  quiet.initial_k = 0;
  auto sig = render_levels(quiet, 0.4);
  DetectionConfig cfg;
  auto tr = sample_and_detect(sig, cfg, 1234);

  const std::string pa = "ut_trace_a.csv";
  const std::string pb = "ut_trace_b.csv";
  write_trace_csv(pa, tr);
  auto rd = read_trace_csv(pa);
  CHECK(rd.dt == tr.dt);
  CHECK(rd.t0 == tr.t0);
  CHECK(rd.meta.seed == tr.meta.seed);
  CHECK(rd.meta.units == tr.meta.units);
  REQUIRE(rd.meta.filter_cascade.size() == 2);
  CHECK(rd.meta.filter_cascade[0] == tr.meta.filter_cascade[0]);
  REQUIRE(rd.samples.size() == tr.samples.size());
  for (std::size_t i = 0; i < rd.samples.size(); ++i)
    CHECK(rd.samples[i] == doctest::Approx(tr.samples[i]).epsilon(1e-8));

  // serialized form is a fixed point of write/read/write
  write_trace_csv(pb, rd);
  CHECK(slurp(pa) == slurp(pb));
  std::remove(pa.c_str());
  std::remove(pb.c_str());
}

TEST_CASE("trace csv rejects malformed input") {
  const std::string path = "ut_trace_bad.csv";
  {
    std::ofstream out(path);
    out << "# dt=0.0001\n# t0=0\n# seed=1\n# units=normalized\n# filters=\n";
    out << "0,1.0\n";
    out << "0.0001;0.99\n";  // line 7: no comma
  }
  bool threw = false;
  try {
    read_trace_csv(path);
  } catch (const std::runtime_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find(":7:") != std::string::npos);
  }
  CHECK(threw);

  {
    std::ofstream out(path);
    out << "# t0=0\n0,1.0\n";  // dt missing
  }
  CHECK_THROWS_AS(read_trace_csv(path), std::runtime_error);

  {
    std::ofstream out(path);
    out << "# dt=0.0001\n# t0=0\n# gain=3\n0,1.0\n";  // unknown key
  }
  CHECK_THROWS_AS(read_trace_csv(path), std::runtime_error);

  CHECK_THROWS_AS(read_trace_csv("ut_no_such_file.csv"), std::runtime_error);
  std::remove(path.c_str());
}
