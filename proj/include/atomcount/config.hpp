#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atomcount/detection.hpp"
#include "atomcount/gillespie.hpp"
#include "atomcount/physics.hpp"

namespace atomcount {

// Flat key=value run configuration, section-prefixed keys ("cavity.g0",
// "rates.y", ...). Unknown keys are rejected to catch typos. The built-in
// defaults reproduce the reference measurement campaign.
struct RunConfig {
  CavityParams cavity;
  RateModel rates;
  InitialDistribution init;
  DetectionConfig detection;

  struct Sim {
    double t_start = 0.034;
    double t_end = 2.0;
    int n_traces = 500;
    bool dump_trajectories = true;
  } sim;

  struct Analysis {
    int bins = 100;
    double amp_min = 0.0;
    double amp_max = 1.2;
    double time_bin = 0.01;
    double t0 = 0.034;
    int n_resolved = 2;
    double min_prominence = 0.01;
  } analysis;

  struct Model {
    int n_max = 10;
    std::vector<double> y_list{0.5, 0.1};
  } model;

  struct Fit {
    int n_max = 15;
    double bracket_lo = 0.5;
    double bracket_hi = 50.0;
  } fit;

  struct Run {
    std::uint64_t seed = 12345;
    std::string out_dir = "out";
  } run;

  void validate() const;

  // rates.i1_over_i0 when set, otherwise 1 / (4 C1^2) from the cavity numbers
  double i1_over_i0_effective() const;

  // detection.amplitude_scale when set, otherwise sqrt(nbar_empty)
  double amplitude_scale_effective() const;
};

RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig parse_config_file(const std::string& path);

// Emits every key; parse(serialize(c)) reproduces c exactly (doubles are
// written with 17 significant digits).
std::string serialize_config(const RunConfig& cfg);

// "0.85,0.55,0.25" style list, used for --boundaries and vector-valued keys
std::vector<double> parse_double_list(const std::string& text);

}  // namespace atomcount
