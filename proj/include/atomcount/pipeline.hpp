#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atomcount/analysis.hpp"
#include "atomcount/config.hpp"
#include "atomcount/deathfit.hpp"

namespace atomcount {

// File-producing implementations of the CLI subcommands. Everything is
// deterministic for a fixed config: rerunning with the same inputs yields
// byte-identical output files.

struct ModelSummary {
  std::vector<std::string> table_files;  // one p0 table per configured y
};

struct TraceTruth {
  int initial_n = 0;
  std::vector<double> loss_times;  // times at which N dropped by one
  bool n_nonincreasing = true;

  int n_at(double t) const;
};

struct SimulateSummary {
  std::string manifest_file;
  std::vector<std::string> trace_files;
  std::vector<std::string> truth_files;  // empty when dumps are disabled
  std::vector<TraceTruth> truths;
};

struct AnalyzeSummary {
  Histogram1D hist;
  Histogram2D hist2d;
  BandSet bands;
  PopulationCurves curves;
  std::string hist_file, hist2d_file, bands_file, curves_file;
};

struct FitSummary {
  FitResult result;
  std::string fit_file, fit_curves_file;
};

ModelSummary run_model(const RunConfig& cfg);

SimulateSummary run_simulate(const RunConfig& cfg);

AnalyzeSummary run_analyze(
    const RunConfig& cfg, const std::vector<std::string>& trace_files,
    const std::optional<std::vector<double>>& manual_boundaries = std::nullopt);

FitSummary run_fit(const RunConfig& cfg, const std::string& curves_file);

}  // namespace atomcount
