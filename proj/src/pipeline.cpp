#include "atomcount/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "atomcount/rng.hpp"
#include "atomcount/trace_io.hpp"

namespace atomcount {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + dir + ": " +
                             ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

int TraceTruth::n_at(double t) const {
  int n = initial_n;
  for (double lt : loss_times) {
    if (lt > t) break;
    --n;
  }
  return n;
}

ModelSummary run_model(const RunConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.run.out_dir);
  ModelSummary sum;
  for (double y : cfg.model.y_list) {
    ManifoldModel mm{y, cfg.model.n_max};
    std::string path =
        join(cfg.run.out_dir, "p0_table_y" + format_sig9(y) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "N,p0\n";
    for (int n = 0; n <= cfg.model.n_max; ++n)
      out << n << ',' << format_sig9(plateau_prediction(mm, n)) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
    sum.table_files.push_back(path);
  }
  return sum;
}

namespace {

void write_truth_csv(const std::string& path, const EventTrajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  std::string body = "time,N,k\n";
  char line[96];
  auto row = [&](double t, int n, int k) {
    int len = std::snprintf(line, sizeof line, "%.9g,%d,%d\n", t, n, k);
    body.append(line, static_cast<std::size_t>(len));
  };
  row(traj.t_start, traj.initial_n, traj.initial_k);
  for (const auto& e : traj.events) row(e.time, e.n_trapped, e.n_coupled);
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

SimulateSummary run_simulate(const RunConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.run.out_dir);

  RateModel rates = cfg.rates;
  rates.i1_over_i0 = cfg.i1_over_i0_effective();
  const std::pair<double, double> span{cfg.sim.t_start, cfg.sim.t_end};

  SimulateSummary sum;
  sum.manifest_file = join(cfg.run.out_dir, "manifest.csv");
  std::ofstream manifest(sum.manifest_file, std::ios::binary);
  if (!manifest)
    throw std::runtime_error("cannot open for writing: " + sum.manifest_file);
  manifest << "index,seed,trace_file,truth_file\n";

  for (int i = 0; i < cfg.sim.n_traces; ++i) {
    std::uint64_t seed = child_seed(cfg.run.seed, static_cast<std::uint64_t>(i));
    EventTrajectory traj = simulate_trajectory(rates, cfg.init, span, seed);

    TraceTruth truth;
    truth.initial_n = traj.initial_n;
    int prev_n = traj.initial_n;
    for (const auto& e : traj.events) {
      if (e.n_trapped > prev_n) truth.n_nonincreasing = false;
      if (e.n_trapped < prev_n) truth.loss_times.push_back(e.time);
      prev_n = e.n_trapped;
    }

    StepSignal sig = render_levels(traj, rates.i1_over_i0);
    // the detector noise stream gets its own child so trajectory and noise
    // stay independent
    Trace tr = sample_and_detect(sig, cfg.detection, child_seed(seed, 1));

    char name[64];
    std::snprintf(name, sizeof name, "trace_%04d.csv", i);
    std::string trace_path = join(cfg.run.out_dir, name);
    write_trace_csv(trace_path, tr);

    std::string truth_path;
    if (cfg.sim.dump_trajectories) {
      std::snprintf(name, sizeof name, "truth_%04d.csv", i);
      truth_path = join(cfg.run.out_dir, name);
      write_truth_csv(truth_path, traj);
      sum.truth_files.push_back(truth_path);
    }

    manifest << i << ',' << seed << ',' << fs::path(trace_path).filename().string()
             << ',' << (truth_path.empty() ? std::string() : fs::path(truth_path).filename().string())
             << '\n';
    sum.trace_files.push_back(trace_path);
    sum.truths.push_back(std::move(truth));
  }
  if (!manifest) throw std::runtime_error("write failed: " + sum.manifest_file);
  return sum;
}

AnalyzeSummary run_analyze(const RunConfig& cfg,
                           const std::vector<std::string>& trace_files,
                           const std::optional<std::vector<double>>& manual_boundaries) {
  cfg.validate();
  if (trace_files.empty())
    throw std::invalid_argument("analyze: need at least one trace file");
  ensure_dir(cfg.run.out_dir);

  std::vector<Trace> traces;
  traces.reserve(trace_files.size());
  for (const auto& path : trace_files) {
    Trace tr = read_trace_csv(path);
    // apply the digital stage unless the recorded cascade already ends with it
    bool filtered = false;
    for (double b : tr.meta.filter_cascade)
      if (std::abs(b - cfg.detection.digital_bandwidth) <=
          1e-9 * cfg.detection.digital_bandwidth)
        filtered = true;
    if (!filtered) tr = filter_trace(tr, cfg.detection.digital_bandwidth);
    traces.push_back(std::move(tr));
  }

  double t_end = traces.front().t_end();
  for (const auto& tr : traces) t_end = std::min(t_end, tr.t_end());
  int time_bins = static_cast<int>(
      std::floor((t_end - cfg.analysis.t0) / cfg.analysis.time_bin *
                 (1.0 + 1e-12)));
  if (time_bins < 1)
    throw std::invalid_argument("analyze: window shorter than one time bin");
  // both histograms pool the same whole-bin window, so the 2D amplitude
  // marginal reproduces the 1D histogram count for count
  const std::pair<double, double> window{
      cfg.analysis.t0, cfg.analysis.t0 + time_bins * cfg.analysis.time_bin};
  const std::pair<double, double> amp_range{cfg.analysis.amp_min,
                                            cfg.analysis.amp_max};

  AnalyzeSummary sum;
  sum.hist = histogram_amplitudes(traces, window, cfg.analysis.bins, amp_range);
  sum.hist2d = histogram_2d(traces, window, time_bins, cfg.analysis.bins,
                            amp_range);

  if (manual_boundaries)
    sum.bands = band_set_from_boundaries(*manual_boundaries);
  else
    sum.bands = find_bands(sum.hist, cfg.analysis.min_prominence,
                           cfg.analysis.n_resolved);

  sum.curves = population_curves(traces, sum.bands, cfg.analysis.t0,
                                 cfg.analysis.time_bin);

  sum.hist_file = join(cfg.run.out_dir, "hist1d.csv");
  sum.hist2d_file = join(cfg.run.out_dir, "hist2d.csv");
  sum.bands_file = join(cfg.run.out_dir, "bands.csv");
  sum.curves_file = join(cfg.run.out_dir, "curves.csv");
  write_histogram_csv(sum.hist_file, sum.hist);
  write_histogram2d_csv(sum.hist2d_file, sum.hist2d);
  write_bands_csv(sum.bands_file, sum.bands);
  write_curves_csv(sum.curves_file, sum.curves);
  return sum;
}

FitSummary run_fit(const RunConfig& cfg, const std::string& curves_file) {
  cfg.validate();
  ensure_dir(cfg.run.out_dir);

  PopulationCurves curves = read_curves_csv(curves_file);
  InitialEstimate init = build_initial_distribution(curves, cfg.fit.n_max);
  FitSummary sum;
  sum.result = fit_gamma(curves, init.probs,
                         {cfg.fit.bracket_lo, cfg.fit.bracket_hi});
  sum.result.mu_hat = init.mu_hat;

  sum.fit_file = join(cfg.run.out_dir, "fit.txt");
  {
    std::ofstream out(sum.fit_file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + sum.fit_file);
    out << "Gamma_hat = " << format_sig9(sum.result.Gamma_hat) << "\n"
        << "mu_hat = " << format_sig9(sum.result.mu_hat) << "\n"
        << "residual = " << format_sig9(sum.result.residual) << "\n"
        << "iterations = " << sum.result.iterations << "\n"
        << "clamp_warnings = " << sum.result.clamp_warnings << "\n"
        << "at_bracket_edge = " << (sum.result.at_bracket_edge ? "true" : "false")
        << "\n";
    if (!out) throw std::runtime_error("write failed: " + sum.fit_file);
  }

  sum.fit_curves_file = join(cfg.run.out_dir, "fit_curves.csv");
  {
    DeathModel model{sum.result.Gamma_hat, curves.time.front(), init.probs};
    std::ofstream out(sum.fit_curves_file, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot open for writing: " + sum.fit_curves_file);
    out << 't';
    for (int b = 0; b <= curves.n_resolved; ++b) out << ",p" << b;
    out << ",p_ge" << (curves.n_resolved + 1) << '\n';
    for (double t : curves.time) {
      std::vector<double> p = death_propagate(model, t);
      double resolved = 0.0;
      out << format_sig9(t);
      for (int b = 0; b <= curves.n_resolved; ++b) {
        resolved += p[static_cast<std::size_t>(b)];
        out << ',' << format_sig9(p[static_cast<std::size_t>(b)]);
      }
      out << ',' << format_sig9(1.0 - resolved) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + sum.fit_curves_file);
  }
  return sum;
}

}  // namespace atomcount
