// atomcount: simulate and analyze single-atom cavity transmission traces.
//
//   atomcount model     write steady-state plateau tables p0(N; y)
//   atomcount simulate  generate detected traces + ground truth + manifest
//   atomcount analyze   histogram traces, find bands, write population curves
//   atomcount fit       estimate the trap decay rate from population curves

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atomcount/config.hpp"
#include "atomcount/pipeline.hpp"
#include "atomcount/trace_io.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key=value config file");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "master RNG seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
}

atomcount::RunConfig load_config(const CommonOpts& opts) {
  atomcount::RunConfig cfg;
  if (!opts.config_path.empty())
    cfg = atomcount::parse_config_file(opts.config_path);
  if (!opts.out_dir.empty()) cfg.run.out_dir = opts.out_dir;
  if (opts.seed_set) cfg.run.seed = opts.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cavity transmission simulator and atom-number analysis"};
  app.require_subcommand(1);

  CommonOpts model_opts, sim_opts, ana_opts, fit_opts;

  CLI::App* model = app.add_subcommand("model", "steady-state plateau tables");
  add_common(model, model_opts);

  CLI::App* simulate = app.add_subcommand("simulate", "generate detected traces");
  add_common(simulate, sim_opts);
  int traces_override = 0;
  simulate->add_option("--traces", traces_override, "number of traces");
  bool dump = true;
  bool dump_set = false;
  simulate->add_flag("--dump-trajectories,!--no-dump-trajectories", dump,
                     "write per-trace ground-truth CSVs (default on)")
      ->each([&](const std::string&) { dump_set = true; });

  CLI::App* analyze = app.add_subcommand("analyze", "histograms, bands, curves");
  add_common(analyze, ana_opts);
  std::vector<std::string> trace_files;
  analyze->add_option("traces", trace_files, "trace CSV files")->required();
  std::string boundaries_arg;
  analyze->add_option("--boundaries", boundaries_arg,
                      "comma-separated band boundaries, highest first");

  CLI::App* fit = app.add_subcommand("fit", "decay-rate fit from curves");
  add_common(fit, fit_opts);
  std::string curves_file;
  fit->add_option("curves", curves_file, "curves CSV from analyze")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (model->parsed()) {
      atomcount::RunConfig cfg = load_config(model_opts);
      atomcount::ModelSummary sum = atomcount::run_model(cfg);
      for (const auto& f : sum.table_files) std::printf("wrote %s\n", f.c_str());
    } else if (simulate->parsed()) {
      atomcount::RunConfig cfg = load_config(sim_opts);
      if (traces_override > 0) cfg.sim.n_traces = traces_override;
      if (dump_set) cfg.sim.dump_trajectories = dump;
      atomcount::SimulateSummary sum = atomcount::run_simulate(cfg);
      std::printf("wrote %zu traces and %s\n", sum.trace_files.size(),
                  sum.manifest_file.c_str());
    } else if (analyze->parsed()) {
      atomcount::RunConfig cfg = load_config(ana_opts);
      std::optional<std::vector<double>> manual;
      if (!boundaries_arg.empty())
        manual = atomcount::parse_double_list(boundaries_arg);
      atomcount::AnalyzeSummary sum =
          atomcount::run_analyze(cfg, trace_files, manual);
      std::printf("wrote %s %s %s %s\n", sum.hist_file.c_str(),
                  sum.hist2d_file.c_str(), sum.bands_file.c_str(),
                  sum.curves_file.c_str());
    } else if (fit->parsed()) {
      atomcount::RunConfig cfg = load_config(fit_opts);
      atomcount::FitSummary sum = atomcount::run_fit(cfg, curves_file);
      std::printf("Gamma_hat = %s  mu_hat = %s  (%s)\n",
                  atomcount::format_sig9(sum.result.Gamma_hat).c_str(),
                  atomcount::format_sig9(sum.result.mu_hat).c_str(),
                  sum.fit_file.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
