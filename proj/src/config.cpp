#include "atomcount/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "atomcount/trace_io.hpp"

namespace atomcount {

void RunConfig::validate() const {
  cavity.validate();
  rates.validate();
  init.validate();
  detection.validate();
  if (!(sim.t_end > sim.t_start))
    throw std::invalid_argument("config: sim.t_end must exceed sim.t_start");
  if (sim.n_traces < 1)
    throw std::invalid_argument("config: sim.n_traces must be >= 1");
  if (analysis.bins < 10)
    throw std::invalid_argument("config: analysis.bins must be >= 10");
  if (!(analysis.amp_max > analysis.amp_min))
    throw std::invalid_argument("config: analysis.amp_max must exceed amp_min");
  if (!(analysis.time_bin > 0.0))
    throw std::invalid_argument("config: analysis.time_bin must be positive");
  if (analysis.n_resolved < 0)
    throw std::invalid_argument("config: analysis.n_resolved must be >= 0");
  if (!(analysis.min_prominence > 0.0) || !(analysis.min_prominence <= 1.0))
    throw std::invalid_argument("config: analysis.min_prominence in (0, 1]");
  if (model.n_max < 0)
    throw std::invalid_argument("config: model.n_max must be >= 0");
  if (model.y_list.empty())
    throw std::invalid_argument("config: model.y_list must not be empty");
  for (double y : model.y_list)
    if (!(y > 0.0))
      throw std::invalid_argument("config: model.y_list entries must be positive");
  if (fit.n_max < 1)
    throw std::invalid_argument("config: fit.n_max must be >= 1");
  if (!(fit.bracket_hi > fit.bracket_lo) || !(fit.bracket_lo > 0.0))
    throw std::invalid_argument("config: need 0 < fit.bracket_lo < fit.bracket_hi");
  if (run.out_dir.empty())
    throw std::invalid_argument("config: run.out_dir must not be empty");
}

double RunConfig::i1_over_i0_effective() const {
  if (rates.i1_over_i0 > 0.0) return rates.i1_over_i0;
  return 1.0 / suppression_factor(cavity);
}

double RunConfig::amplitude_scale_effective() const {
  if (detection.amplitude_scale > 0.0) return detection.amplitude_scale;
  return std::sqrt(cavity.nbar_empty);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || errno == ERANGE)
      throw std::invalid_argument("malformed number '" + tok + "' in list");
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != '\0')
      throw std::invalid_argument("trailing garbage in list entry '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& val) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(val.c_str(), &end);
  if (end == val.c_str() || errno == ERANGE || *end != '\0')
    throw std::invalid_argument("config: bad value for " + key + ": '" + val + "'");
  return v;
}

int to_int(const std::string& key, const std::string& val) {
  errno = 0;
  char* end = nullptr;
  long v = std::strtol(val.c_str(), &end, 10);
  if (end == val.c_str() || errno == ERANGE || *end != '\0')
    throw std::invalid_argument("config: bad value for " + key + ": '" + val + "'");
  return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& val) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(val.c_str(), &end, 10);
  if (end == val.c_str() || errno == ERANGE || *end != '\0')
    throw std::invalid_argument("config: bad value for " + key + ": '" + val + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& val) {
  if (val == "true" || val == "1") return true;
  if (val == "false" || val == "0") return false;
  throw std::invalid_argument("config: bad value for " + key + ": '" + val + "'");
}

void apply_key(RunConfig& c, const std::string& key, const std::string& val) {
  if (key == "cavity.g0") c.cavity.g0 = to_double(key, val);
  else if (key == "cavity.kappa") c.cavity.kappa = to_double(key, val);
  else if (key == "cavity.gamma") c.cavity.gamma = to_double(key, val);
  else if (key == "cavity.delta_c") c.cavity.delta_c = to_double(key, val);
  else if (key == "cavity.delta_4") c.cavity.delta_4 = to_double(key, val);
  else if (key == "cavity.nbar_empty") c.cavity.nbar_empty = to_double(key, val);
  else if (key == "cavity.w0") c.cavity.w0 = to_double(key, val);
  else if (key == "cavity.lambda0") c.cavity.lambda0 = to_double(key, val);
  else if (key == "rates.gamma_10") c.rates.gamma_10 = to_double(key, val);
  else if (key == "rates.y") c.rates.y = to_double(key, val);
  else if (key == "rates.Gamma_loss") c.rates.Gamma_loss = to_double(key, val);
  else if (key == "rates.i1_over_i0") c.rates.i1_over_i0 = to_double(key, val);
  else if (key == "init.kind") {
    if (val == "fixed") c.init.kind = InitialDistribution::Kind::fixed;
    else if (val == "poisson") c.init.kind = InitialDistribution::Kind::poisson;
    else if (val == "explicit") c.init.kind = InitialDistribution::Kind::explicit_pmf;
    else throw std::invalid_argument("config: init.kind must be fixed|poisson|explicit");
  } else if (key == "init.fixed_n") c.init.fixed_n = to_int(key, val);
  else if (key == "init.mu") c.init.mu = to_double(key, val);
  else if (key == "init.n_max") c.init.n_max = to_int(key, val);
  else if (key == "init.probs") c.init.pmf = parse_double_list(val);
  else if (key == "detection.sample_rate") c.detection.sample_rate = to_double(key, val);
  else if (key == "detection.detector_bandwidth") c.detection.detector_bandwidth = to_double(key, val);
  else if (key == "detection.digital_bandwidth") c.detection.digital_bandwidth = to_double(key, val);
  else if (key == "detection.noise_rms") c.detection.noise_rms = to_double(key, val);
  else if (key == "detection.amplitude_scale") c.detection.amplitude_scale = to_double(key, val);
  else if (key == "sim.t_start") c.sim.t_start = to_double(key, val);
  else if (key == "sim.t_end") c.sim.t_end = to_double(key, val);
  else if (key == "sim.n_traces") c.sim.n_traces = to_int(key, val);
  else if (key == "sim.dump_trajectories") c.sim.dump_trajectories = to_bool(key, val);
  else if (key == "analysis.bins") c.analysis.bins = to_int(key, val);
  else if (key == "analysis.amp_min") c.analysis.amp_min = to_double(key, val);
  else if (key == "analysis.amp_max") c.analysis.amp_max = to_double(key, val);
  else if (key == "analysis.time_bin") c.analysis.time_bin = to_double(key, val);
  else if (key == "analysis.t0") c.analysis.t0 = to_double(key, val);
  else if (key == "analysis.n_resolved") c.analysis.n_resolved = to_int(key, val);
  else if (key == "analysis.min_prominence") c.analysis.min_prominence = to_double(key, val);
  else if (key == "model.n_max") c.model.n_max = to_int(key, val);
  else if (key == "model.y_list") c.model.y_list = parse_double_list(val);
  else if (key == "fit.n_max") c.fit.n_max = to_int(key, val);
  else if (key == "fit.bracket_lo") c.fit.bracket_lo = to_double(key, val);
  else if (key == "fit.bracket_hi") c.fit.bracket_hi = to_double(key, val);
  else if (key == "run.seed") c.run.seed = to_u64(key, val);
  else if (key == "run.out_dir") c.run.out_dir = val;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  long lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": empty key");
    try {
      apply_key(cfg, key, val);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

namespace {

std::string join_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_sig17(v[i]);
  }
  return s;
}

}  // namespace

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  auto d = [&](const char* k, double v) { o << k << " = " << format_sig17(v) << "\n"; };
  auto i = [&](const char* k, long long v) { o << k << " = " << v << "\n"; };

  d("cavity.g0", c.cavity.g0);
  d("cavity.kappa", c.cavity.kappa);
  d("cavity.gamma", c.cavity.gamma);
  d("cavity.delta_c", c.cavity.delta_c);
  d("cavity.delta_4", c.cavity.delta_4);
  d("cavity.nbar_empty", c.cavity.nbar_empty);
  d("cavity.w0", c.cavity.w0);
  d("cavity.lambda0", c.cavity.lambda0);
  d("rates.gamma_10", c.rates.gamma_10);
  d("rates.y", c.rates.y);
  d("rates.Gamma_loss", c.rates.Gamma_loss);
  d("rates.i1_over_i0", c.rates.i1_over_i0);
  const char* kind = "poisson";
  if (c.init.kind == InitialDistribution::Kind::fixed) kind = "fixed";
  if (c.init.kind == InitialDistribution::Kind::explicit_pmf) kind = "explicit";
  o << "init.kind = " << kind << "\n";
  i("init.fixed_n", c.init.fixed_n);
  d("init.mu", c.init.mu);
  i("init.n_max", c.init.n_max);
  if (!c.init.pmf.empty()) o << "init.probs = " << join_list(c.init.pmf) << "\n";
  d("detection.sample_rate", c.detection.sample_rate);
  d("detection.detector_bandwidth", c.detection.detector_bandwidth);
  d("detection.digital_bandwidth", c.detection.digital_bandwidth);
  d("detection.noise_rms", c.detection.noise_rms);
  d("detection.amplitude_scale", c.detection.amplitude_scale);
  d("sim.t_start", c.sim.t_start);
  d("sim.t_end", c.sim.t_end);
  i("sim.n_traces", c.sim.n_traces);
  o << "sim.dump_trajectories = " << (c.sim.dump_trajectories ? "true" : "false") << "\n";
  i("analysis.bins", c.analysis.bins);
  d("analysis.amp_min", c.analysis.amp_min);
  d("analysis.amp_max", c.analysis.amp_max);
  d("analysis.time_bin", c.analysis.time_bin);
  d("analysis.t0", c.analysis.t0);
  i("analysis.n_resolved", c.analysis.n_resolved);
  d("analysis.min_prominence", c.analysis.min_prominence);
  i("model.n_max", c.model.n_max);
  o << "model.y_list = " << join_list(c.model.y_list) << "\n";
  i("fit.n_max", c.fit.n_max);
  d("fit.bracket_lo", c.fit.bracket_lo);
  d("fit.bracket_hi", c.fit.bracket_hi);
  o << "run.seed = " << c.run.seed << "\n";
  o << "run.out_dir = " << c.run.out_dir << "\n";
  return o.str();
}

}  // namespace atomcount
