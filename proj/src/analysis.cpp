#include "atomcount/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "atomcount/trace_io.hpp"

namespace atomcount {

std::int64_t Histogram1D::total() const {
  std::int64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

Histogram1D Histogram2D::amplitude_marginal() const {
  Histogram1D h;
  h.edges = amp_edges;
  h.counts.assign(amp_edges.size() - 1, 0);
  for (const auto& row : counts)
    for (std::size_t a = 0; a < row.size(); ++a) h.counts[a] += row[a];
  return h;
}

void BandSet::validate() const {
  if (boundaries.size() != static_cast<std::size_t>(n_resolved) + 1)
    throw std::invalid_argument("BandSet: need n_resolved + 1 boundaries");
  for (double b : boundaries)
    if (!std::isfinite(b))
      throw std::invalid_argument("BandSet: boundaries must be finite");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (!(boundaries[i] < boundaries[i - 1]))
      throw std::invalid_argument("BandSet: boundaries must be strictly decreasing");
  for (const auto& p : peaks) {
    if (p.label < 0 || static_cast<std::size_t>(p.label) >= boundaries.size() + 1)
      throw std::invalid_argument("BandSet: peak label out of range");
    std::size_t n = static_cast<std::size_t>(p.label);
    if (n < boundaries.size() && !(p.amplitude > boundaries[n]))
      throw std::invalid_argument("BandSet: peak below its band");
    if (n > 0 && !(p.amplitude < boundaries[n - 1]))
      throw std::invalid_argument("BandSet: peak above its band");
  }
}

namespace {

std::vector<double> uniform_edges(double lo, double hi, int bins) {
  std::vector<double> e(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i)
    e[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / bins;
  return e;
}

// clamped uniform-bin index; shared by the 1D and 2D histograms so the
// 2D amplitude marginal matches the 1D histogram exactly
int bin_index(double x, double lo, double hi, int bins) {
  int i = static_cast<int>(std::floor((x - lo) / (hi - lo) * bins));
  if (i < 0) i = 0;
  if (i >= bins) i = bins - 1;
  return i;
}

void check_window(std::pair<double, double> w, const char* who) {
  if (!(w.second > w.first) || !std::isfinite(w.first) || !std::isfinite(w.second))
    throw std::invalid_argument(std::string(who) + ": invalid time window");
}

void check_range(std::pair<double, double> r, const char* who) {
  if (!(r.second > r.first) || !std::isfinite(r.first) || !std::isfinite(r.second))
    throw std::invalid_argument(std::string(who) + ": invalid amplitude range");
}

}  // namespace

Histogram1D histogram_amplitudes(const std::vector<Trace>& traces,
                                 std::pair<double, double> t_window, int bins,
                                 std::pair<double, double> amp_range) {
  if (traces.empty())
    throw std::invalid_argument("histogram_amplitudes: no traces");
  if (bins < 10)
    throw std::invalid_argument("histogram_amplitudes: need bins >= 10");
  check_window(t_window, "histogram_amplitudes");
  check_range(amp_range, "histogram_amplitudes");

  Histogram1D h;
  h.edges = uniform_edges(amp_range.first, amp_range.second, bins);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& tr : traces) {
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
      double t = tr.time_of(i);
      if (t < t_window.first || t >= t_window.second) continue;
      ++h.counts[static_cast<std::size_t>(bin_index(
          tr.samples[i], amp_range.first, amp_range.second, bins))];
    }
  }
  return h;
}

Histogram2D histogram_2d(const std::vector<Trace>& traces,
                         std::pair<double, double> t_window, int time_bins,
                         int amp_bins, std::pair<double, double> amp_range) {
  if (traces.empty()) throw std::invalid_argument("histogram_2d: no traces");
  if (time_bins < 1 || amp_bins < 10)
    throw std::invalid_argument("histogram_2d: need time_bins >= 1, amp_bins >= 10");
  check_window(t_window, "histogram_2d");
  check_range(amp_range, "histogram_2d");

  Histogram2D h;
  h.time_edges = uniform_edges(t_window.first, t_window.second, time_bins);
  h.amp_edges = uniform_edges(amp_range.first, amp_range.second, amp_bins);
  h.counts.assign(static_cast<std::size_t>(time_bins),
                  std::vector<std::int64_t>(static_cast<std::size_t>(amp_bins), 0));
  for (const auto& tr : traces) {
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
      double t = tr.time_of(i);
      if (t < t_window.first || t >= t_window.second) continue;
      int ti = bin_index(t, t_window.first, t_window.second, time_bins);
      int ai = bin_index(tr.samples[i], amp_range.first, amp_range.second,
                         amp_bins);
      ++h.counts[static_cast<std::size_t>(ti)][static_cast<std::size_t>(ai)];
    }
  }
  return h;
}

namespace {

struct PeakRun {
  std::size_t rep;       // representative bin (middle of a plateau run)
  std::int64_t height;
  double prominence;
};

// local maxima with plateau handling, prominence against the higher
// neighbors on each side
std::vector<PeakRun> local_peaks(const std::vector<std::int64_t>& c) {
  std::vector<PeakRun> peaks;
  const std::size_t n = c.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && c[j + 1] == c[i]) ++j;
    bool left_ok = (i == 0) || (c[i - 1] < c[i]);
    bool right_ok = (j + 1 == n) || (c[j + 1] < c[i]);
    if (left_ok && right_ok && c[i] > 0) {
      std::size_t rep = (i + j) / 2;
      // walk to the first strictly higher bin on each side, tracking the
      // minimum along the way; prominence = height - best escape saddle
      std::int64_t min_l = c[i], min_r = c[i];
      bool higher_l = false, higher_r = false;
      for (std::size_t p = i; p-- > 0;) {
        if (c[p] > c[i]) { higher_l = true; break; }
        min_l = std::min(min_l, c[p]);
      }
      for (std::size_t p = j + 1; p < n; ++p) {
        if (c[p] > c[i]) { higher_r = true; break; }
        min_r = std::min(min_r, c[p]);
      }
      double prom;
      if (!higher_l && !higher_r)
        prom = static_cast<double>(c[i]);  // global maximum
      else if (higher_l && higher_r)
        prom = static_cast<double>(c[i] - std::max(min_l, min_r));
      else if (higher_l)
        prom = static_cast<double>(c[i] - min_l);
      else
        prom = static_cast<double>(c[i] - min_r);
      peaks.push_back({rep, c[i], prom});
    }
    i = j + 1;
  }
  return peaks;
}

// valley between two bins: center of the minimum-count bin strictly between
// them, midpoint of the tied span on ties, bin edge if they are adjacent
double valley_between(const Histogram1D& h, std::size_t lo, std::size_t hi) {
  if (hi <= lo + 1) return h.edges[hi];
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = lo + 1; i < hi; ++i) best = std::min(best, h.counts[i]);
  std::size_t first = 0, last = 0;
  bool found = false;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    if (h.counts[i] == best) {
      if (!found) first = i;
      last = i;
      found = true;
    }
  }
  return 0.5 * (h.bin_center(first) + h.bin_center(last));
}

}  // namespace

BandSet find_bands(const Histogram1D& hist, double min_prominence,
                   int n_resolved) {
  if (hist.counts.empty() || hist.edges.size() != hist.counts.size() + 1)
    throw std::invalid_argument("find_bands: malformed histogram");
  if (n_resolved < 0)
    throw std::invalid_argument("find_bands: n_resolved must be >= 0");
  if (!(min_prominence > 0.0) || !(min_prominence <= 1.0))
    throw std::invalid_argument("find_bands: min_prominence must be in (0, 1]");

  std::int64_t max_count = *std::max_element(hist.counts.begin(), hist.counts.end());
  if (max_count <= 0) throw std::invalid_argument("find_bands: empty histogram");
  double threshold = min_prominence * static_cast<double>(max_count);

  std::vector<PeakRun> all = local_peaks(hist.counts);
  std::vector<PeakRun> qualified;
  for (const auto& p : all)
    if (p.prominence > threshold) qualified.push_back(p);

  std::size_t need = static_cast<std::size_t>(n_resolved) + 1;
  if (qualified.size() < need)
    throw std::runtime_error(
        "find_bands: only " + std::to_string(qualified.size()) +
        " peaks exceed the prominence threshold, need " + std::to_string(need) +
        "; lower n_resolved, lower min_prominence, or supply boundaries");

  // highest amplitudes first: N = 0 is the empty-trap plateau near 1
  std::sort(qualified.begin(), qualified.end(),
            [](const PeakRun& a, const PeakRun& b) { return a.rep > b.rep; });

  BandSet bs;
  bs.n_resolved = n_resolved;
  for (std::size_t i = 0; i < need; ++i)
    bs.peaks.push_back({hist.bin_center(qualified[i].rep), static_cast<int>(i)});

  for (std::size_t i = 0; i + 1 < need; ++i)
    bs.boundaries.push_back(
        valley_between(hist, qualified[i + 1].rep, qualified[i].rep));

  const std::size_t low_idx = qualified[need - 1].rep;
  const PeakRun* below = nullptr;
  for (std::size_t i = need; i < qualified.size(); ++i)
    if (qualified[i].rep < low_idx && (!below || qualified[i].rep > below->rep))
      below = &qualified[i];
  if (below)
    bs.boundaries.push_back(valley_between(hist, below->rep, low_idx));
  else
    bs.boundaries.push_back(0.5 * hist.bin_center(low_idx));

  bs.validate();
  return bs;
}

BandSet band_set_from_boundaries(const std::vector<double>& boundaries) {
  if (boundaries.empty())
    throw std::invalid_argument("band_set_from_boundaries: no boundaries");
  BandSet bs;
  bs.boundaries = boundaries;
  bs.n_resolved = static_cast<int>(boundaries.size()) - 1;
  bs.validate();
  return bs;
}

int band_label(const BandSet& bands, double amplitude) {
  if (!std::isfinite(amplitude))
    throw std::invalid_argument("band_label: amplitude must be finite");
  for (std::size_t i = 0; i < bands.boundaries.size(); ++i)
    if (amplitude >= bands.boundaries[i]) return static_cast<int>(i);
  return static_cast<int>(bands.boundaries.size());  // aggregate
}

PopulationCurves population_curves(const std::vector<Trace>& traces,
                                   const BandSet& bands, double t0,
                                   double time_bin_width) {
  if (traces.empty())
    throw std::invalid_argument("population_curves: no traces");
  if (!(time_bin_width > 0.0))
    throw std::invalid_argument("population_curves: bin width must be positive");
  bands.validate();

  double end = std::numeric_limits<double>::infinity();
  for (const auto& tr : traces) {
    if (t0 < tr.t0 - 0.5 * tr.dt)
      throw std::invalid_argument("population_curves: t0 before trace start");
    end = std::min(end, tr.t_end());
  }
  auto n_bins = static_cast<std::size_t>(
      std::floor((end - t0) / time_bin_width * (1.0 + 1e-12)));
  if (n_bins == 0)
    throw std::invalid_argument("population_curves: window shorter than one bin");

  PopulationCurves pc;
  pc.t0 = t0;
  pc.n_resolved = bands.n_resolved;
  pc.time.resize(n_bins);
  for (std::size_t j = 0; j < n_bins; ++j)
    pc.time[j] = t0 + (static_cast<double>(j) + 0.5) * time_bin_width;
  const std::size_t n_bands = bands.boundaries.size() + 1;
  pc.phi.assign(n_bands, std::vector<double>(n_bins, 0.0));

  for (const auto& tr : traces) {
    for (std::size_t j = 0; j < n_bins; ++j) {
      auto idx = static_cast<long long>(std::llround((pc.time[j] - tr.t0) / tr.dt));
      if (idx < 0) idx = 0;
      if (idx >= static_cast<long long>(tr.samples.size()))
        idx = static_cast<long long>(tr.samples.size()) - 1;
      int b = band_label(bands, tr.samples[static_cast<std::size_t>(idx)]);
      pc.phi[static_cast<std::size_t>(b)][j] += 1.0;
    }
  }
  double inv = 1.0 / static_cast<double>(traces.size());
  for (auto& row : pc.phi)
    for (double& v : row) v *= inv;
  return pc;
}

void write_histogram_csv(const std::string& path, const Histogram1D& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << format_sig9(h.edges[i]) << ',' << format_sig9(h.edges[i + 1]) << ','
        << h.counts[i] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_histogram2d_csv(const std::string& path, const Histogram2D& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t_low,t_high,amp_low,amp_high,count\n";
  for (std::size_t t = 0; t + 1 < h.time_edges.size(); ++t)
    for (std::size_t a = 0; a + 1 < h.amp_edges.size(); ++a)
      out << format_sig9(h.time_edges[t]) << ',' << format_sig9(h.time_edges[t + 1])
          << ',' << format_sig9(h.amp_edges[a]) << ','
          << format_sig9(h.amp_edges[a + 1]) << ',' << h.counts[t][a] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_bands_csv(const std::string& path, const BandSet& b) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "kind,label,amplitude\n";
  for (const auto& p : b.peaks)
    out << "peak," << p.label << ',' << format_sig9(p.amplitude) << '\n';
  for (std::size_t i = 0; i < b.boundaries.size(); ++i)
    out << "boundary," << i << ',' << format_sig9(b.boundaries[i]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_curves_csv(const std::string& path, const PopulationCurves& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << 't';
  for (int b = 0; b <= c.n_resolved; ++b) out << ",phi" << b;
  out << ",phi_ge" << (c.n_resolved + 1) << '\n';
  for (std::size_t j = 0; j < c.time.size(); ++j) {
    out << format_sig9(c.time[j]);
    for (const auto& row : c.phi) out << ',' << format_sig9(row[j]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

PopulationCurves read_curves_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty curves file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  if (cols.size() < 3 || cols[0] != "t")
    throw std::runtime_error(path + ":1: expected header t,phi0,...");

  PopulationCurves pc;
  pc.n_resolved = static_cast<int>(cols.size()) - 3;
  pc.phi.assign(cols.size() - 1, {});
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::size_t col = 0;
    while (std::getline(ss, tok, ',')) {
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str())
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": malformed number '" + tok + "'");
      if (col == 0)
        pc.time.push_back(v);
      else if (col <= pc.phi.size())
        pc.phi[col - 1].push_back(v);
      ++col;
    }
    if (col != cols.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(cols.size()) +
                               " columns");
  }
  if (pc.time.empty()) throw std::runtime_error(path + ": no data rows");
  pc.t0 = pc.time.front();
  return pc;
}

}  // namespace atomcount
