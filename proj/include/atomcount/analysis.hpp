#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "atomcount/detection.hpp"

namespace atomcount {

struct Histogram1D {
  std::vector<double> edges;          // size = counts.size() + 1, increasing
  std::vector<std::int64_t> counts;

  double bin_center(std::size_t i) const {
    return 0.5 * (edges[i] + edges[i + 1]);
  }
  std::int64_t total() const;
};

struct Histogram2D {
  std::vector<double> time_edges;
  std::vector<double> amp_edges;
  std::vector<std::vector<std::int64_t>> counts;  // [time_bin][amp_bin]

  Histogram1D amplitude_marginal() const;
};

// Amplitude bands labeling trapped-atom number. boundaries[i] separates band
// N = i from N = i + 1; amplitudes below boundaries.back() belong to the
// aggregate band N >= n_resolved + 1.
struct BandSet {
  struct Peak {
    double amplitude;
    int label;  // N
  };
  std::vector<Peak> peaks;         // may be empty for user-supplied boundaries
  std::vector<double> boundaries;  // strictly decreasing, size n_resolved + 1
  int n_resolved = 0;

  void validate() const;
};

// Per-band trace fractions on a uniform time grid. phi[b][j] is the fraction
// of traces in band b at time[j]; b runs over N = 0..n_resolved and the
// final row is the aggregate N >= n_resolved + 1.
struct PopulationCurves {
  double t0 = 0.0;
  int n_resolved = 0;
  std::vector<double> time;                 // bin centers
  std::vector<std::vector<double>> phi;     // [band][time index]
};

// Pools every sample with t in [t_window.first, t_window.second) from all
// traces into `bins` equal-width amplitude bins on amp_range. Samples outside
// the amplitude range are clamped into the end bins, so the total count
// equals the number of pooled samples.
Histogram1D histogram_amplitudes(const std::vector<Trace>& traces,
                                 std::pair<double, double> t_window, int bins,
                                 std::pair<double, double> amp_range = {0.0,
                                                                        1.2});

// Same pooling on a (time, amplitude) grid. The amplitude marginal equals
// histogram_amplitudes on the same window and edges, count for count.
Histogram2D histogram_2d(const std::vector<Trace>& traces,
                         std::pair<double, double> t_window, int time_bins,
                         int amp_bins,
                         std::pair<double, double> amp_range = {0.0, 1.2});

// Peak detection by topographic prominence. Keeps the n_resolved + 1
// highest-amplitude peaks whose prominence exceeds min_prominence times the
// maximum count, labels them N = 0, 1, ... downward, and places boundaries
// at the minimum-count bin between adjacent peaks (ties resolved by the
// midpoint of the tied bins). The aggregate boundary goes at the valley
// between the lowest kept peak and the nearest qualifying peak below it, or
// at half the lowest peak's amplitude when nothing lies below.
BandSet find_bands(const Histogram1D& hist, double min_prominence,
                   int n_resolved);

// User-supplied boundaries, passed through unchanged (no peaks attached).
BandSet band_set_from_boundaries(const std::vector<double>& boundaries);

// Band index for an amplitude: 0..n_resolved, or n_resolved + 1 (aggregate).
int band_label(const BandSet& bands, double amplitude);

// Each trace votes for exactly one band per time bin, using its sample
// nearest the bin center; bins are [t0 + j w, t0 + (j+1) w) with centers at
// t0 + (j + 1/2) w. Rows therefore sum to exactly 1 at every grid point.
PopulationCurves population_curves(const std::vector<Trace>& traces,
                                   const BandSet& bands, double t0,
                                   double time_bin_width);

void write_histogram_csv(const std::string& path, const Histogram1D& h);
void write_histogram2d_csv(const std::string& path, const Histogram2D& h);
void write_bands_csv(const std::string& path, const BandSet& b);
void write_curves_csv(const std::string& path, const PopulationCurves& c);
PopulationCurves read_curves_csv(const std::string& path);

}  // namespace atomcount
