#pragma once

#include <cstdint>
#include <vector>

#include "basinlab/levels.hpp"

namespace basinlab {

struct MetricConfig {
  LevelConfig level;
  int angles = 256;
  int heights = 128;
  /// Number of Dijkstra sources used for the distortion term.
  int pairs = 16;
  std::uint64_t seed = 1;
  /// Accept threshold; reports in [eps_accept, 10 eps_accept) are inconclusive.
  double eps_accept = 1e-4;
};

struct SingularHeight {
  double height = 0.0;
  /// Grid angles whose rays end on a zero of omega at this height.
  std::vector<double> angles;
};

/// The band {t <= G <= T} sampled on an (angle x height) grid. Node (k, i)
/// sits on the ray of angle offset + 2 pi i / N at height rows[k]; it is
/// missing when that ray ends on a zero of omega above rows[k].
struct TruncatedBasin {
  double t = 0.0;
  double T = 0.0;
  double angle_offset = 0.0;
  int n_angles = 0;
  std::vector<double> rows;
  std::vector<cplx> points;
  std::vector<cplx> omegas;
  std::vector<std::uint8_t> present;
  /// present node (k, i) is joined to (k, i + 1) along its leaf.
  std::vector<std::uint8_t> leaf_link;
  /// Lowest height reached by each column's ray (t when unobstructed).
  std::vector<double> stop_height;
  /// Points at (angle of column i, d * rows[k]) for d * rows[k] <= T, used to
  /// test equivariance; indexed like points.
  std::vector<cplx> lifted;
  std::vector<std::uint8_t> lifted_present;
  std::vector<SingularHeight> singular_heights;
  /// Heights in the band of zeros of omega (critical points and preimages).
  std::vector<double> zero_heights;
  std::vector<double> critical_heights_sorted;
  double max_height_error = 0.0;

  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * n_angles + col; }
};

/// Rows from t to T, shifted by half a cell when a zero of omega of any of the
/// given basins falls within 1e-9 of a row.
std::vector<double> band_rows(const std::vector<const Basin*>& basins, double t, double T, int count);

TruncatedBasin truncate(const Basin& basin, double t, double T, const MetricConfig& cfg = {});
TruncatedBasin truncate(const Basin& basin, const std::vector<double>& rows, double T, double angle_offset,
                        const MetricConfig& cfg = {});

enum class Verdict { Accept, Inconclusive, Reject };
const char* to_string(Verdict v);

struct CorrespondencePair {
  cplx in_f;
  cplx in_g;
  double distortion;
};

struct ConjugacyReport {
  double epsilon = 0.0;
  int rotation_index = 0;
  double coverage = 0.0;
  double distortion = 0.0;
  double defect = 0.0;
  std::vector<CorrespondencePair> samples;
  Verdict verdict = Verdict::Accept;
};

/// Tests whether the relation pairing equal (angle, height) coordinates,
/// after each of the d-1 fixed-ray rotations, is an epsilon-conjugacy between
/// the bands [t, T] of f and g. Never throws on numerical trouble.
ConjugacyReport eps_conjugacy(const Basin& f, const Basin& g, double t, double T, const MetricConfig& cfg = {});

/// max of eps_conjugacy in both directions on [t, 1/t].
double gh_distance_estimate(const Basin& f, const Basin& g, double t, const MetricConfig& cfg = {});

}  // namespace basinlab
