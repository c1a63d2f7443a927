#include "basinlab/basin_metric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <random>

namespace basinlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool hits_row(const std::vector<const Basin*>& basins, const std::vector<double>& rows) {
  for (const Basin* b : basins)
    for (double h : rows)
      if (!b->zero_heights(h - 1e-9, h + 1e-9).empty()) return true;
  return false;
}

// Locates every grid node by descending one ray per column.
void sample_columns(const Basin& basin, TruncatedBasin& tb, const MetricConfig& cfg) {
  const int n = tb.n_angles;
  const int rows = static_cast<int>(tb.rows.size());
  const double d = basin.degree();
  tb.points.assign(tb.rows.size() * n, 0.0);
  tb.omegas.assign(tb.rows.size() * n, 0.0);
  tb.present.assign(tb.rows.size() * n, 0);
  tb.lifted.assign(tb.rows.size() * n, 0.0);
  tb.lifted_present.assign(tb.rows.size() * n, 0);
  tb.stop_height.assign(n, tb.t);

  // (height, row, lifted?) in descending height.
  struct Stop {
    double h;
    int row;
    bool lifted;
  };
  std::vector<Stop> stops;
  for (int k = 0; k < rows; ++k) {
    stops.push_back({tb.rows[k], k, false});
    if (d * tb.rows[k] <= tb.T + 1e-12) stops.push_back({d * tb.rows[k], k, true});
  }
  std::sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.h > b.h; });

  for (int i = 0; i < n; ++i) {
    const double theta = tb.angle_offset + kTwoPi * i / n;
    RayWalker walker(basin, theta, cfg.level.ray, tb.T);
    for (const Stop& s : stops) {
      RayStatus st = RayStatus::ReachedTargetHeight;
      try {
        if (s.h < walker.height()) st = walker.descend_to(s.h);
      } catch (const Error&) {
        st = RayStatus::StepLimit;
      }
      if (st != RayStatus::ReachedTargetHeight) {
        tb.stop_height[i] = st == RayStatus::HitSingularity ? walker.singularity_height() : walker.height();
        break;
      }
      const std::size_t idx = tb.index(s.row, i);
      if (s.lifted) {
        tb.lifted[idx] = walker.point();
        tb.lifted_present[idx] = 1;
      } else {
        const BasinSample smp = basin.sample(walker.point());
        tb.points[idx] = walker.point();
        tb.omegas[idx] = smp.omega;
        tb.present[idx] = 1;
        tb.max_height_error = std::max(tb.max_height_error, std::abs(smp.green - s.h));
      }
    }
  }
}

void link_leaves(const Basin& basin, TruncatedBasin& tb, const MetricConfig& cfg) {
  const int n = tb.n_angles;
  const double step = kTwoPi / n;
  tb.leaf_link.assign(tb.points.size(), 0);
  for (std::size_t k = 0; k < tb.rows.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      const std::size_t a = tb.index(static_cast<int>(k), i);
      const std::size_t b = tb.index(static_cast<int>(k), (i + 1) % n);
      if (!tb.present[a] || !tb.present[b]) continue;
      const auto landed = follow_leaf(basin, tb.points[a], tb.rows[k], step, cfg.level);
      if (landed && std::abs(*landed - tb.points[b]) <= 1e-7 * std::max(1.0, std::abs(tb.points[b])))
        tb.leaf_link[a] = 1;
    }
  }
}

void record_singular_data(const Basin& basin, TruncatedBasin& tb) {
  const double d = basin.degree();
  // Heights of zeros of omega and of their forward images.
  std::vector<double> hs;
  for (std::size_t j = 0; j < basin.critical().heights.size(); ++j) {
    if (!basin.critical().escaped[j]) continue;
    for (double h = basin.critical().heights[j]; h <= tb.T + 1e-9; h *= d) hs.push_back(h);
  }
  tb.zero_heights = basin.zero_heights(tb.t - 1e-9, tb.T + 1e-9);
  for (double h : tb.zero_heights) hs.push_back(h);
  std::sort(hs.begin(), hs.end());
  for (double h : hs) {
    if (h < tb.t - 1e-9 || h > tb.T + 1e-9) continue;
    if (!tb.singular_heights.empty() && std::abs(tb.singular_heights.back().height - h) <= 1e-9) continue;
    SingularHeight sh;
    sh.height = h;
    for (int i = 0; i < tb.n_angles; ++i)
      if (std::abs(tb.stop_height[i] - h) <= 1e-6) sh.angles.push_back(wrap_angle(tb.angle_offset + kTwoPi * i / tb.n_angles));
    tb.singular_heights.push_back(std::move(sh));
  }
  for (std::size_t j = 0; j < basin.critical().heights.size(); ++j) {
    const double h = basin.critical().heights[j];
    if (basin.critical().escaped[j] && h >= tb.t - 1e-9 && h <= tb.T + 1e-9) tb.critical_heights_sorted.push_back(h);
  }
  std::sort(tb.critical_heights_sorted.begin(), tb.critical_heights_sorted.end());
}

// Single-source shortest paths on the grid graph: rays (weight = height
// difference) and leaf links (weight = angle step).
std::vector<double> grid_distances(const TruncatedBasin& tb, std::size_t source) {
  const int n = tb.n_angles;
  const int rows = static_cast<int>(tb.rows.size());
  const double step = kTwoPi / n;
  std::vector<double> dist(tb.points.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  auto relax = [&](std::size_t to, double w, double base) {
    if (base + w < dist[to]) {
      dist[to] = base + w;
      queue.push({dist[to], to});
    }
  };
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (du > dist[u]) continue;
    const int k = static_cast<int>(u / n);
    const int i = static_cast<int>(u % n);
    if (k + 1 < rows && tb.present[tb.index(k + 1, i)]) relax(tb.index(k + 1, i), tb.rows[k + 1] - tb.rows[k], du);
    if (k > 0 && tb.present[tb.index(k - 1, i)]) relax(tb.index(k - 1, i), tb.rows[k] - tb.rows[k - 1], du);
    if (tb.leaf_link[u]) relax(tb.index(k, (i + 1) % n), step, du);
    const std::size_t left = tb.index(k, (i + n - 1) % n);
    if (tb.leaf_link[left]) relax(left, step, du);
  }
  return dist;
}

// Heights of singular leaves are isometry invariants: pair them in order and
// charge an unpaired one its distance to the nearest band edge.
double singular_height_gap(const TruncatedBasin& a, const TruncatedBasin& b) {
  const std::vector<double>& x = a.zero_heights;
  const std::vector<double>& y = b.zero_heights;
  double gap = 0.0;
  const std::size_t common = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < common; ++i) gap = std::max(gap, std::abs(x[i] - y[i]));
  for (const std::vector<double>* longer : {&x, &y})
    for (std::size_t i = common; i < longer->size(); ++i) {
      const double h = (*longer)[i];
      gap = std::max(gap, std::min(h - a.t, a.T - h));
    }
  return gap;
}

struct Terms {
  double coverage = 0.0;
  double distortion = 0.0;
  double defect = 0.0;
  std::vector<CorrespondencePair> samples;
};

Terms compare(const Basin& g, const TruncatedBasin& a, const TruncatedBasin& b, const MetricConfig& cfg) {
  Terms out;
  const int n = a.n_angles;
  const int d = g.degree();
  out.coverage = std::max({a.max_height_error, b.max_height_error, singular_height_gap(a, b)});
  std::vector<std::size_t> common;
  for (std::size_t idx = 0; idx < a.points.size(); ++idx) {
    if (a.present[idx] && b.present[idx]) {
      common.push_back(idx);
      continue;
    }
    if (!a.present[idx] && !b.present[idx]) continue;
    const int col = static_cast<int>(idx % n);
    const double h = a.rows[idx / n];
    const double stop = a.present[idx] ? b.stop_height[col] : a.stop_height[col];
    out.coverage = std::max(out.coverage, std::abs(stop - h));
  }
  if (common.empty()) {
    out.coverage = std::max(out.coverage, a.T - a.t);
    return out;
  }

  // Distortion of grid distances from a few sources.
  const double cap = (a.T - a.t) + kTwoPi;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, common.size() - 1);
  for (int s = 0; s < cfg.pairs; ++s) {
    const std::size_t src = s == 0 ? common.front() : common[pick(rng)];
    const std::vector<double> da = grid_distances(a, src);
    const std::vector<double> db = grid_distances(b, src);
    double worst = 0.0;
    std::size_t worst_idx = src;
    for (std::size_t idx : common) {
      const bool fa = std::isfinite(da[idx]);
      const bool fb = std::isfinite(db[idx]);
      const double dev = fa && fb ? std::abs(da[idx] - db[idx]) : (fa == fb ? 0.0 : cap);
      if (dev > worst) {
        worst = dev;
        worst_idx = idx;
      }
    }
    out.distortion = std::max(out.distortion, worst);
    out.samples.push_back({a.points[worst_idx], b.points[worst_idx], worst});
  }

  // Equivariance: g(Gamma(x)) against Gamma(f(x)).
  for (std::size_t idx : common) {
    const int k = static_cast<int>(idx / n);
    const int col = static_cast<int>(idx % n);
    const std::size_t image = b.index(k, static_cast<int>((static_cast<long>(d) * col) % n));
    if (!b.lifted_present[image] || !a.lifted_present[image]) continue;
    const cplx w = b.lifted[image];
    const cplx gz = g.poly()(b.points[idx]);
    const double flat = std::abs(gz - w) * std::abs(g.sample(w).omega);
    out.defect = std::max(out.defect, flat);
  }
  return out;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Reject: return "reject";
  }
  return "unknown";
}

std::vector<double> band_rows(const std::vector<const Basin*>& basins, double t, double T, int count) {
  if (!(t > 0.0 && t < T)) throw Error(ErrorCode::InvalidArgument, "need 0 < t < T");
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "need at least two rows");
  std::vector<double> rows(count);
  for (int k = 0; k < count; ++k) rows[k] = t + (T - t) * k / (count - 1);
  if (hits_row(basins, rows))
    for (int k = 0; k < count; ++k) rows[k] = t + (T - t) * (k + 0.5) / count;
  return rows;
}

TruncatedBasin truncate(const Basin& basin, const std::vector<double>& rows, double T, double angle_offset,
                        const MetricConfig& cfg) {
  if (cfg.angles < 2 || rows.empty()) throw Error(ErrorCode::InvalidArgument, "grid too small");
  TruncatedBasin tb;
  tb.t = rows.front();
  tb.T = T;
  tb.angle_offset = angle_offset;
  tb.n_angles = cfg.angles;
  tb.rows = rows;
  sample_columns(basin, tb, cfg);
  link_leaves(basin, tb, cfg);
  record_singular_data(basin, tb);
  return tb;
}

TruncatedBasin truncate(const Basin& basin, double t, double T, const MetricConfig& cfg) {
  TruncatedBasin tb = truncate(basin, band_rows({&basin}, t, T, cfg.heights), T, 0.0, cfg);
  tb.t = t;
  return tb;
}

ConjugacyReport eps_conjugacy(const Basin& f, const Basin& g, double t, double T, const MetricConfig& cfg) {
  ConjugacyReport report;
  report.epsilon = kInf;
  if (f.degree() != g.degree()) {
    report.verdict = Verdict::Reject;
    return report;
  }
  const int d = f.degree();
  try {
    const std::vector<double> rows = band_rows({&f, &g}, t, T, cfg.heights);
    const TruncatedBasin a = truncate(f, rows, T, 0.0, cfg);
    for (int k = 0; k < std::max(1, d - 1); ++k) {
      const double offset = -kTwoPi * k / std::max(1, d - 1);
      const TruncatedBasin b = truncate(g, rows, T, offset, cfg);
      Terms terms = compare(g, a, b, cfg);
      const double eps = std::max({terms.coverage, terms.distortion, terms.defect});
      if (eps < report.epsilon) {
        report.epsilon = eps;
        report.rotation_index = k;
        report.coverage = terms.coverage;
        report.distortion = terms.distortion;
        report.defect = terms.defect;
        report.samples = std::move(terms.samples);
      }
    }
  } catch (const Error&) {
    report.epsilon = kInf;
  }
  if (report.epsilon <= cfg.eps_accept)
    report.verdict = Verdict::Accept;
  else if (report.epsilon < 10.0 * cfg.eps_accept)
    report.verdict = Verdict::Inconclusive;
  else
    report.verdict = Verdict::Reject;
  return report;
}

double gh_distance_estimate(const Basin& f, const Basin& g, double t, const MetricConfig& cfg) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::InvalidArgument, "need 0 < t < 1");
  return std::max(eps_conjugacy(f, g, t, 1.0 / t, cfg).epsilon, eps_conjugacy(g, f, t, 1.0 / t, cfg).epsilon);
}

}  // namespace basinlab
