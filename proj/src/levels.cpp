#include "basinlab/levels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

#include "basinlab/detail/chart.hpp"

namespace basinlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Newton along the gradient direction onto {G = c}.
cplx correct_onto_level(const Basin& basin, cplx z, double c) {
  for (int it = 0; it < 30; ++it) {
    const BasinSample s = basin.sample(z);
    if (!s.escaped() || s.omega == cplx(0.0)) throw Error(ErrorCode::NewtonDivergence, "left the basin while correcting");
    const double err = c - s.green;
    if (std::abs(err) <= 1e-12 * std::max(1.0, c)) return z;
    z += cplx(0.0, err) / s.omega;
  }
  const double err = std::abs(basin.sample(z).green - c);
  if (err > 1e-9) throw Error(ErrorCode::NewtonDivergence, "level corrector did not converge");
  return z;
}

// Point x on the leaf through v with Im(F(x) - F(v)) = offset.
cplx advance_along_leaf(const Basin& basin, cplx v, double c, double offset) {
  const MarkedPolynomial& f = basin.poly();
  const EscapeConfig& cfg = basin.config();
  cplx x = v - offset / basin.sample(v).omega;
  for (int it = 0; it < 30; ++it) {
    const BasinSample s = basin.sample(x);
    const cplx inc = chart_increment(f, v, x, cfg);
    const cplx err(c - s.green, offset - inc.imag());
    const cplx dz = cplx(0.0, 1.0) * err / s.omega;
    x += dz;
    if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// Caps a leaf step at half the flat distance to a nearby zero of omega.
double zero_capped_step(const Basin& basin, cplx z, double c, double delta, const LevelConfig& cfg) {
  if (basin.zero_heights(c - 2.0 * delta, c + 2.0 * delta).empty()) return delta;
  const NearbyZero nz = nearest_zero(basin, z, 2.0 * delta + cfg.ray.sing_radius);
  if (!nz.found) return delta;
  if (nz.flat_distance < 1e-9) throw Error(ErrorCode::NonGenericHeight, "level passes through a zero of omega");
  return std::min(delta, 0.5 * nz.flat_distance);
}

struct LeafStep {
  cplx z;
  cplx inc;
};

// One predictor-corrector move by angle delta along {G = c}; nullopt when the
// corrector fails or lands on another branch.
std::optional<LeafStep> leaf_step(const Basin& basin, cplx z, double c, double delta) {
  try {
    const cplx next = correct_onto_level(basin, z - delta / basin.sample(z).omega, c);
    const cplx inc = chart_increment(basin.poly(), z, next, basin.config());
    if (std::abs(inc.real()) < 1e-7 && std::abs(inc.imag() - delta) <= 0.25 * delta) return LeafStep{next, inc};
  } catch (const Error&) {
  }
  return std::nullopt;
}

double leaf_max_step(const Basin& basin, double c, int l) {
  const double dl = std::pow(static_cast<double>(basin.degree()), l);
  return std::min(0.4 * detail::max_height_step(c), kTwoPi / (64.0 * dl));
}

struct LoopTrace {
  std::vector<cplx> polyline;
  std::vector<double> offsets;  // accumulated angle at each vertex
  double length = 0.0;
  double height_drift = 0.0;
};

LoopTrace trace_loop(const Basin& basin, cplx start, double c, int l, const LevelConfig& cfg) {
  const MarkedPolynomial& f = basin.poly();
  const EscapeConfig& ecfg = basin.config();
  const double max_step = leaf_max_step(basin, c, l);

  LoopTrace out;
  cplx z = correct_onto_level(basin, start, c);
  start = z;
  out.polyline.push_back(z);
  out.offsets.push_back(0.0);
  double step = max_step;
  double acc = 0.0;
  for (;;) {
    if (static_cast<int>(out.polyline.size()) > cfg.max_vertices)
      throw Error(ErrorCode::StepLimit, "level trace exceeded max_vertices");
    if (acc > kTwoPi + 1.0) throw Error(ErrorCode::SeedMiss, "level trace did not close");
    const double delta = zero_capped_step(basin, z, c, std::min(step, max_step), cfg);
    const BasinSample here = basin.sample(z);
    if (out.polyline.size() >= 3 && std::abs(z - start) <= 3.0 * delta / std::abs(here.omega)) {
      const cplx inc = chart_increment(f, z, start, ecfg);
      if (std::abs(inc.real()) < 1e-6 && inc.imag() > 0.0 && inc.imag() <= 1.5 * delta) {
        acc += inc.imag();
        out.height_drift += inc.real();
        break;
      }
    }
    if (const auto moved = leaf_step(basin, z, c, delta)) {
      acc += moved->inc.imag();
      out.height_drift += moved->inc.real();
      z = moved->z;
      out.polyline.push_back(z);
      out.offsets.push_back(acc);
      step = 1.5 * delta;
    } else {
      step = 0.5 * delta;
      if (step < 1e-13) throw Error(ErrorCode::NewtonDivergence, "level trace step underflow");
    }
  }
  out.length = acc;
  return out;
}

// Fills degree and marked points of a traced loop from f^l.
LevelComponent finish_component(const Basin& basin, LoopTrace&& loop, double c, int l, const LevelConfig& cfg) {
  const MarkedPolynomial& f = basin.poly();
  const double dl = std::pow(static_cast<double>(f.degree()), l);
  LevelComponent comp;
  comp.height = c;
  comp.level_index = l;
  comp.flat_length = loop.length;

  // Winding of f^l around the filled Julia set, from positions only.
  double winding = 0.0;
  const std::size_t n = loop.polyline.size();
  cplx prev = detail::iterate(f, loop.polyline[0], l).value;
  for (std::size_t i = 1; i <= n; ++i) {
    const cplx cur = detail::iterate(f, loop.polyline[i % n], l).value;
    winding += std::arg(cur / prev);
    prev = cur;
  }
  comp.map_degree = static_cast<int>(std::lround(winding / kTwoPi));

  // Marked points: where the external angle of f^l crosses 0.
  const double top_angle = external_angle(basin, detail::iterate(f, loop.polyline[0], l).value, cfg.ray);
  loop.offsets.push_back(loop.length);
  const double slack = 1e-9 * loop.length;
  for (long m = static_cast<long>(std::floor(top_angle / kTwoPi));; ++m) {
    double alpha = (kTwoPi * m - top_angle) / dl;
    if (alpha < -slack) continue;
    if (alpha >= loop.length - slack) break;
    alpha = std::max(alpha, 0.0);
    const auto it = std::upper_bound(loop.offsets.begin(), loop.offsets.end(), alpha);
    const std::size_t i = static_cast<std::size_t>(it - loop.offsets.begin()) - 1;
    comp.marked_points.push_back(advance_along_leaf(basin, loop.polyline[i], c, alpha - loop.offsets[i]));
  }
  comp.polyline = std::move(loop.polyline);
  return comp;
}

}  // namespace

int level_index(const Basin& basin, double c) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "height must be positive");
  const double m = basin.max_escape_rate();
  int n = 0;
  for (double h = c; h < m; h *= basin.degree()) ++n;
  return n;
}

LevelComponent trace_level(const Basin& basin, cplx start, double c, const LevelConfig& cfg) {
  if (!basin.is_generic_height(c, cfg.genericity_margin))
    throw Error(ErrorCode::NonGenericHeight, "height is within the genericity margin of a zero of omega");
  const int l = level_index(basin, c);
  return finish_component(basin, trace_loop(basin, start, c, l, cfg), c, l, cfg);
}

std::vector<LevelComponent> level_components(const Basin& basin, double c, const LevelConfig& cfg) {
  if (!basin.is_generic_height(c, cfg.genericity_margin))
    throw Error(ErrorCode::NonGenericHeight, "height is within the genericity margin of a zero of omega");
  const MarkedPolynomial& f = basin.poly();
  const int d = f.degree();
  const int l = level_index(basin, c);
  const double top = c * std::pow(static_cast<double>(d), l);

  RayWalker walker(basin, 0.0, cfg.ray);
  if (walker.descend_to(top) != RayStatus::ReachedTargetHeight)
    throw Error(ErrorCode::NonGenericHeight, "angle-0 ray is obstructed above the top leaf");

  std::vector<cplx> seeds{walker.point()};
  std::vector<cplx> coeffs(f.coefficients().begin(), f.coefficients().end());
  const cplx a0 = coeffs[0];
  for (int j = 0; j < l; ++j) {
    std::vector<cplx> next;
    for (cplx w : seeds) {
      coeffs[0] = a0 - w;
      for (cplx r : polynomial_roots(coeffs)) next.push_back(r);
    }
    seeds = std::move(next);
  }
  for (cplx& s : seeds) s = correct_onto_level(basin, s, c);

  std::vector<bool> used(seeds.size(), false);
  std::vector<LevelComponent> out;
  int total = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (used[i]) continue;
    LevelComponent comp = finish_component(basin, trace_loop(basin, seeds[i], c, l, cfg), c, l, cfg);
    std::vector<cplx> matched;
    for (cplx p : comp.marked_points) {
      std::size_t best = seeds.size();
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < seeds.size(); ++j) {
        if (used[j]) continue;
        const double dist = std::abs(seeds[j] - p);
        if (dist < best_dist) {
          best_dist = dist;
          best = j;
        }
      }
      if (best < seeds.size() && best_dist <= 1e-6 * std::max(1.0, std::abs(p))) {
        used[best] = true;
        matched.push_back(seeds[best]);
      }
    }
    if (static_cast<int>(matched.size()) != comp.map_degree ||
        static_cast<int>(comp.marked_points.size()) != comp.map_degree)
      throw Error(ErrorCode::SeedMiss, "seed count on a level loop disagrees with its winding");
    comp.marked_points = std::move(matched);
    total += comp.map_degree;
    out.push_back(std::move(comp));
  }
  if (total != static_cast<int>(seeds.size())) throw Error(ErrorCode::SeedMiss, "degree sum differs from d^l");
  return out;
}

std::optional<cplx> follow_leaf(const Basin& basin, cplx z, double c, double offset, const LevelConfig& cfg) {
  if (!(offset >= 0.0)) throw Error(ErrorCode::InvalidArgument, "offset must be non-negative");
  try {
    const double max_step = leaf_max_step(basin, c, level_index(basin, c));
    z = correct_onto_level(basin, z, c);
    double done = 0.0;
    double step = max_step;
    for (int count = 0; offset - done > 1e-3 * max_step; ++count) {
      if (count > cfg.max_vertices) return std::nullopt;
      const double delta = zero_capped_step(basin, z, c, std::min({step, max_step, offset - done}), cfg);
      if (const auto moved = leaf_step(basin, z, c, delta)) {
        done += moved->inc.imag();
        z = moved->z;
        step = 1.5 * delta;
      } else {
        step = 0.5 * delta;
        if (step < 1e-13) return std::nullopt;
      }
    }
    return advance_along_leaf(basin, z, c, offset - done);
  } catch (const Error&) {
    return std::nullopt;
  }
}

double annulus_modulus(const Basin& basin, double a, double b, cplx seed, const LevelConfig& cfg) {
  if (!(a > 0.0 && a < b)) throw Error(ErrorCode::InvalidArgument, "need 0 < a < b");
  const BasinSample s = basin.sample(seed);
  if (!s.escaped() || !(s.green > a && s.green < b))
    throw Error(ErrorCode::InvalidArgument, "seed height must lie strictly between a and b");

  // A zero inside the component either sits on the seed's gradient line or
  // changes the length of the leaf through that line as the line crosses its
  // height.
  auto leaf_length_at = [&](double h) {
    const FlowResult moved = flow_to_height(basin, seed, h, cfg.ray);
    if (moved.hit_zero) throw Error(ErrorCode::ContainsSingularity, "a zero of omega lies in the annulus");
    return trace_level(basin, moved.z, h, cfg).flat_length;
  };
  double reference = -1.0;
  for (double hz : basin.zero_heights(a, b)) {
    if (hz <= a || hz >= b) continue;
    const double eps = std::min({1e-4, 0.5 * (hz - a), 0.5 * (b - hz)});
    const double below = leaf_length_at(hz - eps);
    const double above = leaf_length_at(hz + eps);
    if (std::abs(below - above) > 1e-6 * std::max(below, above))
      throw Error(ErrorCode::ContainsSingularity, "a zero of omega lies in the annulus");
    reference = above;
  }
  if (reference < 0.0) {
    double h = s.green;
    for (int k = 1; !basin.is_generic_height(h, cfg.genericity_margin) && k < 20; ++k)
      h = s.green + (k % 2 ? 1.0 : -1.0) * k * 1e-6 * std::min(1.0, b - a);
    reference = leaf_length_at(h);
  }
  return (b - a) * kTwoPi / reference;
}

void write_level_csv(std::ostream& out, const std::vector<LevelComponent>& components) {
  out << "component_id,height,level_index,degree,length,vertex,re,im\n";
  out.precision(17);
  for (std::size_t i = 0; i < components.size(); ++i) {
    const LevelComponent& c = components[i];
    for (std::size_t v = 0; v < c.polyline.size(); ++v)
      out << i << ',' << c.height << ',' << c.level_index << ',' << c.map_degree << ',' << c.flat_length << ','
          << v << ',' << c.polyline[v].real() << ',' << c.polyline[v].imag() << '\n';
  }
}

}  // namespace basinlab
