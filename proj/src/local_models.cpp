#include "basinlab/local_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace basinlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_round_annulus(const LocalModelSurface& base) {
  return base.poles.size() == 1 && std::abs(base.residues[0] - 1.0) <= 1e-12;
}

// Psi(z) = sum_j r_j Log(z - q_j); Re Psi is the height, Im Psi the angle.
cplx psi_derivative(const LocalModelSurface& base, cplx z) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < base.poles.size(); ++j) s += base.residues[j] / (z - base.poles[j]);
  return s;
}

cplx psi_increment(const LocalModelSurface& base, cplx z0, cplx z1) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < base.poles.size(); ++j)
    s += base.residues[j] * std::log((z1 - base.poles[j]) / (z0 - base.poles[j]));
  return s;
}

// Moves z (where Psi has the tracked value w) until Psi = target, in short
// steps so the tracked branch stays continuous.
cplx track_psi(const LocalModelSurface& base, cplx z, cplx w, cplx target) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(target - w) / 0.05)));
  const cplx start_w = w;
  for (int p = 1; p <= pieces; ++p) {
    const cplx goal = start_w + (target - start_w) * (static_cast<double>(p) / pieces);
    cplx x = z + (goal - w) / psi_derivative(base, z);
    for (int it = 0; it < 40; ++it) {
      const cplx err = goal - (w + psi_increment(base, z, x));
      const cplx dx = err / psi_derivative(base, x);
      x += dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    w += psi_increment(base, z, x);
    z = x;
  }
  return z;
}

// Marked point of the central leaf: where the angle-0 line from infinity
// meets {Re Psi = 0}.
cplx central_marked_point(const LocalModelSurface& base) {
  double far = 1.0;
  for (cplx q : base.poles) far = std::max(far, std::abs(q));
  const cplx z0 = 1e3 * far;
  cplx w = 0.0;
  for (std::size_t j = 0; j < base.poles.size(); ++j) w += base.residues[j] * std::log(z0 - base.poles[j]);
  // Asymptotically Psi ~ Log z, so this point has Im Psi close to 0 already.
  return track_psi(base, z0, w, 0.0);
}

MarkedPolynomial precompose_root(const MarkedPolynomial& p, int j) {
  const int k = p.degree();
  const cplx zeta = std::polar(1.0, kTwoPi * j / k);
  if (k == 1) return p;
  std::vector<cplx> c(p.critical_points().begin(), p.critical_points().end());
  for (cplx& x : c) x /= zeta;
  return MarkedPolynomial::from_critical_data(std::move(c), p.origin_image());
}

double leaf_angle_of(const LocalModelSurface& base, cplx v) {
  if (is_round_annulus(base)) return wrap_angle(std::arg(v - base.poles[0]));
  // Coarse scan, then Newton on the angle.
  constexpr int n = 256;
  double best = 0.0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double a = kTwoPi * i / n;
    const double dist = std::abs(central_leaf_point(base, a) - v);
    if (dist < best_dist) {
      best_dist = dist;
      best = a;
    }
  }
  const cplx x = central_leaf_point(base, best);
  return wrap_angle(best + psi_increment(base, x, v).imag());
}

}  // namespace

LocalModelSurface LocalModelSurface::annulus(double band_low, double central_height, double band_high) {
  LocalModelSurface s;
  s.band_low = band_low;
  s.central_height = central_height;
  s.band_high = band_high;
  s.poles = {0.0};
  s.residues = {1.0};
  return s;
}

void validate(const LocalModelSurface& base) {
  if (!(base.band_low < base.central_height && base.central_height < base.band_high))
    throw Error(ErrorCode::InvalidArgument, "height band must satisfy a < c < b");
  if (base.poles.empty() || base.poles.size() != base.residues.size())
    throw Error(ErrorCode::InvalidArgument, "need one residue per pole");
  double sum = 0.0;
  for (double r : base.residues) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "residues must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-10) throw Error(ErrorCode::InvalidArgument, "residues must sum to 1");
  std::vector<int> perm = base.slit_permutation;
  if (perm.size() != base.slit_angles.size()) throw Error(ErrorCode::InvalidArgument, "slit permutation size");
  std::sort(perm.begin(), perm.end());
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != static_cast<int>(i)) throw Error(ErrorCode::InvalidArgument, "slit map is not a permutation");
}

cplx central_leaf_point(const LocalModelSurface& base, double alpha) {
  if (is_round_annulus(base)) return base.poles[0] + std::polar(1.0, alpha);
  const cplx x0 = central_marked_point(base);
  return track_psi(base, x0, 0.0, cplx(0.0, alpha));
}

std::vector<PointedLocalModelMap> extract_local_models(const Basin& basin, double t, const LocalModelConfig& cfg) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "height must be positive");
  const int d = basin.degree();
  const MarkedPolynomial& f = basin.poly();
  const std::vector<LevelComponent> here = level_components(basin, t, cfg.level);
  const std::vector<LevelComponent> image = level_components(basin, d * t, cfg.level);

  double w = cfg.band_fraction * t;
  for (double hz : basin.zero_heights(t - w, t + w)) w = std::min(w, std::abs(hz - t));
  for (double hz : basin.zero_heights(d * (t - w), d * (t + w))) w = std::min(w, std::abs(hz - d * t) / d);

  struct Marked {
    cplx z;
    double angle;
  };
  auto smallest_angle = [&](const std::vector<cplx>& pts) {
    Marked best{pts.front(), std::numeric_limits<double>::infinity()};
    for (cplx p : pts) {
      const AngleResult a = angle_candidates(basin, p, cfg.level.ray);
      const double ang = a.ambiguous ? a.candidates.front() : a.angle;
      if (ang < best.angle) best = {p, ang};
    }
    return best;
  };

  std::vector<int> degree_sum(image.size(), 0);
  std::vector<PointedLocalModelMap> out;
  for (const LevelComponent& comp : here) {
    const cplx fy = f(comp.marked_points.front());
    std::size_t target = image.size();
    for (std::size_t j = 0; j < image.size() && target == image.size(); ++j)
      for (cplx m : image[j].marked_points)
        if (std::abs(m - fy) <= 1e-6 * std::max(1.0, std::abs(m))) target = j;
    if (target == image.size()) throw Error(ErrorCode::InconsistentDegrees, "image of a level component not found");
    const LevelComponent& img = image[target];

    const double ratio = d * comp.flat_length / img.flat_length;
    const int k = static_cast<int>(std::lround(ratio));
    if (k < 1 || std::abs(ratio - k) > 1e-6) throw Error(ErrorCode::InconsistentDegrees, "non-integral local degree");
    degree_sum[target] += k;

    const Marked x = smallest_angle(img.marked_points);
    std::vector<cplx> above_x;
    for (cplx m : comp.marked_points)
      if (std::abs(f(m) - x.z) <= 1e-6 * std::max(1.0, std::abs(x.z))) above_x.push_back(m);
    if (above_x.empty()) throw Error(ErrorCode::SeedMiss, "no marked preimage of the base point");
    const Marked y = smallest_angle(above_x);

    const double s = kTwoPi / img.flat_length;
    PointedLocalModelMap lm;
    lm.degree = k;
    lm.base = LocalModelSurface::annulus(s * d * (t - w), s * d * t, s * d * (t + w));
    if (k == 1)
      lm.representative = MarkedPolynomial::linear(0.0);
    else
      lm.representative = MarkedPolynomial::from_critical_data(std::vector<cplx>(k - 1, 0.0), 0.0);
    ModelSource src;
    src.height = t;
    src.domain_point = y.z;
    src.base_point = x.z;
    src.base_angle = x.angle;
    src.component_length = comp.flat_length;
    src.base_length = img.flat_length;
    src.component_polyline = comp.polyline;
    src.base_polyline = img.polyline;
    lm.source = std::move(src);
    out.push_back(std::move(lm));
  }
  for (int sum : degree_sum)
    if (sum != d) throw Error(ErrorCode::InconsistentDegrees, "local degrees over a leaf of {G = dt} do not sum to d");
  return out;
}

MarkedPolynomial local_model_to_polynomial(const PointedLocalModelMap& lm) {
  const MarkedPolynomial& p = lm.representative;
  if (p.degree() != lm.degree) throw Error(ErrorCode::InvalidArgument, "representative degree differs from model degree");
  for (cplx v : critical_values(p)) {
    bool at_pole = false;
    for (cplx q : lm.base.poles) at_pole = at_pole || std::abs(v - q) <= 1e-8;
    if (at_pole) continue;
    const double height = psi_increment(lm.base, central_leaf_point(lm.base, 0.0), v).real();
    if (std::abs(height) > 1e-8) throw Error(ErrorCode::InvalidArgument, "critical value off the central leaf");
  }
  return p;
}

PointedLocalModelMap restrict_to_base(const MarkedPolynomial& p, const LocalModelSurface& base) {
  validate(base);
  PointedLocalModelMap lm;
  lm.degree = p.degree();
  lm.representative = p;
  lm.base = base;
  if (p.degree() > 1) {
    bool all_poles = true;
    std::vector<double> angles;
    for (cplx v : critical_values(p)) {
      bool at_pole = false;
      for (cplx q : base.poles) at_pole = at_pole || std::abs(v - q) <= 1e-8;
      all_poles = all_poles && at_pole;
      if (!at_pole) angles.push_back(leaf_angle_of(base, v));
    }
    if (!all_poles) lm.critical_value_angles = std::move(angles);
  }
  local_model_to_polynomial(lm);
  return lm;
}

PointedLocalModelMap sample_LMkk1(const LocalModelSurface& base, int k, const std::vector<double>& angles,
                                  const ContinuationConfig& cfg) {
  validate(base);
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "degree must be at least 1");
  if (static_cast<int>(angles.size()) != k - 1)
    throw Error(ErrorCode::InvalidArgument, "need exactly k-1 critical value angles");
  for (double a : angles)
    if (!(a >= 0.0 && a < kTwoPi)) throw Error(ErrorCode::InvalidArgument, "angles must lie in [0, 2pi)");

  PointedLocalModelMap lm;
  lm.degree = k;
  lm.base = base;
  lm.critical_value_angles = angles;
  if (k == 1) {
    lm.representative = MarkedPolynomial::linear(0.0);
    return lm;
  }
  const cplx v0 = central_leaf_point(base, angles.front());
  bool coalesced = true;
  for (double a : angles) coalesced = coalesced && std::abs(a - angles.front()) <= 1e-12;
  if (coalesced) {
    lm.representative = MarkedPolynomial::from_critical_data(std::vector<cplx>(k - 1, 0.0), v0);
    return lm;
  }

  auto values_at = [&](double s) {
    std::vector<cplx> v(k - 1);
    for (int j = 0; j < k - 1; ++j) v[j] = central_leaf_point(base, angles.front() + s * (angles[j] - angles.front()));
    return v;
  };

  // Blow up the fully ramified point z^k + v0: with c = e u and a = v0 + e^k b
  // the critical values become v0 + e^k (values of the rescaled polynomial).
  const double s0 = 1e-3;
  const std::vector<cplx> start = values_at(s0);
  double spread = 0.0;
  for (cplx v : start) spread = std::max(spread, std::abs(v - v0));
  const double e = std::pow(spread, 1.0 / k);
  const double ek = std::pow(e, k);
  std::vector<cplx> rescaled(k - 1);
  for (int j = 0; j < k - 1; ++j) rescaled[j] = (start[j] - v0) / ek;
  const std::optional<MarkedPolynomial> small = solve_critical_values(k, rescaled);
  if (!small) throw Error(ErrorCode::LiftFailure, "no start polynomial near the fully ramified point");
  std::vector<cplx> c(small->critical_points().begin(), small->critical_points().end());
  for (cplx& x : c) x *= e;
  const MarkedPolynomial p0 = newton_critical_values(MarkedPolynomial::from_critical_data(c, v0 + ek * small->origin_image()), start).first;

  const LiftedPath path =
      lift_critical_value_path(p0, [&](double s) { return values_at(s0 + s * (1.0 - s0)); }, cfg);
  if (!path.reached_end() || path.last_residual > 1e-8)
    throw Error(ErrorCode::LiftFailure,
                "critical value path stalled at s = " + std::to_string(path.status_s) +
                    ", residual " + std::to_string(path.last_residual));
  lm.representative = path.steps.back().poly;
  return lm;
}

double representative_distance(const MarkedPolynomial& p, const MarkedPolynomial& q) {
  if (p.degree() != q.degree()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < std::max(1, p.degree()); ++j) best = std::min(best, coefficient_distance(precompose_root(p, j), q));
  return best;
}

}  // namespace basinlab
