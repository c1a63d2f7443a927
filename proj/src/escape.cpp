#include "basinlab/escape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace basinlab {

namespace {

constexpr double kLogScaleThreshold = 1e100;
constexpr int kCycleWindow = 64;

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGaussNodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

}  // namespace

BasinSample green(const MarkedPolynomial& f, cplx z, const EscapeConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "invalid escape config");
  const int d = f.degree();
  const double dd = static_cast<double>(d);
  const double radius = f.escape_radius();
  const double mass = f.lower_coefficient_mass();

  BasinSample s;
  s.z = z;
  cplx w = z;
  cplx q = 1.0;  // d^{-n} (f^n)'(z)
  double scale = 1.0;  // d^{-n}
  std::array<cplx, kCycleWindow> history{};

  for (int n = 0;; ++n) {
    const double aw = std::abs(w);
    if (aw > radius) {
      const double ratio = mass / aw;
      const double g_bound = scale * -std::log1p(-ratio) / (dd - 1.0);
      const double w_bound = 4.0 * ratio / (1.0 - ratio);
      if ((g_bound <= cfg.tol && w_bound <= cfg.tol) || aw > kLogScaleThreshold) {
        s.status = OrbitStatus::Escaped;
        s.iterations = n;
        s.green = scale * std::log(aw);
        s.error_bound = aw > kLogScaleThreshold ? std::min(g_bound, scale * 1e-90) : g_bound;
        if (q == cplx(0.0)) {
          s.derivative_underflow = true;
          s.omega = 0.0;
        } else {
          s.omega = cplx(0.0, 1.0) * q / w;
        }
        return s;
      }
    }
    if (n >= cfg.max_iter) {
      s.iterations = n;
      s.green = 0.0;
      s.status = OrbitStatus::Inconclusive;
      // A converged cycle reports "inside at resolution".
      for (int p = 1; p < kCycleWindow && p <= n; ++p) {
        const cplx prev = history[(n - p) % kCycleWindow];
        if (std::abs(w - prev) < 1e-9 * std::max(1.0, std::abs(w))) {
          s.status = OrbitStatus::Bounded;
          break;
        }
      }
      return s;
    }
    history[n % kCycleWindow] = w;
    const auto [fw, dfw] = f.value_and_derivative(w);
    q *= dfw / dd;
    scale /= dd;
    w = fw;
  }
}

cplx omega(const MarkedPolynomial& f, cplx z, const EscapeConfig& cfg) {
  const BasinSample s = green(f, z, cfg);
  if (!s.escaped()) throw Error(ErrorCode::NotInBasin, "point does not escape");
  if (s.derivative_underflow) throw Error(ErrorCode::DerivativeUnderflow, "point is precritical");
  return s.omega;
}

CriticalHeights critical_heights(const MarkedPolynomial& f, const EscapeConfig& cfg) {
  CriticalHeights out;
  for (cplx c : f.critical_points()) {
    const BasinSample s = green(f, c, cfg);
    out.heights.push_back(s.green);
    out.escaped.push_back(s.escaped());
    if (s.status == OrbitStatus::Inconclusive) out.inconclusive = true;
  }
  return out;
}

EscapeRate max_escape_rate(const MarkedPolynomial& f, const EscapeConfig& cfg) {
  const CriticalHeights ch = critical_heights(f, cfg);
  EscapeRate r;
  for (double h : ch.heights) r.value = std::max(r.value, h);
  r.lower_bound = ch.inconclusive;
  return r;
}

double min_critical_height(const MarkedPolynomial& f, const EscapeConfig& cfg) {
  const CriticalHeights ch = critical_heights(f, cfg);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ch.heights.size(); ++i)
    if (ch.escaped[i]) m = std::min(m, ch.heights[i]);
  return m;
}

Membership in_filled_julia(const MarkedPolynomial& f, cplx z, const EscapeConfig& cfg) {
  const BasinSample s = green(f, z, cfg);
  switch (s.status) {
    case OrbitStatus::Escaped: return {Membership::Kind::Escapes, s.green};
    case OrbitStatus::Bounded: return {Membership::Kind::Inside, 0.0};
    case OrbitStatus::Inconclusive: break;
  }
  return {Membership::Kind::Inconclusive, 0.0};
}

Basin::Basin(MarkedPolynomial f, EscapeConfig cfg)
    : f_(std::move(f)), cfg_(cfg), crit_(critical_heights(f_, cfg_)) {
  for (double h : crit_.heights) max_rate_ = std::max(max_rate_, h);
}

bool Basin::in_shift_locus() const {
  return std::all_of(crit_.escaped.begin(), crit_.escaped.end(), [](bool e) { return e; });
}

std::vector<double> Basin::zero_heights(double lo, double hi) const {
  const double dd = f_.degree();
  std::vector<double> out;
  for (std::size_t i = 0; i < crit_.heights.size(); ++i) {
    if (!crit_.escaped[i]) continue;
    for (double h = crit_.heights[i]; h >= lo && h > 0.0; h /= dd)
      if (h <= hi) out.push_back(h);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> dedup;
  for (double h : out)
    if (dedup.empty() || h - dedup.back() > 1e-9) dedup.push_back(h);
  return dedup;
}

bool Basin::is_generic_height(double h, double margin) const {
  return zero_heights(h - margin, h + margin).empty();
}

cplx chart_increment(const MarkedPolynomial& f, cplx z0, cplx z1, const EscapeConfig& cfg) {
  const cplx half = 0.5 * (z1 - z0);
  const cplx mid = 0.5 * (z1 + z0);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
    const BasinSample s = green(f, mid + kGaussNodes[i] * half, cfg);
    acc += kGaussWeights[i] * s.omega;
  }
  return cplx(0.0, -1.0) * acc * half;
}

double segment_flat_length(const MarkedPolynomial& f, cplx z0, cplx z1, const EscapeConfig& cfg) {
  const cplx half = 0.5 * (z1 - z0);
  const cplx mid = 0.5 * (z1 + z0);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i)
    acc += kGaussWeights[i] * std::abs(green(f, mid + kGaussNodes[i] * half, cfg).omega);
  return acc * std::abs(half);
}

namespace {

// Flat length of the chord c -> w, guarded against chords that cross lower
// parts of the basin (or K itself), where the integral of |omega| badly
// underestimates the distance. A dip in G along the chord bounds the distance
// from below.
double chord_distance(const MarkedPolynomial& f, cplx c, cplx w, double level, const EscapeConfig& cfg) {
  const cplx half = 0.5 * (w - c);
  const cplx mid = 0.5 * (w + c);
  // Nodes inside K only need to be recognized as low, not resolved.
  EscapeConfig quick = cfg;
  quick.max_iter = std::min(cfg.max_iter, 120);
  double acc = 0.0;
  double lowest = level;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
    const BasinSample s = green(f, mid + kGaussNodes[i] * half, quick);
    acc += kGaussWeights[i] * std::abs(s.omega);
    lowest = std::min(lowest, s.green);
  }
  return std::max(acc * std::abs(half), level - lowest);
}

}  // namespace

NearbyZero nearest_zero(const Basin& basin, cplx z, double window) {
  const MarkedPolynomial& f = basin.poly();
  const EscapeConfig& cfg = basin.config();
  NearbyZero best;
  best.flat_distance = std::numeric_limits<double>::infinity();
  const BasinSample here = green(f, z, cfg);
  if (!here.escaped()) return best;
  const CriticalHeights& ch = basin.critical();
  const double dd = f.degree();
  for (std::size_t i = 0; i < ch.heights.size(); ++i) {
    if (!ch.escaped[i]) continue;
    const cplx c = f.critical_points()[i];
    double hz = ch.heights[i];
    cplx w = z;
    double scale = 1.0;
    for (int k = 0; hz >= here.green - window; ++k) {
      if (std::abs(hz - here.green) <= window) {
        const double dist = chord_distance(f, c, w, hz * scale, cfg) / scale;
        if (dist < best.flat_distance) {
          best.found = true;
          best.flat_distance = dist;
          best.height = hz;
          // Newton on f^k(x) = c starting at z locates the preimage.
          cplx x = z;
          for (int it = 0; it < 40 && k > 0; ++it) {
            cplx v = x, dv = 1.0;
            for (int j = 0; j < k; ++j) {
              const auto [fv, dfv] = f.value_and_derivative(v);
              dv *= dfv;
              v = fv;
            }
            if (dv == cplx(0.0)) break;
            const cplx step = (v - c) / dv;
            x -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
          }
          best.location = k == 0 ? c : x;
        }
      }
      w = f(w);
      scale *= dd;
      hz /= dd;
      if (hz <= 0.0 || k > 200) break;
    }
  }
  return best;
}

}  // namespace basinlab
