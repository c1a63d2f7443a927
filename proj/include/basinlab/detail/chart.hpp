#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "basinlab/escape.hpp"

// Helpers for working in the lifted chart Log f^n, shared by ray tracing and
// level tracing.
namespace basinlab::detail {

struct Iterate {
  cplx value;
  cplx deriv;
};

inline Iterate iterate(const MarkedPolynomial& f, cplx z, int n) {
  cplx v = z, dv = 1.0;
  for (int j = 0; j < n; ++j) {
    const auto [fv, dfv] = f.value_and_derivative(v);
    dv *= dfv;
    v = fv;
  }
  return {v, dv};
}

/// Smallest n >= 0 with d^n h >= top.
inline int lift_level(int d, double h, double top) {
  int n = 0;
  for (double s = h; s < top && n < 400; s *= d) ++n;
  return n;
}

/// Newton on Log f^n(z) = target, the imaginary part taken mod 2 pi.
inline std::optional<cplx> solve_chart(const MarkedPolynomial& f, cplx guess, int n, cplx target) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double scale = std::pow(static_cast<double>(f.degree()), n);
  const double limit = 1e3 * (1.0 + std::abs(guess));
  cplx z = guess;
  for (int it = 0; it < 60; ++it) {
    const Iterate r = iterate(f, z, n);
    if (r.value == cplx(0.0) || r.deriv == cplx(0.0) || !std::isfinite(std::abs(r.value))) return std::nullopt;
    cplx e = std::log(r.value) - target;
    e.imag(std::remainder(e.imag(), kTwoPi));
    const cplx step = e * r.value / r.deriv;
    z -= step;
    if (!std::isfinite(std::abs(z)) || std::abs(z - guess) > limit) return std::nullopt;
    if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(z)) ||
        std::abs(e) <= 1e-15 * std::max(1.0, std::abs(target))) {
      return std::abs(e) / scale <= 1e-9 ? std::optional<cplx>(z) : std::nullopt;
    }
  }
  return std::nullopt;
}

/// Largest height step taken in one predictor-corrector move at height h. Past
/// height 1 the Euclidean move |step/omega| is comparable to |z| itself, so
/// the step stops growing with h.
inline double max_height_step(double h) { return 0.25 * std::min(h, 1.0); }

/// Checks that the segment z0 -> z1 moves by `height_change` in height while
/// staying on the same ray, i.e. that Newton did not jump to another branch
/// of the d^n-fold chart. A chord that dips far below both endpoints has left
/// the region where the chart is single-valued.
inline bool increment_matches(const MarkedPolynomial& f, cplx z0, cplx z1, double height_change, double scale,
                              const EscapeConfig& cfg) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double g0 = green(f, z0, cfg).green;
  const double g_mid = green(f, 0.5 * (z0 + z1), cfg).green;
  if (g_mid < 0.5 * std::min(g0, g0 + height_change)) return false;
  const cplx inc = chart_increment(f, z0, z1, cfg);
  return std::abs(inc.imag()) < 0.25 * kTwoPi / scale &&
         std::abs(inc.real() - height_change) < 0.25 * std::abs(height_change) + 1e-12;
}

}  // namespace basinlab::detail
