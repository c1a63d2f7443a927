#pragma once

#include <vector>

#include "basinlab/poly_core.hpp"

namespace basinlab {

struct EscapeConfig {
  double tol = 1e-10;
  int max_iter = 1000;
};

enum class OrbitStatus {
  Escaped,       // crossed the escape radius; green > 0
  Bounded,       // settled on a cycle at double resolution (never a certificate)
  Inconclusive,  // max_iter reached without escaping or settling
};

/// Green's function and 1-form sampled at one point of the plane.
struct BasinSample {
  cplx z;
  double green = 0.0;
  /// Coefficient of dz in 2i dG, so |omega| is the flat metric density.
  cplx omega{0.0, 0.0};
  int iterations = 0;
  double error_bound = 0.0;
  OrbitStatus status = OrbitStatus::Inconclusive;
  /// (f^n)'(z) == 0 exactly: z is precritical and omega vanishes.
  bool derivative_underflow = false;

  bool escaped() const { return status == OrbitStatus::Escaped; }
};

BasinSample green(const MarkedPolynomial& f, cplx z, const EscapeConfig& cfg = {});

/// omega_f(z) = i lim d^{-n} (f^n)'(z) / f^n(z). Throws NotInBasin for
/// non-escaping z and DerivativeUnderflow at exact precritical points.
cplx omega(const MarkedPolynomial& f, cplx z, const EscapeConfig& cfg = {});

struct CriticalHeights {
  std::vector<double> heights;  // per marked critical point, 0 when not escaping
  std::vector<bool> escaped;
  bool inconclusive = false;    // some orbit hit max_iter without settling
};

CriticalHeights critical_heights(const MarkedPolynomial& f, const EscapeConfig& cfg = {});

struct EscapeRate {
  double value = 0.0;
  /// Set when some critical orbit was inconclusive, so `value` is only a lower bound.
  bool lower_bound = false;
};

/// M(f) = max_i G_f(c_i).
EscapeRate max_escape_rate(const MarkedPolynomial& f, const EscapeConfig& cfg = {});

/// Smallest escape rate over escaping critical points; +inf if none escape.
double min_critical_height(const MarkedPolynomial& f, const EscapeConfig& cfg = {});

struct Membership {
  enum class Kind { Inside, Escapes, Inconclusive } kind;
  double green = 0.0;
};

Membership in_filled_julia(const MarkedPolynomial& f, cplx z, const EscapeConfig& cfg = {});

/// A polynomial together with its cached critical-orbit data. Everything that
/// needs the heights of zeros of omega goes through this.
class Basin {
 public:
  explicit Basin(MarkedPolynomial f, EscapeConfig cfg = {});

  const MarkedPolynomial& poly() const { return f_; }
  const EscapeConfig& config() const { return cfg_; }
  int degree() const { return f_.degree(); }
  BasinSample sample(cplx z) const { return green(f_, z, cfg_); }
  const CriticalHeights& critical() const { return crit_; }
  double max_escape_rate() const { return max_rate_; }
  bool in_shift_locus() const;

  /// Heights of zeros of omega inside [lo, hi]: G(c)/d^k over escaping
  /// critical points c and k >= 0, sorted and deduplicated at 1e-9.
  std::vector<double> zero_heights(double lo, double hi) const;

  /// True when no zero of omega has height within `margin` of h.
  bool is_generic_height(double h, double margin = 1e-7) const;

 private:
  MarkedPolynomial f_;
  EscapeConfig cfg_;
  CriticalHeights crit_;
  double max_rate_ = 0.0;
};

/// Integral of -i*omega along the segment z0 -> z1 (Gauss-Legendre). The real
/// part is the change in height and the imaginary part the change in external
/// angle; its modulus is the flat length of the segment when it stays in one
/// chart.
cplx chart_increment(const MarkedPolynomial& f, cplx z0, cplx z1, const EscapeConfig& cfg = {});

/// Flat length of the segment z0 -> z1, i.e. the integral of |omega| |dz|.
double segment_flat_length(const MarkedPolynomial& f, cplx z0, cplx z1, const EscapeConfig& cfg = {});

/// A zero of omega near a point, with its flat distance.
struct NearbyZero {
  bool found = false;
  cplx location{0.0, 0.0};
  double height = 0.0;
  double flat_distance = 0.0;
};

/// Nearest zero of omega among those whose height lies within `window` of
/// G(z). Uses the scaling of flat distances by d under f: if f^k(z) is near a
/// critical point c, then z is near a preimage of c at distance |.|/d^k.
NearbyZero nearest_zero(const Basin& basin, cplx z, double window);

}  // namespace basinlab
