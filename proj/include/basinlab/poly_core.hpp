#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "basinlab/error.hpp"

namespace basinlab {

using cplx = std::complex<double>;

/// Monic centered polynomial parameterized by its marked critical points and
/// the image of the origin:
///
///   f(z) = \int_0^z d * prod_i (w - c_i) dw + a,   sum_i c_i = 0.
///
/// The marking (c, a) is the source of truth; coefficients are derived from it
/// on construction and never mutated afterwards.
class MarkedPolynomial {
 public:
  /// Projects `critical_points` onto the centered hyperplane by subtracting
  /// the mean. Throws DegreeTooSmall for an empty list and NotCentered when the
  /// projection moves any point by more than 1e-6.
  static MarkedPolynomial from_critical_data(std::vector<cplx> critical_points, cplx origin_image);

  /// Builds the marking of a monic centered coefficient vector a_0..a_d by
  /// locating the roots of f'. The leading two coefficients must be (0, 1).
  static MarkedPolynomial from_coefficients(std::span<const cplx> coefficients);

  /// The degree-one map z + a (used for trivial local models).
  static MarkedPolynomial linear(cplx origin_image);

  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  std::span<const cplx> critical_points() const { return critical_points_; }
  cplx origin_image() const { return origin_image_; }
  /// a_0 .. a_d, a_d == 1 and a_{d-1} == 0.
  std::span<const cplx> coefficients() const { return coefficients_; }

  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
  /// Value and first derivative in one Horner pass.
  std::pair<cplx, cplx> value_and_derivative(cplx z) const;

  /// sum_{i<d} |a_i|, the quantity behind the escape radius.
  double lower_coefficient_mass() const { return lower_mass_; }

  /// Escape radius max(2, 1 + sum_{i<d} |a_i|); beyond it |f(z)| >= 2|z|.
  double escape_radius() const;

 private:
  MarkedPolynomial(std::vector<cplx> critical_points, cplx origin_image, std::vector<cplx> coefficients);

  std::vector<cplx> critical_points_;
  cplx origin_image_;
  std::vector<cplx> coefficients_;
  double lower_mass_ = 0.0;
};

/// z -> scale * z + offset.
struct AffineMap {
  cplx scale{1.0, 0.0};
  cplx offset{0.0, 0.0};

  cplx operator()(cplx z) const { return scale * z + offset; }
  /// (*this) o inner.
  AffineMap compose(const AffineMap& inner) const;
  AffineMap inverse() const;
};

/// Ordered critical values (f(c_1), ..., f(c_{d-1})) in marking order.
std::vector<cplx> critical_values(const MarkedPolynomial& f);

struct Normalization {
  MarkedPolynomial poly;
  AffineMap conjugacy;  // A with A o p = g o A
};

/// Conjugates an arbitrary polynomial (coefficients a_0..a_d) to monic
/// centered form. Among the d-1 valid scales, arg(scale) lies in
/// [0, 2pi/(d-1)).
Normalization normalize(std::span<const cplx> coefficients);

/// zeta^{-1} f(zeta z) with zeta = exp(2 pi i k / (d-1)).
MarkedPolynomial rotate_conjugate(const MarkedPolynomial& f, int k);

/// Max coefficientwise distance between two polynomials of equal degree.
double coefficient_distance(const MarkedPolynomial& f, const MarkedPolynomial& g);

/// Minimum of coefficient_distance(f, rotate_conjugate(g, k)) over k, with
/// the minimizing k.
std::pair<double, int> rotation_aligned_distance(const MarkedPolynomial& f, const MarkedPolynomial& g);

/// All complex roots of a_0 + a_1 z + ... + a_n z^n via the companion matrix,
/// polished by Newton.
std::vector<cplx> polynomial_roots(std::span<const cplx> coefficients);

/// Evaluates a coefficient vector (ascending powers) by Horner.
cplx horner(std::span<const cplx> coefficients, cplx z);

/// Greedy minimal-distance matching: result[i] is the index in `b` assigned to
/// a[i]. Sizes must agree.
std::vector<std::size_t> match_multisets(std::span<const cplx> a, std::span<const cplx> b);

/// Max distance between matched elements under match_multisets.
double multiset_distance(std::span<const cplx> a, std::span<const cplx> b);

}  // namespace basinlab
