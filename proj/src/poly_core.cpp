#include "basinlab/poly_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace basinlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::NotCentered: return "NotCentered";
    case ErrorCode::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorCode::NotInBasin: return "NotInBasin";
    case ErrorCode::DerivativeUnderflow: return "DerivativeUnderflow";
    case ErrorCode::BelowCriticalHeight: return "BelowCriticalHeight";
    case ErrorCode::OnSingularLeafAmbiguous: return "OnSingularLeafAmbiguous";
    case ErrorCode::StepLimit: return "StepLimit";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::NonGenericHeight: return "NonGenericHeight";
    case ErrorCode::SeedMiss: return "SeedMiss";
    case ErrorCode::ContainsSingularity: return "ContainsSingularity";
    case ErrorCode::InconsistentDegrees: return "InconsistentDegrees";
    case ErrorCode::LiftFailure: return "LiftFailure";
    case ErrorCode::Stalled: return "Stalled";
    case ErrorCode::NotInShiftLocus: return "NotInShiftLocus";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_precondition(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::DegreeTooSmall:
    case ErrorCode::NotCentered:
    case ErrorCode::DegenerateLeadingCoefficient:
    case ErrorCode::NotInBasin:
    case ErrorCode::BelowCriticalHeight:
    case ErrorCode::NonGenericHeight:
    case ErrorCode::NotInShiftLocus:
    case ErrorCode::DegreeMismatch:
    case ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

namespace {

// Coefficients of prod_i (z - r_i), ascending.
std::vector<cplx> expand_roots(std::span<const cplx> roots) {
  std::vector<cplx> out{1.0};
  for (cplx r : roots) {
    std::vector<cplx> next(out.size() + 1, 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
      next[k + 1] += out[k];
      next[k] -= r * out[k];
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

MarkedPolynomial::MarkedPolynomial(std::vector<cplx> critical_points, cplx origin_image,
                                   std::vector<cplx> coefficients)
    : critical_points_(std::move(critical_points)),
      origin_image_(origin_image),
      coefficients_(std::move(coefficients)) {
  for (std::size_t i = 0; i + 1 < coefficients_.size(); ++i) lower_mass_ += std::abs(coefficients_[i]);
}

MarkedPolynomial MarkedPolynomial::from_critical_data(std::vector<cplx> critical_points, cplx origin_image) {
  if (critical_points.empty())
    throw Error(ErrorCode::DegreeTooSmall, "need at least one critical point (degree >= 2)");
  cplx mean = 0.0;
  for (cplx c : critical_points) mean += c;
  mean /= static_cast<double>(critical_points.size());
  if (std::abs(mean) > 1e-6)
    throw Error(ErrorCode::NotCentered, "critical points are not centered (mean " +
                                            std::to_string(std::abs(mean)) + ")");
  for (cplx& c : critical_points) c -= mean;

  const int d = static_cast<int>(critical_points.size()) + 1;
  const std::vector<cplx> deriv = expand_roots(critical_points);  // prod (z - c_i), degree d-1
  std::vector<cplx> coeffs(d + 1, 0.0);
  coeffs[0] = origin_image;
  for (int j = 0; j < d; ++j) coeffs[j + 1] = static_cast<double>(d) * deriv[j] / static_cast<double>(j + 1);
  // Exact by construction up to rounding; pin the normalization.
  coeffs[d] = 1.0;
  coeffs[d - 1] = 0.0;
  return MarkedPolynomial(std::move(critical_points), origin_image, std::move(coeffs));
}

MarkedPolynomial MarkedPolynomial::from_coefficients(std::span<const cplx> coefficients) {
  const int d = static_cast<int>(coefficients.size()) - 1;
  if (d < 2) throw Error(ErrorCode::DegreeTooSmall, "degree must be at least 2");
  if (std::abs(coefficients[d] - 1.0) > 1e-9 || std::abs(coefficients[d - 1]) > 1e-9)
    throw Error(ErrorCode::NotCentered, "coefficients are not monic and centered");
  std::vector<cplx> deriv(d);
  for (int j = 1; j <= d; ++j) deriv[j - 1] = static_cast<double>(j) * coefficients[j];
  std::vector<cplx> crit = polynomial_roots(deriv);
  return from_critical_data(std::move(crit), coefficients[0]);
}

MarkedPolynomial MarkedPolynomial::linear(cplx origin_image) {
  return MarkedPolynomial({}, origin_image, {origin_image, 1.0});
}

cplx MarkedPolynomial::operator()(cplx z) const { return horner(coefficients_, z); }

cplx MarkedPolynomial::derivative(cplx z) const { return value_and_derivative(z).second; }

std::pair<cplx, cplx> MarkedPolynomial::value_and_derivative(cplx z) const {
  cplx p = coefficients_.back();
  cplx dp = 0.0;
  for (std::size_t i = coefficients_.size() - 1; i-- > 0;) {
    dp = dp * z + p;
    p = p * z + coefficients_[i];
  }
  return {p, dp};
}

double MarkedPolynomial::escape_radius() const { return std::max(2.0, 1.0 + lower_mass_); }

AffineMap AffineMap::compose(const AffineMap& inner) const {
  return AffineMap{scale * inner.scale, scale * inner.offset + offset};
}

AffineMap AffineMap::inverse() const { return AffineMap{1.0 / scale, -offset / scale}; }

std::vector<cplx> critical_values(const MarkedPolynomial& f) {
  std::vector<cplx> out;
  out.reserve(f.critical_points().size());
  for (cplx c : f.critical_points()) out.push_back(f(c));
  return out;
}

Normalization normalize(std::span<const cplx> coefficients) {
  const int d = static_cast<int>(coefficients.size()) - 1;
  if (d < 2) throw Error(ErrorCode::DegreeTooSmall, "degree must be at least 2");
  const cplx lead = coefficients[d];
  if (std::abs(lead) < 1e-300) throw Error(ErrorCode::DegenerateLeadingCoefficient, "leading coefficient vanishes");

  // scale^{d-1} = lead, with arg(scale) in [0, 2pi/(d-1)).
  double arg = std::arg(lead);
  if (arg < 0) arg += 2.0 * std::numbers::pi;
  const cplx scale = std::polar(std::pow(std::abs(lead), 1.0 / (d - 1)), arg / (d - 1));
  const cplx offset = scale * coefficients[d - 1] / (static_cast<double>(d) * lead);
  const AffineMap A{scale, offset};

  // g(w) = scale * p((w - offset) / scale) + offset, composed in polynomial arithmetic.
  const cplx l0 = -offset / scale;
  const cplx l1 = 1.0 / scale;
  std::vector<cplx> acc{coefficients[d]};
  for (int i = d - 1; i >= 0; --i) {
    std::vector<cplx> next(acc.size() + 1, 0.0);
    for (std::size_t k = 0; k < acc.size(); ++k) {
      next[k] += acc[k] * l0;
      next[k + 1] += acc[k] * l1;
    }
    next[0] += coefficients[i];
    acc = std::move(next);
  }
  for (cplx& c : acc) c *= scale;
  acc[0] += offset;
  acc[d] = 1.0;
  acc[d - 1] = 0.0;
  return Normalization{MarkedPolynomial::from_coefficients(acc), A};
}

MarkedPolynomial rotate_conjugate(const MarkedPolynomial& f, int k) {
  const int d = f.degree();
  if (d < 2 || k < 0 || k >= d - 1) throw Error(ErrorCode::InvalidArgument, "rotation index out of range");
  const cplx zeta = std::polar(1.0, 2.0 * std::numbers::pi * k / (d - 1));
  std::vector<cplx> crit(f.critical_points().begin(), f.critical_points().end());
  for (cplx& c : crit) c /= zeta;
  return MarkedPolynomial::from_critical_data(std::move(crit), f.origin_image() / zeta);
}

double coefficient_distance(const MarkedPolynomial& f, const MarkedPolynomial& g) {
  if (f.degree() != g.degree()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (int i = 0; i <= f.degree(); ++i) m = std::max(m, std::abs(f.coefficients()[i] - g.coefficients()[i]));
  return m;
}

std::pair<double, int> rotation_aligned_distance(const MarkedPolynomial& f, const MarkedPolynomial& g) {
  if (f.degree() != g.degree()) return {std::numeric_limits<double>::infinity(), 0};
  std::pair<double, int> best{std::numeric_limits<double>::infinity(), 0};
  for (int k = 0; k < f.degree() - 1; ++k) {
    const double dist = coefficient_distance(f, rotate_conjugate(g, k));
    if (dist < best.first) best = {dist, k};
  }
  return best;
}

cplx horner(std::span<const cplx> coefficients, cplx z) {
  cplx p = 0.0;
  for (std::size_t i = coefficients.size(); i-- > 0;) p = p * z + coefficients[i];
  return p;
}

std::vector<cplx> polynomial_roots(std::span<const cplx> coefficients) {
  std::size_t n = coefficients.size();
  while (n > 1 && coefficients[n - 1] == cplx(0.0)) --n;
  if (n <= 1) return {};
  const int deg = static_cast<int>(n) - 1;
  const cplx lead = coefficients[deg];
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -coefficients[i] / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + deg);

  const std::span<const cplx> poly = coefficients.first(n);
  std::vector<cplx> dpoly(deg);
  for (int j = 1; j <= deg; ++j) dpoly[j - 1] = static_cast<double>(j) * poly[j];
  for (cplx& r : roots) {
    for (int it = 0; it < 8; ++it) {
      const cplx p = horner(poly, r);
      const cplx dp = horner(dpoly, r);
      if (std::abs(dp) < 1e-300) break;
      const cplx step = p / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      // Only accept steps that reduce the residual; multiple roots stall here.
      const cplx candidate = r - step;
      if (std::abs(horner(poly, candidate)) >= std::abs(p)) break;
      r = candidate;
    }
  }
  return roots;
}

std::vector<std::size_t> match_multisets(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "multiset sizes differ");
  const std::size_t n = a.size();
  std::vector<std::size_t> result(n, 0);
  std::vector<bool> used_a(n, false), used_b(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used_a[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (used_b[j]) continue;
        const double dist = std::abs(a[i] - b[j]);
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    used_a[bi] = used_b[bj] = true;
    result[bi] = bj;
  }
  return result;
}

double multiset_distance(std::span<const cplx> a, std::span<const cplx> b) {
  const auto match = match_multisets(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[match[i]]));
  return m;
}

}  // namespace basinlab
