#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "basinlab/poly_core.hpp"

namespace basinlab {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Marking coordinates (c_1, ..., c_{d-2}, a); c_{d-1} is eliminated by
/// centering.
CVector marking_coordinates(const MarkedPolynomial& f);
MarkedPolynomial from_marking_coordinates(const CVector& x, int degree);

/// d(f(c_1), ..., f(c_{d-1})) / d(c_1, ..., c_{d-2}, a), computed from the
/// polynomials Q_j(z) = d f(z) / d c_j = -int_0^z d prod_{m != j}(w - c_m) dw.
CMatrix jacobian_nu(const MarkedPolynomial& f);

/// Ratio of extreme singular values; +inf for a singular matrix.
double condition_number(const CMatrix& m);

struct ContinuationConfig {
  double initial_step = 1e-2;
  double growth = 1.5;
  double shrink = 0.5;
  double min_step = 1e-12;
  /// Accepted steps must reach this residual in the max norm.
  double residual_tol = 1e-8;
  /// A step this small, or a Jacobian condition number above cond_limit,
  /// is treated as a near-collision of critical points.
  double collapse_step = 1e-6;
  double cond_limit = 1e10;
  /// Size of the lateral offset applied to the target path past a
  /// near-collision.
  double lateral = 1e-9;
  int max_newton = 8;
  int max_steps = 200000;
};

/// A path of target critical values, s in [0, 1].
using CriticalValuePath = std::function<std::vector<cplx>(double)>;

struct LiftStep {
  double s;
  MarkedPolynomial poly;
  double residual;  // max_i |f(c_i) - v_i(s)|
};

struct LiftedPath {
  enum class Status { Complete, Stalled, BranchSingular };
  std::vector<LiftStep> steps;
  Status status = Status::Complete;
  /// Parameter where the path stalled, or of the first near-collision.
  double status_s = 0.0;
  /// All parameters where a lateral offset was switched on.
  std::vector<double> branch_parameters;
  double last_residual = 0.0;

  bool reached_end() const { return status != Status::Stalled; }
};

const char* to_string(LiftedPath::Status s);

/// Tracks nu(p(s)) = v(s) from p0 (which must satisfy nu(p0) = v(0) to 1e-8)
/// by a Newton-step predictor and Newton corrector in marking coordinates,
/// with a residual-based trust region. Never throws on numerical trouble: a
/// stalled lift is returned partially.
LiftedPath lift_critical_value_path(const MarkedPolynomial& p0, const CriticalValuePath& v,
                                    const ContinuationConfig& cfg = {});

/// Newton on nu(p) = target from p (marking coordinates). Returns the final
/// polynomial and max-norm residual.
std::pair<MarkedPolynomial, double> newton_critical_values(const MarkedPolynomial& p, const std::vector<cplx>& target,
                                                           int max_iter = 20);

/// Monic centered polynomial of the given degree with critical values
/// `target` (in marking order), by Newton from deterministic random starts
/// scaled to the target. nullopt when no start converges.
std::optional<MarkedPolynomial> solve_critical_values(int degree, const std::vector<cplx>& target, int attempts = 400);

}  // namespace basinlab
