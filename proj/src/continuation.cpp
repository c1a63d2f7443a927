#include "basinlab/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SVD>

namespace basinlab {

namespace {

std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> p{1.0};
  for (cplx r : roots) {
    std::vector<cplx> next(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      next[k + 1] += p[k];
      next[k] -= r * p[k];
    }
    p = std::move(next);
  }
  return p;
}

CVector to_vector(const std::vector<cplx>& v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

double max_norm(const CVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

CVector value_residual(const MarkedPolynomial& f, const CVector& target) {
  const std::vector<cplx> vals = critical_values(f);
  return target - to_vector(vals);
}

}  // namespace

const char* to_string(LiftedPath::Status s) {
  switch (s) {
    case LiftedPath::Status::Complete: return "complete";
    case LiftedPath::Status::Stalled: return "stalled";
    case LiftedPath::Status::BranchSingular: return "branch_singular";
  }
  return "unknown";
}

CVector marking_coordinates(const MarkedPolynomial& f) {
  const int d = f.degree();
  CVector x(d - 1);
  for (int i = 0; i < d - 2; ++i) x[i] = f.critical_points()[i];
  x[d - 2] = f.origin_image();
  return x;
}

MarkedPolynomial from_marking_coordinates(const CVector& x, int degree) {
  std::vector<cplx> c(degree - 1);
  cplx sum = 0.0;
  for (int i = 0; i < degree - 2; ++i) {
    c[i] = x[i];
    sum += x[i];
  }
  c[degree - 2] = -sum;
  return MarkedPolynomial::from_critical_data(std::move(c), x[degree - 2]);
}

CMatrix jacobian_nu(const MarkedPolynomial& f) {
  const int d = f.degree();
  const auto cps = f.critical_points();
  // Q_j as coefficient vectors.
  std::vector<std::vector<cplx>> q(d - 1);
  for (int j = 0; j < d - 1; ++j) {
    std::vector<cplx> others;
    for (int m = 0; m < d - 1; ++m)
      if (m != j) others.push_back(cps[m]);
    const std::vector<cplx> p = poly_from_roots(others);
    q[j].assign(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) q[j][k + 1] = -static_cast<double>(d) * p[k] / static_cast<double>(k + 1);
  }
  CMatrix jac(d - 1, d - 1);
  for (int i = 0; i < d - 1; ++i) {
    const cplx last = horner(q[d - 2], cps[i]);
    for (int j = 0; j < d - 2; ++j) jac(i, j) = horner(q[j], cps[i]) - last;
    jac(i, d - 2) = 1.0;
  }
  return jac;
}

double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 1.0;
  const double lo = sv[sv.size() - 1];
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / lo;
}

std::pair<MarkedPolynomial, double> newton_critical_values(const MarkedPolynomial& p, const std::vector<cplx>& target,
                                                           int max_iter) {
  const int d = p.degree();
  const CVector t = to_vector(target);
  CVector x = marking_coordinates(p);
  MarkedPolynomial cur = p;
  double res = max_norm(value_residual(cur, t));
  for (int it = 0; it < max_iter && res > 1e-15 * std::max(1.0, max_norm(t)); ++it) {
    const CVector dx = jacobian_nu(cur).fullPivLu().solve(value_residual(cur, t));
    const CVector xn = x + dx;
    const MarkedPolynomial next = from_marking_coordinates(xn, d);
    const double rn = max_norm(value_residual(next, t));
    if (!(rn < res)) break;
    x = xn;
    cur = next;
    res = rn;
  }
  return {cur, res};
}

LiftedPath lift_critical_value_path(const MarkedPolynomial& p0, const CriticalValuePath& v,
                                    const ContinuationConfig& cfg) {
  const int d = p0.degree();
  LiftedPath path;
  const double res0 = max_norm(value_residual(p0, to_vector(v(0.0))));
  if (res0 > 1e-8) throw Error(ErrorCode::InvalidArgument, "initial polynomial does not match v(0)");
  path.steps.push_back({0.0, p0, res0});

  CVector x = marking_coordinates(p0);
  MarkedPolynomial cur = p0;
  double s = 0.0;
  double h = cfg.initial_step;
  bool lateral_on = false;
  CVector lateral_dir;

  auto target_at = [&](double sv) {
    CVector t = to_vector(v(sv));
    if (lateral_on) t += cfg.lateral * lateral_dir;
    return t;
  };
  auto switch_lateral = [&]() {
    const double ds = 1e-6;
    const double s1 = std::min(1.0, s + ds);
    const double s0 = s1 - ds;
    CVector dir = cplx(0.0, 1.0) * (to_vector(v(s1)) - to_vector(v(s0)));
    if (dir.norm() == 0.0) dir = CVector::Constant(d - 1, cplx(0.0, 1.0));
    lateral_dir = dir / max_norm(dir);
    lateral_on = true;
    path.branch_parameters.push_back(s);
  };

  for (int count = 0; s < 1.0; ++count) {
    if (count >= cfg.max_steps) {
      path.status = LiftedPath::Status::Stalled;
      path.status_s = s;
      path.last_residual = path.steps.back().residual;
      return path;
    }
    h = std::min(h, 1.0 - s);
    const double s_new = 1.0 - s - h < 1e-15 ? 1.0 : s + h;
    const CVector t = target_at(s_new);

    const CMatrix jac = jacobian_nu(cur);
    if (!lateral_on && condition_number(jac) > cfg.cond_limit) {
      switch_lateral();
      continue;
    }
    const CVector x_pred = x + jac.fullPivLu().solve(value_residual(cur, t));
    CVector xk = x_pred;
    bool ok = false;
    MarkedPolynomial pk = from_marking_coordinates(xk, d);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= cfg.max_newton; ++it) {
      const CVector r = value_residual(pk, t);
      const double rn = max_norm(r);
      if (!std::isfinite(rn) || rn >= prev) break;
      if (rn <= 0.01 * cfg.residual_tol) {
        ok = true;
        break;
      }
      prev = rn;
      if (it == cfg.max_newton) break;
      xk += jacobian_nu(pk).fullPivLu().solve(r);
      pk = from_marking_coordinates(xk, d);
    }
    if (ok && (xk - x_pred).norm() > 0.5 * (x_pred - x).norm() + 1e-12) ok = false;

    if (ok) {
      x = xk;
      cur = pk;
      s = s_new;
      path.steps.push_back({s, cur, max_norm(value_residual(cur, to_vector(v(s))))});
      h *= cfg.growth;
    } else {
      h *= cfg.shrink;
      if (h < cfg.collapse_step && !lateral_on) switch_lateral();
      if (h < cfg.min_step) {
        path.status = LiftedPath::Status::Stalled;
        path.status_s = s;
        path.last_residual = path.steps.back().residual;
        return path;
      }
    }
  }

  if (lateral_on) {
    auto [fixed, res] = newton_critical_values(cur, v(1.0));
    path.steps.back().poly = fixed;
    path.steps.back().residual = res;
    path.status = LiftedPath::Status::BranchSingular;
    path.status_s = path.branch_parameters.front();
  }
  path.last_residual = path.steps.back().residual;
  return path;
}

std::optional<MarkedPolynomial> solve_critical_values(int degree, const std::vector<cplx>& target, int attempts) {
  if (degree < 2 || static_cast<int>(target.size()) != degree - 1)
    throw Error(ErrorCode::InvalidArgument, "need degree-1 target critical values");
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  double scale = 1.0;
  for (cplx v : target) scale = std::max(scale, std::abs(v));
  const double spread = std::pow(scale, 1.0 / degree);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    CVector x(degree - 1);
    for (int i = 0; i < degree - 1; ++i) x[i] = spread * cplx(normal(rng), normal(rng));
    x[degree - 2] = scale * cplx(normal(rng), normal(rng));
    auto [p, res] = newton_critical_values(from_marking_coordinates(x, degree), target, 60);
    if (res <= 1e-13 * scale) return p;
  }
  return std::nullopt;
}

}  // namespace basinlab
