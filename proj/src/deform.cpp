#include "basinlab/deform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "basinlab/detail/chart.hpp"

namespace basinlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Where one critical point of the unknown polynomial should go: escape rate
// `height` with its critical value on external angle `angle`. In ray mode the
// critical value must coincide with the point of that ray at height d*height;
// otherwise the angle is matched in the chart Log g^n, which only sees it
// modulo 2 pi / d^n.
struct Target {
  double height = 0.0;
  double angle = 0.0;
  bool ray_mode = false;
};

using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Angle of the critical value read in the chart at its own lift level.
double chart_angle(const Basin& basin, cplx c, double height) {
  const int d = basin.degree();
  const int n = detail::lift_level(d, d * height, top_height(basin));
  const cplx w = detail::iterate(basin.poly(), c, n + 1).value;
  return std::arg(w) / std::pow(static_cast<double>(d), n);
}

double scaled_angle_gap(double arg_value, double angle, double dn) {
  const double lifted = std::fmod(angle * dn, kTwoPi);
  return std::remainder(arg_value - lifted, kTwoPi) / dn;
}

RVector residual(const CVector& x, int d, const std::vector<Target>& targets, const DeformConfig& cfg) {
  const MarkedPolynomial g = from_marking_coordinates(x, d);
  const Basin basin(g, cfg.escape);
  const double top = top_height(basin);
  RVector r(2 * (d - 1));
  for (int j = 0; j < d - 1; ++j) {
    const Target& tg = targets[j];
    const cplx c = g.critical_points()[j];
    if (tg.ray_mode) {
      RayWalker walker(basin, tg.angle, cfg.ray);
      bool reached = false;
      try {
        reached = walker.descend_to(d * tg.height) == RayStatus::ReachedTargetHeight;
      } catch (const Error&) {
      }
      if (reached) {
        const cplx w = walker.point();
        const cplx gap = (g(c) - w) * std::abs(basin.sample(w).omega);
        r[2 * j] = gap.real();
        r[2 * j + 1] = gap.imag();
        continue;
      }
    }
    const BasinSample s = basin.sample(c);
    r[2 * j] = (s.escaped() ? s.green : 0.0) - tg.height;
    const int n = detail::lift_level(d, d * tg.height, top);
    const cplx w = detail::iterate(g, c, n + 1).value;
    r[2 * j + 1] = w == cplx(0.0) ? 1.0 : scaled_angle_gap(std::arg(w), tg.angle, std::pow(static_cast<double>(d), n));
  }
  return r;
}

struct Solve {
  CVector x;
  double residual = std::numeric_limits<double>::infinity();
  bool ok = false;
};

// Damped Newton with a central-difference Jacobian on the residual minus
// `shift` (the Newton homotopy offset).
Solve newton(CVector x, int d, const std::vector<Target>& targets, const RVector& shift, const DeformConfig& cfg) {
  const int m = d - 1;
  auto eval = [&](const CVector& y) {
    RVector r = residual(y, d, targets, cfg);
    if (shift.size() == r.size()) r -= shift;
    return r;
  };
  Solve out;
  RVector r = eval(x);
  double rn = r.cwiseAbs().maxCoeff();
  for (int it = 0; it <= cfg.max_newton; ++it) {
    if (!std::isfinite(rn)) break;
    if (rn <= cfg.newton_tol) {
      out.ok = true;
      break;
    }
    if (it == cfg.max_newton) break;
    RMatrix jac(2 * m, 2 * m);
    for (int k = 0; k < m; ++k) {
      const double eta = 1e-7 * std::max(1.0, std::abs(x[k]));
      for (int dir = 0; dir < 2; ++dir) {
        const cplx e = dir == 0 ? cplx(eta, 0.0) : cplx(0.0, eta);
        CVector xp = x, xm = x;
        xp[k] += e;
        xm[k] -= e;
        jac.col(2 * k + dir) = (eval(xp) - eval(xm)) / (2.0 * eta);
      }
    }
    const RVector delta = jac.fullPivLu().solve(-r);
    CVector dx(m);
    for (int k = 0; k < m; ++k) dx[k] = cplx(delta[2 * k], delta[2 * k + 1]);
    bool improved = false;
    for (double lambda = 1.0; lambda > 1e-4; lambda *= 0.5) {
      const CVector xn = x + lambda * dx;
      const RVector rr = eval(xn);
      const double rrn = rr.cwiseAbs().maxCoeff();
      if (rrn < rn) {
        x = xn;
        r = rr;
        rn = rrn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  out.x = x;
  out.residual = rn;
  return out;
}

double min_height(const MarkedPolynomial& g, const EscapeConfig& cfg) {
  double m = std::numeric_limits<double>::infinity();
  for (cplx c : g.critical_points()) {
    const BasinSample s = green(g, c, cfg);
    m = std::min(m, s.escaped() ? s.green : 0.0);
  }
  return m;
}

double choose(const std::vector<double>& candidates, BranchChoice policy) {
  switch (policy.policy) {
    case BranchPolicy::SmallestAngle: return *std::min_element(candidates.begin(), candidates.end());
    case BranchPolicy::LargestAngle: return *std::max_element(candidates.begin(), candidates.end());
    case BranchPolicy::IndexK: {
      const int n = static_cast<int>(candidates.size());
      return candidates[((policy.index % n) + n) % n];
    }
  }
  return candidates.front();
}

// Winding number of a closed polyline around p.
int winding(const std::vector<cplx>& loop, cplx p) {
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) total += std::arg((loop[(i + 1) % loop.size()] - p) / (loop[i] - p));
  return static_cast<int>(std::lround(total / kTwoPi));
}

}  // namespace

const char* to_string(BranchPolicy p) {
  switch (p) {
    case BranchPolicy::SmallestAngle: return "smallest_angle";
    case BranchPolicy::LargestAngle: return "largest_angle";
    case BranchPolicy::IndexK: return "index_k";
  }
  return "unknown";
}

DeformationPath push_up(const MarkedPolynomial& f, double t, BranchChoice policy, const DeformConfig& cfg) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "height must be positive");
  const Basin start(f, cfg.escape);
  if (!start.in_shift_locus()) throw Error(ErrorCode::NotInShiftLocus, "a critical point does not escape");
  const int d = f.degree();
  const int m = d - 1;

  std::vector<Target> targets(m);
  for (int j = 0; j < m; ++j) {
    targets[j].height = start.critical().heights[j];
    targets[j].angle = chart_angle(start, f.critical_points()[j], targets[j].height);
  }
  DeformationPath path;
  const double s0 = *std::min_element(start.critical().heights.begin(), start.critical().heights.end());
  if (s0 >= t - 1e-12) return path;

  const double T = std::max(1.0 / t, d * t);
  auto record = [&](double h, const MarkedPolynomial& g, double res) {
    DeformationStep step;
    step.h = h;
    step.poly = g;
    step.min_critical_height = min_height(g, cfg.escape);
    step.residual = res;
    if (cfg.certify) step.epsilon = eps_conjugacy(start, Basin(g), t, T, cfg.metric).epsilon;
    path.steps.push_back(std::move(step));
  };
  record(s0, f, 0.0);

  CVector x = marking_coordinates(f);
  const double base_step = cfg.initial_fraction * (t - s0);
  for (;;) {
    double s = std::numeric_limits<double>::infinity();
    for (const Target& tg : targets) s = std::min(s, tg.height);
    if (s >= t - 1e-12) break;
    std::vector<int> group;
    double next = t;
    for (int j = 0; j < m; ++j) {
      if (targets[j].height <= s + 1e-9)
        group.push_back(j);
      else
        next = std::min(next, targets[j].height);
    }

    // Fix the ray each lowest critical value will climb.
    const MarkedPolynomial g = from_marking_coordinates(x, d);
    const Basin here(g, cfg.escape);
    for (int j : group) {
      const AngleResult ar = angle_candidates(here, g(g.critical_points()[j]), cfg.ray);
      targets[j].ray_mode = true;
      if (ar.ambiguous) {
        BranchEvent ev;
        ev.height = ar.zero_height;
        ev.zero_of_omega = ar.zero;
        ev.candidate_rays = ar.candidates;
        ev.chosen_ray = choose(ar.candidates, policy);
        ev.policy = policy.policy;
        targets[j].angle = ev.chosen_ray;
        path.branch_events.push_back(std::move(ev));
      } else {
        targets[j].angle = ar.angle;
      }
    }

    double h = s;
    double step = base_step;
    CVector x_prev = x;
    double h_prev = h;
    while (h < next) {
      const double hn = next - h <= step * (1.0 + 1e-9) ? next : h + step;
      for (int j : group) targets[j].height = hn;
      CVector guess = x;
      if (h > h_prev) guess = x + (x - x_prev) * ((hn - h) / (h - h_prev));
      const Solve sol = newton(guess, d, targets, RVector(), cfg);
      const double moved = (sol.x - x).norm();
      const double predicted = (guess - x).norm();
      if (sol.ok && (predicted == 0.0 || (sol.x - guess).norm() <= 0.5 * predicted + 1e-10 || moved < 1e-8)) {
        x_prev = x;
        h_prev = h;
        x = sol.x;
        h = hn;
        record(h, from_marking_coordinates(x, d), sol.residual);
        step = std::min(1.5 * step, 4.0 * base_step);
      } else {
        for (int j : group) targets[j].height = h;
        step *= 0.5;
        if (step < cfg.min_step)
          throw Error(ErrorCode::LiftFailure, "push stalled at h = " + std::to_string(h) +
                                                  ", residual " + std::to_string(sol.residual));
      }
    }
    for (int j : group) targets[j].height = next;
  }
  return path;
}

MarkedPolynomial glue_and_extend(const MarkedPolynomial& f, double t, const std::vector<PointedLocalModelMap>& replacements,
                                 const DeformConfig& cfg) {
  const Basin basin(f);
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "height must be positive");
  if (!basin.is_generic_height(t)) throw Error(ErrorCode::NonGenericHeight, "gluing height is not generic");
  const std::vector<PointedLocalModelMap> models = extract_local_models(basin, t);
  if (replacements.size() != models.size())
    throw Error(ErrorCode::DegreeMismatch, "need one replacement per component of the level set");
  for (std::size_t i = 0; i < models.size(); ++i) {
    const PointedLocalModelMap& rep = replacements[i];
    if (rep.degree != models[i].degree || rep.representative.degree() != rep.degree)
      throw Error(ErrorCode::DegreeMismatch, "replacement degree differs from the local degree");
    if (!rep.critical_value_angles.empty() && static_cast<int>(rep.critical_value_angles.size()) != rep.degree - 1)
      throw Error(ErrorCode::DegreeMismatch, "replacement must carry k-1 critical value angles");
  }

  const int d = f.degree();
  const int m = d - 1;
  const Basin fine(f, cfg.escape);
  auto angle_of = [&](cplx w) {
    const AngleResult ar = angle_candidates(basin, w, cfg.ray);
    return ar.ambiguous ? ar.candidates.front() : ar.angle;
  };

  std::vector<Target> targets(m);
  std::vector<std::vector<int>> inner(models.size());
  for (int j = 0; j < m; ++j) {
    const cplx c = f.critical_points()[j];
    const BasinSample s = fine.sample(c);
    if (s.escaped() && s.green > t) {
      targets[j] = {s.green, angle_of(f(c)), true};
      continue;
    }
    std::size_t owner = models.size();
    for (std::size_t i = 0; i < models.size() && owner == models.size(); ++i)
      if (winding(models[i].source->component_polyline, c) != 0) owner = i;
    if (owner == models.size()) throw Error(ErrorCode::SolveFailure, "critical point below t outside every level component");
    inner[owner].push_back(j);
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    const PointedLocalModelMap& rep = replacements[i];
    if (static_cast<int>(inner[i].size()) != rep.degree - 1)
      throw Error(ErrorCode::DegreeMismatch, "critical points inside a component disagree with its degree");
    if (rep.critical_value_angles.empty()) {
      for (int j : inner[i]) {
        const cplx c = f.critical_points()[j];
        const BasinSample s = fine.sample(c);
        if (!s.escaped())
          throw Error(ErrorCode::SolveFailure, "unbranched replacement over a non-escaping critical point");
        targets[j] = {s.green, angle_of(f(c)), true};
      }
      continue;
    }
    const ModelSource& src = *models[i].source;
    for (std::size_t q = 0; q < inner[i].size(); ++q) {
      const double offset = rep.critical_value_angles[q] * src.base_length / kTwoPi;
      const auto w = follow_leaf(basin, src.base_point, d * t, offset);
      if (!w) throw Error(ErrorCode::SolveFailure, "could not place a critical value on the base leaf");
      targets[inner[i][q]] = {t, angle_of(*w), true};
    }
  }

  auto march = [&](CVector x, const std::function<void(double)>& set, const std::function<RVector(double)>& shift) {
    double lambda = 0.0;
    double step = 0.05;
    while (lambda < 1.0) {
      const double next = std::min(1.0, lambda + step);
      set(next);
      const Solve sol = newton(x, d, targets, shift(next), cfg);
      if (sol.ok) {
        x = sol.x;
        lambda = next;
        step = std::min(0.25, 1.5 * step);
      } else {
        step *= 0.5;
        if (step < 1e-6)
          throw Error(ErrorCode::SolveFailure,
                      "gluing continuation stalled, residual " + std::to_string(sol.residual));
      }
    }
    return x;
  };

  CVector x;
  if (basin.in_shift_locus()) {
    // Newton homotopy r(x) = (1 - lambda) r(x0) from f itself.
    const CVector x0 = marking_coordinates(f);
    const RVector r0 = residual(x0, d, targets, cfg);
    x = march(x0, [](double) {}, [&](double lambda) -> RVector { return (1.0 - lambda) * r0; });
  } else {
    // Start high, where the Bottcher map is nearly the identity, and lower the
    // critical heights with their angles held fixed.
    std::vector<Target> goal = targets;
    double high = 6.0;
    for (const Target& tg : goal) high = std::max(high, 2.0 * tg.height);
    std::vector<cplx> values(m);
    std::vector<double> start_heights(m);
    for (int j = 0; j < m; ++j) {
      start_heights[j] = high + 0.05 * j;
      values[j] = std::exp(cplx(d * start_heights[j], goal[j].angle));
    }
    const auto seed = solve_critical_values(d, values);
    if (!seed) throw Error(ErrorCode::SolveFailure, "no starting polynomial with the prescribed high critical values");
    x = marking_coordinates(*seed);
    auto set = [&](double lambda) {
      for (int j = 0; j < m; ++j)
        targets[j].height = std::exp((1.0 - lambda) * std::log(start_heights[j]) + lambda * std::log(goal[j].height));
    };
    set(0.0);
    const Solve first = newton(x, d, targets, RVector(), cfg);
    if (!first.ok) throw Error(ErrorCode::SolveFailure, "starting polynomial did not converge");
    x = march(first.x, set, [](double) { return RVector(); });
    targets = goal;
  }
  const Solve final = newton(x, d, targets, RVector(), cfg);
  if (!final.ok || final.residual > 1e-10)
    throw Error(ErrorCode::SolveFailure, "gluing residual " + std::to_string(final.residual));
  return from_marking_coordinates(final.x, d);
}

MembershipCertificate in_B(const MarkedPolynomial& f, double t, const MarkedPolynomial& g, const MembershipConfig& cfg) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "height must be positive");
  MembershipCertificate cert;
  cert.min_critical_height = min_height(g, {});
  const double T = cfg.T > 0.0 ? cfg.T : std::max(1.0 / t, f.degree() * t);
  cert.report = eps_conjugacy(Basin(f), Basin(g), t, T, cfg.metric);
  cert.verdict = cert.report.verdict;
  return cert;
}

MembershipCertificate in_S(const MarkedPolynomial& f, double t, const MarkedPolynomial& g, const MembershipConfig& cfg) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "height must be positive");
  MembershipCertificate cert;
  cert.min_critical_height = min_height(g, {});
  const double T = cfg.T > 0.0 ? cfg.T : std::max(1.0 / t, f.degree() * t);
  if (cert.min_critical_height < t - cfg.height_tol) {
    cert.report.epsilon = std::numeric_limits<double>::infinity();
    cert.report.verdict = cert.verdict = Verdict::Reject;
    return cert;
  }
  cert.report = eps_conjugacy(Basin(f), Basin(g), t + cfg.height_tol, T, cfg.metric);
  cert.verdict = cert.report.verdict;
  return cert;
}

}  // namespace basinlab
