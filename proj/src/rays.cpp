#include "basinlab/rays.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>

#include "basinlab/detail/chart.hpp"

namespace basinlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxAmbiguityDepth = 3;

std::vector<double> dedupe_angles(std::vector<double> angles) {
  for (double& a : angles) a = wrap_angle(a);
  std::sort(angles.begin(), angles.end());
  std::vector<double> out;
  for (double a : angles) {
    if (!out.empty() && std::abs(angle_difference(a, out.back())) < 1e-6) continue;
    if (!out.empty() && std::abs(angle_difference(a, out.front())) < 1e-6) continue;
    out.push_back(a);
  }
  return out;
}

AngleResult angle_impl(const Basin& basin, cplx z, const RayConfig& cfg, int depth);

// Angles of the rays leaving the zero zeta upward. Each upward sector is found
// as a local maximum of G on a small circle around zeta; the sample point's
// angle is then corrected by the angular offset Im(F(p) - F(zeta)).
std::vector<double> upward_angles(const Basin& basin, cplx zeta, double zero_height, const RayConfig& cfg,
                                  int depth) {
  const MarkedPolynomial& f = basin.poly();
  double r = 1e-12 * std::max(1.0, std::abs(zeta));
  for (int i = 0; i < 120; ++i) {
    if (segment_flat_length(f, zeta, zeta + r, cfg.escape) >= 20.0 * cfg.sing_radius) break;
    r *= 2.0;
  }
  constexpr int kProbes = 360;
  std::vector<cplx> pts(kProbes);
  std::vector<double> g(kProbes);
  for (int j = 0; j < kProbes; ++j) {
    pts[j] = zeta + std::polar(r, kTwoPi * j / kProbes);
    g[j] = basin.sample(pts[j]).green;
  }
  std::vector<double> out;
  for (int j = 0; j < kProbes; ++j) {
    const double prev = g[(j + kProbes - 1) % kProbes];
    const double next = g[(j + 1) % kProbes];
    if (!(g[j] > zero_height && g[j] >= prev && g[j] > next)) continue;
    const AngleResult a = angle_impl(basin, pts[j], cfg, depth + 1);
    if (a.ambiguous) {
      out.insert(out.end(), a.candidates.begin(), a.candidates.end());
    } else {
      const double offset = chart_increment(f, zeta, pts[j], cfg.escape).imag();
      out.push_back(a.angle - offset);
    }
  }
  return dedupe_angles(std::move(out));
}

AngleResult ambiguous_result(const Basin& basin, const NearbyZero& nz, const RayConfig& cfg, int depth) {
  AngleResult res;
  res.ambiguous = true;
  res.zero = nz.location;
  res.zero_height = nz.height;
  if (depth < kMaxAmbiguityDepth) res.candidates = upward_angles(basin, nz.location, nz.height, cfg, depth);
  res.angle = res.candidates.empty() ? 0.0 : res.candidates.front();
  return res;
}

AngleResult angle_impl(const Basin& basin, cplx z, const RayConfig& cfg, int depth) {
  const MarkedPolynomial& f = basin.poly();
  const BasinSample s = basin.sample(z);
  if (!s.escaped()) throw Error(ErrorCode::NotInBasin, "point does not escape");

  const NearbyZero here = nearest_zero(basin, z, cfg.sing_radius);
  if (here.found && here.flat_distance < cfg.sing_radius) return ambiguous_result(basin, here, cfg, depth);

  const double top = top_height(basin);
  AngleResult res;
  if (s.green >= top) {
    res.angle = wrap_angle(std::arg(z));
    return res;
  }
  const int d = f.degree();
  const int n0 = detail::lift_level(d, s.green, top);
  const double scale0 = std::pow(static_cast<double>(d), n0);
  const double base_angle = std::arg(detail::iterate(f, z, n0).value) / scale0;

  const FlowResult up = flow_to_height(basin, z, top, cfg);
  if (up.hit_zero) return ambiguous_result(basin, up.zero, cfg, depth);
  const cplx zc = up.z;
  const double top_angle = std::arg(zc);
  const double m = std::round((top_angle - base_angle) * scale0 / kTwoPi);
  res.angle = wrap_angle(base_angle + kTwoPi * m / scale0);
  return res;
}

}  // namespace

FlowResult flow_to_height(const Basin& basin, cplx z, double target, const RayConfig& cfg) {
  const MarkedPolynomial& f = basin.poly();
  const int d = f.degree();
  const double top = top_height(basin);
  const BasinSample s = basin.sample(z);
  if (!s.escaped()) throw Error(ErrorCode::NotInBasin, "point does not escape");
  if (!(target > 0.0)) throw Error(ErrorCode::InvalidArgument, "target height must be positive");

  FlowResult res;
  res.z = z;
  res.height = s.green;
  const double sign = target > s.green ? 1.0 : -1.0;
  double step = detail::max_height_step(s.green);
  for (int steps = 0; sign * (target - res.height) > 0.0; ++steps) {
    if (steps >= cfg.max_steps) throw Error(ErrorCode::StepLimit, "gradient flow exceeded max_steps");
    const double hc = res.height;
    double delta = std::min({step, detail::max_height_step(hc), std::abs(target - hc)});
    if (!basin.zero_heights(hc - 2.0 * delta, hc + 2.0 * delta).empty()) {
      const NearbyZero nz = nearest_zero(basin, res.z, 2.0 * delta + cfg.sing_radius);
      if (nz.found) {
        if (nz.flat_distance < cfg.sing_radius) {
          res.hit_zero = true;
          res.zero = nz;
          return res;
        }
        delta = std::min(delta, 0.5 * nz.flat_distance);
      }
    }
    const bool last = delta >= std::abs(target - hc);
    const double move = last ? target - hc : sign * delta;
    const int n = detail::lift_level(d, std::min(hc, hc + move), top);
    const double scale = std::pow(static_cast<double>(d), n);
    const cplx goal = std::log(detail::iterate(f, res.z, n).value) + scale * move;
    const cplx guess = res.z + cplx(0.0, move) / basin.sample(res.z).omega;
    const std::optional<cplx> next = detail::solve_chart(f, guess, n, goal);
    if (next && detail::increment_matches(f, res.z, *next, move, scale, cfg.escape)) {
      res.z = *next;
      res.height = last ? target : hc + move;
      step = 1.5 * delta;
    } else {
      step = 0.5 * delta;
      if (step < 1e-12) throw Error(ErrorCode::NewtonDivergence, "gradient flow step underflow");
    }
  }
  return res;
}

const char* to_string(RayStatus s) {
  switch (s) {
    case RayStatus::ReachedTargetHeight: return "reached_target_height";
    case RayStatus::HitSingularity: return "hit_singularity";
    case RayStatus::StepLimit: return "step_limit";
  }
  return "unknown";
}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double angle_difference(double a, double b) { return std::remainder(a - b, kTwoPi); }

double top_height(const Basin& basin) {
  return std::max(20.0, std::log(basin.poly().escape_radius()) + 12.0);
}

RayWalker::RayWalker(const Basin& basin, double theta, const RayConfig& cfg, double start)
    : basin_(basin), cfg_(cfg), theta_(wrap_angle(theta)) {
  h_ = std::max(top_height(basin), start);
  const cplx target(h_, theta_);
  z_ = detail::solve_chart(basin.poly(), std::exp(target), 0, target).value_or(std::exp(target));
  step_ = detail::max_height_step(h_);
}

RayStatus RayWalker::descend_to(double target, std::vector<RaySample>* record) {
  const MarkedPolynomial& f = basin_.poly();
  const int d = f.degree();
  const double top = top_height(basin_);
  while (h_ > target) {
    if (steps_ >= cfg_.max_steps) return RayStatus::StepLimit;
    double delta = std::min({step_, h_ - target, detail::max_height_step(h_)});
    if (!basin_.zero_heights(h_ - 2.0 * delta, h_ + 2.0 * delta).empty()) {
      const NearbyZero nz = nearest_zero(basin_, z_, 2.0 * delta + cfg_.sing_radius);
      if (nz.found) {
        if (nz.flat_distance < cfg_.sing_radius) {
          sing_ = nz.location;
          sing_h_ = nz.height;
          return RayStatus::HitSingularity;
        }
        delta = std::min(delta, 0.5 * nz.flat_distance);
      }
    }
    const double hn = h_ - delta <= target + 1e-15 * target ? target : h_ - delta;
    const int n = detail::lift_level(d, hn, top);
    const double scale = std::pow(static_cast<double>(d), n);
    const cplx goal = scale * cplx(hn, theta_);
    const cplx guess = z_ - cplx(0.0, h_ - hn) / basin_.sample(z_).omega;
    const std::optional<cplx> next = detail::solve_chart(f, guess, n, goal);
    if (next && detail::increment_matches(f, z_, *next, hn - h_, scale, cfg_.escape)) {
      z_ = *next;
      h_ = hn;
      ++steps_;
      if (record) record->push_back({h_, z_});
      step_ = 1.5 * delta;
    } else {
      step_ = 0.5 * delta;
      if (step_ < 1e-12) throw Error(ErrorCode::NewtonDivergence, "ray step underflow");
    }
  }
  return RayStatus::ReachedTargetHeight;
}

RayTrace trace_ray(const Basin& basin, double theta, double h_stop, const RayConfig& cfg) {
  if (!(h_stop > 0.0)) throw Error(ErrorCode::InvalidArgument, "h_stop must be positive");
  const double start = std::max(basin.max_escape_rate() + 1.0, h_stop);
  RayWalker walker(basin, theta, cfg, start);
  RayTrace trace;
  trace.angle = walker.angle();
  if (walker.height() > start) walker.descend_to(start);
  trace.samples.push_back({walker.height(), walker.point()});
  trace.status = walker.descend_to(h_stop, &trace.samples);
  if (trace.status == RayStatus::HitSingularity) {
    trace.singularity = walker.singularity();
    trace.singularity_height = walker.singularity_height();
  }
  return trace;
}

RayTrace trace_ray(const MarkedPolynomial& f, double theta, double h_stop, const RayConfig& cfg) {
  return trace_ray(Basin(f, cfg.escape), theta, h_stop, cfg);
}

AngleResult angle_candidates(const Basin& basin, cplx z, const RayConfig& cfg) {
  return angle_impl(basin, z, cfg, 0);
}

AmbiguousAngle::AmbiguousAngle(std::vector<double> candidates, cplx zero, double height)
    : Error(ErrorCode::OnSingularLeafAmbiguous, "point lies on a singular leaf"),
      candidates_(std::move(candidates)),
      zero_(zero),
      height_(height) {}

double external_angle(const Basin& basin, cplx z, const RayConfig& cfg) {
  AngleResult r = angle_impl(basin, z, cfg, 0);
  if (r.ambiguous) throw AmbiguousAngle(std::move(r.candidates), r.zero, r.zero_height);
  return r.angle;
}

double external_angle(const MarkedPolynomial& f, cplx z, const RayConfig& cfg) {
  return external_angle(Basin(f, cfg.escape), z, cfg);
}

cplx bottcher(const Basin& basin, cplx z, const RayConfig& cfg) {
  const BasinSample s = basin.sample(z);
  if (!s.escaped()) throw Error(ErrorCode::NotInBasin, "point does not escape");
  if (s.green <= basin.max_escape_rate() + 1e-9)
    throw Error(ErrorCode::BelowCriticalHeight, "Boettcher map requested below the critical height");
  return std::polar(std::exp(s.green), external_angle(basin, z, cfg));
}

cplx bottcher(const MarkedPolynomial& f, cplx z, const RayConfig& cfg) {
  return bottcher(Basin(f, cfg.escape), z, cfg);
}

std::vector<double> fixed_rays(int degree) {
  if (degree < 2) throw Error(ErrorCode::DegreeTooSmall, "degree must be at least 2");
  std::vector<double> out;
  for (int k = 0; k < degree - 1; ++k) out.push_back(kTwoPi * k / (degree - 1));
  return out;
}

void write_ray_csv(std::ostream& out, const RayTrace& trace) {
  out << "theta,height,re,im,status\n";
  out.precision(17);
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const RaySample& s = trace.samples[i];
    const bool last = i + 1 == trace.samples.size() && trace.status != RayStatus::HitSingularity;
    out << trace.angle << ',' << s.height << ',' << s.z.real() << ',' << s.z.imag() << ','
        << (last ? to_string(trace.status) : "sample") << '\n';
  }
  if (trace.status == RayStatus::HitSingularity)
    out << trace.angle << ',' << trace.singularity_height << ',' << trace.singularity.real() << ','
        << trace.singularity.imag() << ',' << to_string(trace.status) << '\n';
}

}  // namespace basinlab
