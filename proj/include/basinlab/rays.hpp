#pragma once

#include <iosfwd>
#include <vector>

#include "basinlab/escape.hpp"

namespace basinlab {

struct RayConfig {
  EscapeConfig escape;
  /// Flat distance at which a zero of omega counts as hit.
  double sing_radius = 1e-5;
  int max_steps = 100000;
};

enum class RayStatus { ReachedTargetHeight, HitSingularity, StepLimit };

const char* to_string(RayStatus s);

struct RaySample {
  double height;
  cplx z;
};

struct RayTrace {
  double angle = 0.0;
  std::vector<RaySample> samples;  // heights strictly decreasing
  RayStatus status = RayStatus::ReachedTargetHeight;
  cplx singularity{0.0, 0.0};      // set for HitSingularity
  double singularity_height = 0.0;
};

/// Height above which the Boettcher map is replaced by the identity; chosen
/// so that |phi(z) - z| is below double resolution there.
double top_height(const Basin& basin);

/// Walks down one external ray. Starts at the top height and stops either at a
/// requested height or at a zero of omega. Used directly by the grid
/// construction of truncated basins, which needs points at prescribed heights.
class RayWalker {
 public:
  /// Positioned on the ray at max(top_height, start).
  RayWalker(const Basin& basin, double theta, const RayConfig& cfg = {}, double start = 0.0);

  double height() const { return h_; }
  cplx point() const { return z_; }
  double angle() const { return theta_; }
  int steps() const { return steps_; }
  cplx singularity() const { return sing_; }
  double singularity_height() const { return sing_h_; }

  /// Descends to `target` < height(). Accepted intermediate points are
  /// appended to `record` when non-null. Throws NewtonDivergence when the
  /// step underflows 1e-12.
  RayStatus descend_to(double target, std::vector<RaySample>* record = nullptr);

 private:
  const Basin& basin_;
  RayConfig cfg_;
  double theta_;
  double h_;
  cplx z_;
  double step_;
  int steps_ = 0;
  cplx sing_{0.0, 0.0};
  double sing_h_ = 0.0;
};

struct FlowResult {
  cplx z{0.0, 0.0};
  double height = 0.0;
  bool hit_zero = false;  // stopped within sing_radius of a zero of omega
  NearbyZero zero;
};

/// Moves z along its gradient line of G (up or down, keeping the external
/// angle) until G reaches `target`, or until the line passes within
/// sing_radius of a zero of omega.
FlowResult flow_to_height(const Basin& basin, cplx z, double target, const RayConfig& cfg = {});

/// Traces the ray of angle theta from the height M(f)+1 down to h_stop.
RayTrace trace_ray(const Basin& basin, double theta, double h_stop, const RayConfig& cfg = {});
RayTrace trace_ray(const MarkedPolynomial& f, double theta, double h_stop, const RayConfig& cfg = {});

struct AngleResult {
  double angle = 0.0;  // in [0, 2pi); first candidate when ambiguous
  bool ambiguous = false;
  /// Angles of the rays leaving the obstructing zero upward, sorted.
  std::vector<double> candidates;
  cplx zero{0.0, 0.0};
  double zero_height = 0.0;
};

/// External angle of an escaping point, resolved by flowing up the gradient of
/// G to the top height and choosing the branch of arg(f^n(z))/d^n nearest the
/// angle found there. Non-throwing; reports ambiguity when the upward flow
/// meets a zero of omega within sing_radius.
AngleResult angle_candidates(const Basin& basin, cplx z, const RayConfig& cfg = {});

class AmbiguousAngle : public Error {
 public:
  AmbiguousAngle(std::vector<double> candidates, cplx zero, double height);
  const std::vector<double>& candidates() const { return candidates_; }
  cplx zero() const { return zero_; }
  double zero_height() const { return height_; }

 private:
  std::vector<double> candidates_;
  cplx zero_;
  double height_;
};

/// Throws NotInBasin for non-escaping z and AmbiguousAngle on singular leaves.
double external_angle(const Basin& basin, cplx z, const RayConfig& cfg = {});
double external_angle(const MarkedPolynomial& f, cplx z, const RayConfig& cfg = {});

/// phi_f(z) = exp(G(z) + i * angle(z)). Throws BelowCriticalHeight when
/// G(z) <= M(f) + 1e-9.
cplx bottcher(const Basin& basin, cplx z, const RayConfig& cfg = {});
cplx bottcher(const MarkedPolynomial& f, cplx z, const RayConfig& cfg = {});

/// The angles 2 pi k / (d-1) of the rays fixed by f.
std::vector<double> fixed_rays(int degree);

/// Wraps an angle into [0, 2pi).
double wrap_angle(double theta);
/// Signed difference a - b wrapped into (-pi, pi].
double angle_difference(double a, double b);

/// CSV with header theta,height,re,im,status.
void write_ray_csv(std::ostream& out, const RayTrace& trace);

}  // namespace basinlab
