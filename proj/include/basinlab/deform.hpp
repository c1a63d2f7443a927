#pragma once

#include <vector>

#include "basinlab/basin_metric.hpp"
#include "basinlab/local_models.hpp"

namespace basinlab {

enum class BranchPolicy { SmallestAngle, LargestAngle, IndexK };
const char* to_string(BranchPolicy p);

struct BranchChoice {
  BranchPolicy policy = BranchPolicy::SmallestAngle;
  /// Candidate index for IndexK, taken modulo the number of candidates.
  int index = 0;
};

struct BranchEvent {
  double height = 0.0;
  cplx zero_of_omega{0.0, 0.0};
  std::vector<double> candidate_rays;
  double chosen_ray = 0.0;
  BranchPolicy policy = BranchPolicy::SmallestAngle;
};

struct DeformationStep {
  double h = 0.0;
  MarkedPolynomial poly = MarkedPolynomial::linear(0.0);
  double min_critical_height = 0.0;
  double residual = 0.0;
  /// eps_conjugacy of the starting polynomial and this one above t; negative
  /// when not certified.
  double epsilon = -1.0;
};

struct DeformationPath {
  std::vector<DeformationStep> steps;
  std::vector<BranchEvent> branch_events;

  bool empty() const { return steps.empty(); }
  const MarkedPolynomial& final_poly() const { return steps.back().poly; }
};

struct DeformConfig {
  EscapeConfig escape{1e-15, 4000};
  RayConfig ray;
  /// Initial step in h as a fraction of (t - s).
  double initial_fraction = 1.0 / 50.0;
  double min_step = 1e-10;
  int max_newton = 30;
  double newton_tol = 1e-12;
  /// Certify each step with eps_conjugacy on [t, T], T = max(1/t, d t).
  bool certify = false;
  MetricConfig metric{LevelConfig{}, 64, 32, 8, 1, 1e-4};
};

/// Pushes the lowest critical values up their external rays until every
/// critical point has escape rate at least t. Throws NotInShiftLocus, and
/// LiftFailure when the continuation stalls.
DeformationPath push_up(const MarkedPolynomial& f, double t, BranchChoice policy = {}, const DeformConfig& cfg = {});

/// The shift-locus polynomial whose basin above t is that of f and whose
/// local models at t are `replacements` (one per component of {G_f = t}, in
/// the order of extract_local_models). An unbranched replacement of degree
/// k >= 2 keeps f's own critical data inside that component. Throws
/// DegreeMismatch and SolveFailure.
MarkedPolynomial glue_and_extend(const MarkedPolynomial& f, double t, const std::vector<PointedLocalModelMap>& replacements,
                                 const DeformConfig& cfg = {});

struct MembershipConfig {
  MetricConfig metric{LevelConfig{}, 64, 32, 8, 1, 1e-4};
  /// Top of the band; 0 selects max(1/t, d t).
  double T = 0.0;
  /// Height tolerance for S(f, t).
  double height_tol = 1e-4;
};

struct MembershipCertificate {
  Verdict verdict = Verdict::Reject;
  ConjugacyReport report;
  double min_critical_height = 0.0;

  bool member() const { return verdict == Verdict::Accept; }
};

/// g in B(f, t): the bands above t are epsilon-conjugate with epsilon within
/// the accept threshold.
MembershipCertificate in_B(const MarkedPolynomial& f, double t, const MarkedPolynomial& g,
                           const MembershipConfig& cfg = {});

/// g in S(f, t): every critical escape rate is at least t - height_tol and the
/// bands above t + height_tol are epsilon-conjugate.
MembershipCertificate in_S(const MarkedPolynomial& f, double t, const MarkedPolynomial& g,
                           const MembershipConfig& cfg = {});

}  // namespace basinlab
