#pragma once

#include <optional>
#include <vector>

#include "basinlab/continuation.hpp"
#include "basinlab/levels.hpp"

namespace basinlab {

/// Base surface of a local model, kept in two forms: the embedded 1-form
/// i sum_j r_j dz / (z - q_j) on the plane, with the central leaf through the
/// positive real point where sum_j r_j log|z - q_j| = 0, and the slit-rectangle
/// data read off along that leaf.
struct LocalModelSurface {
  /// Heights (a, central, b) in the normalization where leaves have length 2 pi.
  double band_low = 0.0;
  double central_height = 0.0;
  double band_high = 0.0;
  std::vector<cplx> poles;
  std::vector<double> residues;
  /// Angles along the central leaf (measured from the marked point) where the
  /// leaf meets a zero of the form, and the induced identification of slits.
  std::vector<double> slit_angles;
  std::vector<int> slit_permutation;
  bool central_leaf_singular = false;

  /// The round annulus: one pole at 0 with residue 1, central leaf |z| = 1.
  static LocalModelSurface annulus(double band_low, double central_height, double band_high);
};

/// Throws InvalidArgument when residues are not positive or do not sum to 1
/// within 1e-10, or the slit permutation is not a permutation.
void validate(const LocalModelSurface& base);

/// Point of the central leaf at angle alpha (flat distance alpha from the
/// marked point, in the direction of increasing angle).
cplx central_leaf_point(const LocalModelSurface& base, double alpha);

/// Where an extracted model came from in the source polynomial's plane.
struct ModelSource {
  double height = 0.0;            // t
  cplx domain_point{0.0, 0.0};    // y on the component L of {G = t}
  cplx base_point{0.0, 0.0};      // x = f(y) on f(L)
  double base_angle = 0.0;        // external angle of x
  double component_length = 0.0;  // flat length of L
  double base_length = 0.0;       // flat length of f(L)
  std::vector<cplx> component_polyline;
  std::vector<cplx> base_polyline;
};

struct PointedLocalModelMap {
  int degree = 1;
  MarkedPolynomial representative = MarkedPolynomial::linear(0.0);
  LocalModelSurface base;
  double marked_angle = 0.0;
  /// Angles on the central leaf of the critical values, in marking order.
  /// Empty for unbranched models (critical values at the poles).
  std::vector<double> critical_value_angles;
  std::optional<ModelSource> source;
};

struct LocalModelConfig {
  LevelConfig level;
  /// Cap on the band half-width, as a fraction of t.
  double band_fraction = 0.1;
};

/// The pointed local model maps of f at a generic height t, one per
/// component of {G = t}. Throws NonGenericHeight and InconsistentDegrees.
std::vector<PointedLocalModelMap> extract_local_models(const Basin& basin, double t, const LocalModelConfig& cfg = {});

/// The degree-k monic centered representative. Checks that its critical
/// values lie on the central leaf or at the poles of the base.
MarkedPolynomial local_model_to_polynomial(const PointedLocalModelMap& lm);

/// The pointed local model of a monic centered polynomial over `base`. The
/// critical values of p must lie on the central leaf or at poles.
PointedLocalModelMap restrict_to_base(const MarkedPolynomial& p, const LocalModelSurface& base);

/// A member of LM_k^{k-1}: degree k with its k-1 critical values at the given
/// central-leaf angles. Built by lifting a critical-value path out of the
/// fully ramified z^k + v0. Throws LiftFailure when the lift stalls.
PointedLocalModelMap sample_LMkk1(const LocalModelSurface& base, int k, const std::vector<double>& critical_value_angles,
                                  const ContinuationConfig& cfg = {});

/// Distance between two representatives of the same local model, minimized
/// over precomposition with k-th roots of unity.
double representative_distance(const MarkedPolynomial& p, const MarkedPolynomial& q);

}  // namespace basinlab
