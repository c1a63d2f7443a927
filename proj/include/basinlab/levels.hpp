#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "basinlab/rays.hpp"

namespace basinlab {

struct LevelConfig {
  RayConfig ray;
  /// Heights closer than this to a zero of omega are rejected as non-generic.
  double genericity_margin = 1e-7;
  int max_vertices = 200000;
};

/// One connected component of {G = c}.
struct LevelComponent {
  double height = 0.0;
  int level_index = 0;
  /// Closed loop traversed in the direction of increasing external angle; the
  /// first vertex is not repeated at the end.
  std::vector<cplx> polyline;
  double flat_length = 0.0;
  /// Degree of f^l restricted to this loop, l = level_index.
  int map_degree = 0;
  /// Points of the loop that f^l sends to the angle-0 point of the top leaf
  /// {G = d^l c}. There are exactly map_degree of them.
  std::vector<cplx> marked_points;
};

/// min{n >= 0 : d^n c >= M(f)}.
int level_index(const Basin& basin, double c);

/// All components of {G = c}, found by pulling back the angle-0 point of the
/// connected leaf {G = d^l c} and tracing a loop through every preimage.
/// Throws NonGenericHeight when a zero of omega is within the genericity
/// margin of c, SeedMiss when the seed count and winding disagree.
std::vector<LevelComponent> level_components(const Basin& basin, double c, const LevelConfig& cfg = {});

/// Traces the leaf of {G = G(start)} through `start` (first corrected onto
/// height `c`). marked_points and map_degree are filled from the winding of
/// f^l along the loop.
LevelComponent trace_level(const Basin& basin, cplx start, double c, const LevelConfig& cfg = {});

/// The point reached by moving `offset` (in angle, i.e. flat length) along the
/// leaf of {G = c} through z in the direction of increasing angle, with steps
/// shortened near zeros of omega. nullopt when the walk fails.
std::optional<cplx> follow_leaf(const Basin& basin, cplx z, double c, double offset, const LevelConfig& cfg = {});

/// Modulus (b - a) 2 pi / length of the flat cylinder formed by the component
/// of {a < G < b} through `seed`. Throws ContainsSingularity when that
/// component contains a zero of omega.
double annulus_modulus(const Basin& basin, double a, double b, cplx seed, const LevelConfig& cfg = {});

/// CSV, one row per vertex:
/// component_id,height,level_index,degree,length,vertex,re,im
void write_level_csv(std::ostream& out, const std::vector<LevelComponent>& components);

}  // namespace basinlab
