#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "basinlab/escape.hpp"

namespace basinlab {

/// quadratic: pixel (x, y) is z^2 + c with c = x + iy.
/// cubic: the slice c_1 = x + i cubic_c1_imag, c_2 = -c_1,
/// origin image a = y + i cubic_a_imag.
enum class ParameterPlane { Quadratic, CubicSlice };

/// M: max critical escape rate. Green: G at `point`. LevelIndex: level index
/// of height t. InB / InS: membership (1 or 0) in B(f, t) and S(f, t) for a
/// reference f with M(f) <= t; quadratic plane only.
enum class RasterQuantity { M, Green, LevelIndex, InB, InS };

ParameterPlane parse_plane(const std::string& name);
RasterQuantity parse_quantity(const std::string& name);
const char* to_string(RasterQuantity q);

struct RasterJob {
  ParameterPlane plane = ParameterPlane::Quadratic;
  double x_min = -2.0, x_max = 0.5;
  double y_min = -1.25, y_max = 1.25;
  int width = 256;
  int height = 256;
  RasterQuantity quantity = RasterQuantity::M;
  double t = 1.0;
  cplx point{0.0, 0.0};
  double cubic_c1_imag = 0.0;
  double cubic_a_imag = 0.0;
  EscapeConfig escape{1e-12, 2000};
  /// Output files; empty to skip.
  std::string ppm_path;
  std::string csv_path;
};

/// Row-major values, row 0 at y_max. Inconclusive pixels hold -1.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * width + ix]; }
};

/// The parameter value at the centre of pixel (ix, iy).
cplx pixel_center(const RasterJob& job, int ix, int iy);
MarkedPolynomial plane_polynomial(const RasterJob& job, double x, double y);

/// Evaluates every pixel, in parallel up to BASINLAB_THREADS threads, and
/// writes the requested outputs. The result does not depend on the thread
/// count.
Raster raster(const RasterJob& job);

std::array<std::uint8_t, 3> pixel_color(RasterQuantity q, double value);
void write_ppm(std::ostream& out, const Raster& r, RasterQuantity q);
void write_csv(std::ostream& out, const Raster& r, const RasterJob& job);

/// Threads to use: hardware concurrency capped by BASINLAB_THREADS.
int raster_threads();

}  // namespace basinlab
