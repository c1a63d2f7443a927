#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "basinlab/error.hpp"
#include "basinlab/raster.hpp"
#include "oracles.hpp"

using namespace basinlab;

namespace {

std::string csv_of(const RasterJob& job, const Raster& r) {
  std::ostringstream os;
  write_csv(os, r, job);
  return os.str();
}

std::string ppm_of(const RasterJob& job, const Raster& r) {
  std::ostringstream os;
  write_ppm(os, r, job.quantity);
  return os.str();
}

}  // namespace

TEST_CASE("single pixel at c = 0") {
  RasterJob job;
  job.x_min = job.y_min = -1e-3;
  job.x_max = job.y_max = 1e-3;
  job.width = job.height = 1;
  const Raster r = raster(job);
  CHECK(r.values.size() == 1);
  CHECK(r.values[0] == 0.0);
}

TEST_CASE("M raster of the quadratic plane") {
  RasterJob job;
  job.x_min = -2.5;
  job.x_max = 1.5;
  job.y_min = -2.0;
  job.y_max = 2.0;
  job.width = job.height = 64;
  const Raster r = raster(job);
  auto at = [&](double x, double y) {
    const int ix = static_cast<int>((x - job.x_min) / (job.x_max - job.x_min) * job.width);
    const int iy = static_cast<int>((job.y_max - y) / (job.y_max - job.y_min) * job.height);
    return r.at(ix, iy);
  };
  CHECK(at(0.0, 0.0) == 0.0);
  CHECK(at(-1.0, 0.0) == 0.0);
  CHECK(at(1.0, 0.0) > 0.0);
  // Escaping pixels agree with direct iteration at the pixel centre.
  for (int iy = 0; iy < job.height; iy += 9)
    for (int ix = 0; ix < job.width; ix += 9) {
      const double v = r.at(ix, iy);
      if (v <= 0.0) continue;
      const cplx c = pixel_center(job, ix, iy);
      CHECK(std::abs(v - oracle::direct_green_fine({c, 0.0, 1.0}, 0.0)) <= 1e-8);
    }
}

TEST_CASE("rasters are deterministic across thread counts") {
  RasterJob job;
  job.width = 24;
  job.height = 20;
  job.quantity = RasterQuantity::M;
  setenv("BASINLAB_THREADS", "1", 1);
  const Raster a = raster(job);
  setenv("BASINLAB_THREADS", "3", 1);
  const Raster b = raster(job);
  unsetenv("BASINLAB_THREADS");
  CHECK(csv_of(job, a) == csv_of(job, b));
  CHECK(ppm_of(job, a) == ppm_of(job, b));
  const std::string ppm = ppm_of(job, a);
  CHECK(ppm.rfind("P6\n24 20\n255\n", 0) == 0);
  CHECK(ppm.size() == std::string("P6\n24 20\n255\n").size() + 24 * 20 * 3);
  CHECK(csv_of(job, a).rfind("ix,iy,x,y,M\n", 0) == 0);
}

TEST_CASE("in_B equals M <= t and contains the inner side of in_S") {
  RasterJob job;
  job.x_min = -8.0;
  job.x_max = 8.0;
  job.y_min = -8.0;
  job.y_max = 8.0;
  job.width = job.height = 40;
  job.t = 1.0;
  job.quantity = RasterQuantity::M;
  const Raster m = raster(job);
  job.quantity = RasterQuantity::InB;
  const Raster b = raster(job);
  job.quantity = RasterQuantity::InS;
  const Raster s = raster(job);
  int band = 0;
  for (int iy = 0; iy < job.height; ++iy)
    for (int ix = 0; ix < job.width; ++ix) {
      CHECK(b.at(ix, iy) == (m.at(ix, iy) <= job.t ? 1.0 : 0.0));
      if (s.at(ix, iy) != 1.0) continue;
      ++band;
      bool touches = b.at(ix, iy) == 1.0;
      const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (auto& d : nb) {
        const int x = ix + d[0], y = iy + d[1];
        if (x >= 0 && y >= 0 && x < job.width && y < job.height && b.at(x, y) == 1.0) touches = true;
      }
      CHECK(touches);
    }
  CHECK(band > 0);
}

TEST_CASE("cubic slice, green and level index") {
  RasterJob job;
  job.plane = ParameterPlane::CubicSlice;
  job.x_min = -1.0;
  job.x_max = 1.0;
  job.y_min = -1.0;
  job.y_max = 1.0;
  job.width = job.height = 8;
  job.quantity = RasterQuantity::Green;
  job.point = {3.0, 0.0};
  const Raster g = raster(job);
  const cplx p = pixel_center(job, 2, 5);
  const auto f = plane_polynomial(job, p.real(), p.imag());
  std::vector<cplx> coeffs(f.coefficients().begin(), f.coefficients().end());
  CHECK(std::abs(g.at(2, 5) - oracle::direct_green_fine(coeffs, {3.0, 0.0})) <= 1e-9);
  CHECK(f.critical_points()[0] == -f.critical_points()[1]);

  job.quantity = RasterQuantity::LevelIndex;
  job.t = 0.01;
  const Raster l = raster(job);
  for (double v : l.values) CHECK((v >= 0.0 || v == -1.0));

  job.quantity = RasterQuantity::InB;
  CHECK_THROWS_AS(raster(job), Error);
}

TEST_CASE("palette and parsing") {
  const auto sentinel = pixel_color(RasterQuantity::M, -1.0);
  CHECK(sentinel == std::array<std::uint8_t, 3>{255, 0, 255});
  CHECK(pixel_color(RasterQuantity::M, 0.0) == std::array<std::uint8_t, 3>{0, 0, 0});
  CHECK(pixel_color(RasterQuantity::InS, 1.0) == std::array<std::uint8_t, 3>{0, 0, 0});
  CHECK(parse_quantity("in_S") == RasterQuantity::InS);
  CHECK(parse_plane("cubic") == ParameterPlane::CubicSlice);
  CHECK_THROWS_AS(parse_quantity("nope"), Error);
  RasterJob bad;
  bad.width = 0;
  CHECK_THROWS_AS(raster(bad), Error);
}
