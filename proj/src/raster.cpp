#include "basinlab/raster.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "basinlab/error.hpp"
#include "basinlab/levels.hpp"

namespace basinlab {

namespace {

constexpr double kSentinel = -1.0;

// Escape rate of 0 under z^2 + c together with the exterior distance
// estimate |z| log|z| / |dz/dc|; distance is 0 when the orbit stays bounded.
struct QuadraticOrbit {
  bool escaped = false;
  double distance = 0.0;
};

QuadraticOrbit quadratic_orbit(cplx c, int max_iter) {
  cplx z = 0.0, dz = 0.0;
  for (int n = 0; n < max_iter; ++n) {
    dz = 2.0 * z * dz + 1.0;
    z = z * z + c;
    const double r = std::abs(z);
    if (r > 1e10) return {true, r * std::log(r) / std::abs(dz)};
  }
  return {};
}

template <class F>
void parallel_rows(int rows, F&& body) {
  const int n = std::max(1, std::min(raster_threads(), rows));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int r = next++; r < rows; r = next++) {
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double m_value(const RasterJob& job, double x, double y, double pixel) {
  if (job.plane == ParameterPlane::Quadratic) {
    const QuadraticOrbit orbit = quadratic_orbit({x, y}, job.escape.max_iter);
    if (!orbit.escaped || orbit.distance <= 2.0 * std::sqrt(2.0) * pixel) return 0.0;
  }
  const EscapeRate rate = max_escape_rate(plane_polynomial(job, x, y), job.escape);
  if (rate.lower_bound && rate.value > 0.0) return kSentinel;
  return rate.value;
}

double point_value(const RasterJob& job, double x, double y) {
  const MarkedPolynomial f = plane_polynomial(job, x, y);
  switch (job.quantity) {
    case RasterQuantity::Green: {
      const BasinSample s = green(f, job.point, job.escape);
      if (s.status == OrbitStatus::Inconclusive) return kSentinel;
      return s.escaped() ? s.green : 0.0;
    }
    case RasterQuantity::LevelIndex: {
      const Basin basin(f, job.escape);
      if (basin.critical().inconclusive) return kSentinel;
      return level_index(basin, job.t);
    }
    case RasterQuantity::InB: {
      const EscapeRate rate = max_escape_rate(f, job.escape);
      if (rate.lower_bound && rate.value > 0.0 && rate.value <= job.t) return kSentinel;
      return rate.value <= job.t ? 1.0 : 0.0;
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "unexpected raster quantity");
  }
}

}  // namespace

ParameterPlane parse_plane(const std::string& name) {
  if (name == "quadratic") return ParameterPlane::Quadratic;
  if (name == "cubic") return ParameterPlane::CubicSlice;
  throw Error(ErrorCode::InvalidArgument, "unknown plane '" + name + "' (quadratic, cubic)");
}

RasterQuantity parse_quantity(const std::string& name) {
  if (name == "M") return RasterQuantity::M;
  if (name == "green") return RasterQuantity::Green;
  if (name == "level_index") return RasterQuantity::LevelIndex;
  if (name == "in_B") return RasterQuantity::InB;
  if (name == "in_S") return RasterQuantity::InS;
  throw Error(ErrorCode::InvalidArgument, "unknown quantity '" + name + "' (M, green, level_index, in_B, in_S)");
}

const char* to_string(RasterQuantity q) {
  switch (q) {
    case RasterQuantity::M: return "M";
    case RasterQuantity::Green: return "green";
    case RasterQuantity::LevelIndex: return "level_index";
    case RasterQuantity::InB: return "in_B";
    case RasterQuantity::InS: return "in_S";
  }
  return "?";
}

int raster_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("BASINLAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<long>(n, cap);
  }
  return n;
}

cplx pixel_center(const RasterJob& job, int ix, int iy) {
  const double dx = (job.x_max - job.x_min) / job.width;
  const double dy = (job.y_max - job.y_min) / job.height;
  return {job.x_min + (ix + 0.5) * dx, job.y_max - (iy + 0.5) * dy};
}

MarkedPolynomial plane_polynomial(const RasterJob& job, double x, double y) {
  if (job.plane == ParameterPlane::Quadratic) return MarkedPolynomial::from_critical_data({0.0}, {x, y});
  const cplx c1{x, job.cubic_c1_imag};
  return MarkedPolynomial::from_critical_data({c1, -c1}, {y, job.cubic_a_imag});
}

Raster raster(const RasterJob& job) {
  if (job.width <= 0 || job.height <= 0) throw Error(ErrorCode::InvalidArgument, "raster size must be positive");
  if (!(job.x_max > job.x_min) || !(job.y_max > job.y_min))
    throw Error(ErrorCode::InvalidArgument, "empty raster region");
  const bool needs_t = job.quantity == RasterQuantity::LevelIndex || job.quantity == RasterQuantity::InB ||
                       job.quantity == RasterQuantity::InS;
  if (needs_t && !(job.t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  if ((job.quantity == RasterQuantity::InB || job.quantity == RasterQuantity::InS) &&
      job.plane != ParameterPlane::Quadratic)
    throw Error(ErrorCode::InvalidArgument, "in_B and in_S rasters are available on the quadratic plane only");

  const int w = job.width, h = job.height;
  const double dx = (job.x_max - job.x_min) / w;
  const double dy = (job.y_max - job.y_min) / h;
  Raster out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h, 0.0)};

  if (job.quantity == RasterQuantity::InS) {
    // A pixel meets the curve M = t when its corner values straddle t.
    std::vector<double> corner(static_cast<std::size_t>(w + 1) * (h + 1));
    parallel_rows(h + 1, [&](int iy) {
      for (int ix = 0; ix <= w; ++ix) {
        const double x = job.x_min + ix * dx, y = job.y_max - iy * dy;
        corner[static_cast<std::size_t>(iy) * (w + 1) + ix] =
            max_escape_rate(plane_polynomial(job, x, y), job.escape).value - job.t;
      }
    });
    auto c = [&](int ix, int iy) { return corner[static_cast<std::size_t>(iy) * (w + 1) + ix]; };
    for (int iy = 0; iy < h; ++iy)
      for (int ix = 0; ix < w; ++ix) {
        const double v[4] = {c(ix, iy), c(ix + 1, iy), c(ix, iy + 1), c(ix + 1, iy + 1)};
        const bool lo = std::any_of(v, v + 4, [](double e) { return e < 0.0; });
        const bool hi = std::any_of(v, v + 4, [](double e) { return e >= 0.0; });
        out.values[static_cast<std::size_t>(iy) * w + ix] = (lo && hi) ? 1.0 : 0.0;
      }
  } else {
    const double pixel = std::max(dx, dy);
    parallel_rows(h, [&](int iy) {
      for (int ix = 0; ix < w; ++ix) {
        const cplx p = pixel_center(job, ix, iy);
        out.values[static_cast<std::size_t>(iy) * w + ix] = job.quantity == RasterQuantity::M
                                                                 ? m_value(job, p.real(), p.imag(), pixel)
                                                                 : point_value(job, p.real(), p.imag());
      }
    });
  }

  if (!job.ppm_path.empty()) {
    std::ofstream f(job.ppm_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + job.ppm_path);
    write_ppm(f, out, job.quantity);
  }
  if (!job.csv_path.empty()) {
    std::ofstream f(job.csv_path);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + job.csv_path);
    write_csv(f, out, job);
  }
  return out;
}

std::array<std::uint8_t, 3> pixel_color(RasterQuantity q, double value) {
  // Low to high: dark blue through cyan and yellow to white.
  static constexpr std::array<std::array<std::uint8_t, 3>, 16> kRamp{{
      {20, 20, 90},   {25, 40, 130},  {30, 65, 170},   {35, 95, 200},   {40, 130, 220},  {45, 165, 225},
      {60, 195, 215}, {90, 215, 190}, {130, 225, 160}, {175, 230, 125}, {215, 230, 95},  {240, 215, 80},
      {250, 190, 90}, {252, 200, 140}, {254, 225, 195}, {255, 250, 240},
  }};
  if (value < 0.0) return {255, 0, 255};
  if (q == RasterQuantity::InB || q == RasterQuantity::InS)
    return value > 0.5 ? std::array<std::uint8_t, 3>{0, 0, 0} : std::array<std::uint8_t, 3>{255, 255, 255};
  if (value == 0.0) return {0, 0, 0};
  const int idx = std::clamp(static_cast<int>(4.0 * std::log2(1.0 + value)), 0, 15);
  return kRamp[idx];
}

void write_ppm(std::ostream& out, const Raster& r, RasterQuantity q) {
  out << "P6\n" << r.width << ' ' << r.height << "\n255\n";
  for (double v : r.values) {
    const auto rgb = pixel_color(q, v);
    out.write(reinterpret_cast<const char*>(rgb.data()), 3);
  }
}

void write_csv(std::ostream& out, const Raster& r, const RasterJob& job) {
  out << "ix,iy,x,y," << to_string(job.quantity) << '\n';
  char line[128];
  for (int iy = 0; iy < r.height; ++iy)
    for (int ix = 0; ix < r.width; ++ix) {
      const cplx p = pixel_center(job, ix, iy);
      std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g,%.17g\n", ix, iy, p.real(), p.imag(), r.at(ix, iy));
      out << line;
    }
}

}  // namespace basinlab
