#include <doctest.h>

#include <random>
#include <sstream>

#include "basinlab/error.hpp"
#include "basinlab/rays.hpp"
#include "oracles.hpp"

using namespace basinlab;

namespace {

MarkedPolynomial quad(cplx c) { return MarkedPolynomial::from_critical_data({0.0}, c); }

}  // namespace

TEST_CASE("bottcher coordinate") {
  const auto z3 = MarkedPolynomial::from_critical_data({0.0, 0.0}, 0.0);
  CHECK(std::abs(bottcher(z3, 3.0) - 3.0) <= 1e-12);

  const auto f = quad(-6.0);
  const cplx phi = bottcher(f, 10.0);
  CHECK(std::abs(std::abs(phi) - std::exp(green(f, 10.0).green)) <= 1e-8 * std::abs(phi));
  CHECK(std::abs(phi.imag()) <= 1e-10);
  CHECK(phi.real() > 0.0);

  const cplx z{3.0, 2.0};
  CHECK(std::abs(bottcher(f, f(z)) - bottcher(f, z) * bottcher(f, z)) <= 1e-8 * std::abs(bottcher(f, f(z))));

  const auto g = quad({0.3, 0.4});
  const cplx pg = bottcher(g, 50.0);
  CHECK(pg.real() > 0.0);

  CHECK_THROWS_AS(bottcher(f, 0.5), Error);
}

TEST_CASE("trace_ray on z^2 follows the positive axis") {
  const RayTrace tr = trace_ray(quad(0.0), 0.0, 0.1);
  CHECK(tr.status == RayStatus::ReachedTargetHeight);
  REQUIRE(tr.samples.size() > 2);
  for (const auto& s : tr.samples) CHECK(std::abs(s.z - std::exp(s.height)) <= 1e-8 * std::exp(s.height));
  CHECK(tr.samples.back().height == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("trace_ray on z^2 - 2 matches the Joukowski parametrization") {
  const RayTrace tr = trace_ray(quad(-2.0), 0.0, 0.05);
  CHECK(tr.status == RayStatus::ReachedTargetHeight);
  for (const auto& s : tr.samples) {
    CHECK(std::abs(s.z.imag()) <= 1e-9 * std::abs(s.z));
    CHECK(s.z.real() > 2.0);
    CHECK(std::abs(s.z.real() - 2.0 * std::cosh(s.height)) <= 1e-8 * s.z.real());
  }
}

TEST_CASE("trace_ray stops at the critical point of z^2 - 6") {
  // The ray through 0 is the one whose double is the ray of angle pi through -6.
  const auto f = quad(-6.0);
  const double m = oracle::direct_green_fine({-6.0, 0.0, 1.0}, 0.0);
  const RayTrace tr = trace_ray(f, M_PI / 2, 0.1);
  CHECK(tr.status == RayStatus::HitSingularity);
  CHECK(std::abs(tr.singularity) <= 1e-4);
  CHECK(std::abs(tr.singularity_height - m) <= 1e-4);

  const RayTrace straight = trace_ray(f, M_PI, 0.1);
  CHECK(straight.status == RayStatus::ReachedTargetHeight);
}

TEST_CASE("ray trace invariants") {
  const auto f = MarkedPolynomial::from_critical_data({{0.5, 0.2}, {-0.5, -0.2}}, {1.0, 2.0});
  const Basin basin(f);
  for (double theta : {0.3, 1.7, 4.0}) {
    const RayTrace tr = trace_ray(basin, theta, 0.2);
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
      const auto& s = tr.samples[i];
      if (i > 0) CHECK(s.height < tr.samples[i - 1].height);
      CHECK(std::abs(green(f, s.z).green - s.height) <= 1e-6);
    }
    if (tr.status != RayStatus::ReachedTargetHeight) continue;
    for (std::size_t i = 0; i < tr.samples.size(); i += 7) {
      const auto& s = tr.samples[i];
      CHECK(std::abs(angle_difference(external_angle(basin, s.z), theta)) <= 1e-6);
      if (s.height > 0.3) {
        // A short descent runs along the gradient of G, i.e. parallel to
        // i conj(omega) up to sign.
        RayWalker walker(basin, theta);
        walker.descend_to(s.height);
        const cplx z0 = walker.point();
        walker.descend_to(s.height - 1e-4);
        const cplx step = walker.point() - z0;
        const cplx grad = cplx(0, 1) * std::conj(omega(f, z0 + 0.5 * step));
        const double ang = std::abs(std::arg(step / grad));
        CHECK(std::min(ang, M_PI - ang) <= 1e-3);
      }
    }
  }
}

TEST_CASE("external angle examples and dynamics") {
  const auto z2 = quad(0.0);
  CHECK(std::abs(external_angle(z2, 4.0)) <= 1e-12);
  CHECK(std::abs(external_angle(z2, -4.0) - M_PI) <= 1e-12);
  CHECK(std::abs(angle_difference(external_angle(quad(-6.0), 4.0), 0.0)) <= 1e-12);
  CHECK_THROWS_AS(external_angle(z2, 0.3), Error);

  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto f = MarkedPolynomial::from_critical_data({{0.5, 0.2}, {-0.5, -0.2}}, {0.3, -0.2});
  const Basin basin(f);
  int checked = 0;
  for (int i = 0; i < 60 && checked < 20; ++i) {
    const cplx z{1.5 * n(rng), 1.5 * n(rng)};
    if (!green(f, z).escaped()) continue;
    const AngleResult a = angle_candidates(basin, z), b = angle_candidates(basin, f(z));
    if (a.ambiguous || b.ambiguous) continue;
    ++checked;
    CHECK(std::abs(angle_difference(b.angle, 3.0 * a.angle)) <= 1e-6);
  }
  CHECK(checked >= 10);
}

TEST_CASE("fixed rays") {
  CHECK(fixed_rays(2) == std::vector<double>{0.0});
  const auto r3 = fixed_rays(3);
  REQUIRE(r3.size() == 2);
  CHECK(r3[1] == doctest::Approx(M_PI));
  const auto r5 = fixed_rays(5);
  REQUIRE(r5.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(r5[k] == doctest::Approx(k * M_PI / 2));
}

TEST_CASE("ray CSV header") {
  std::ostringstream os;
  write_ray_csv(os, trace_ray(quad(0.0), 0.0, 1.0));
  CHECK(os.str().rfind("theta,height,re,im,status\n", 0) == 0);
}
