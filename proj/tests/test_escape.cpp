#include <doctest.h>

#include <random>

#include "basinlab/error.hpp"
#include "basinlab/escape.hpp"
#include "oracles.hpp"

using namespace basinlab;

namespace {

MarkedPolynomial quad(cplx c) { return MarkedPolynomial::from_critical_data({0.0}, c); }

std::vector<cplx> coeffs(const MarkedPolynomial& f) { return {f.coefficients().begin(), f.coefficients().end()}; }

}  // namespace

TEST_CASE("green examples") {
  const auto z2 = quad(0.0);
  CHECK(green(z2, std::exp(2.0)).green == doctest::Approx(2.0).epsilon(1e-12));

  const auto f = quad(-6.0);
  const BasinSample s = green(f, 0.0);
  CHECK(s.escaped());
  const double ref = oracle::direct_green_fine(coeffs(f), 0.0);
  CHECK(std::abs(s.green - ref) <= 1e-10);
  CHECK(std::abs(s.green - 0.8494) <= 1e-4);
  CHECK(s.error_bound <= EscapeConfig{}.tol);

  const BasinSample b = green(quad(-1.0), 0.0);
  CHECK_FALSE(b.escaped());
  CHECK(b.green == 0.0);
  CHECK(b.status == OrbitStatus::Bounded);
}

TEST_CASE("omega examples") {
  const auto z3 = MarkedPolynomial::from_critical_data({0.0, 0.0}, 0.0);
  CHECK(std::abs(omega(z3, 2.0) - cplx(0.0, 0.5)) <= 1e-12);
  CHECK(std::abs(omega(quad(0.0), -4.0) - cplx(0.0, -0.25)) <= 1e-12);

  const auto f = quad(-6.0);
  const cplx z = 4.0;
  CHECK(std::abs(omega(f, f(z)) * f.derivative(z) - 2.0 * omega(f, z)) <= 1e-8);

  CHECK_THROWS_AS(omega(quad(0.0), 0.5), Error);
}

TEST_CASE("max escape rate") {
  CHECK(max_escape_rate(MarkedPolynomial::from_critical_data({0.0, 0.0}, 0.0)).value == 0.0);
  CHECK(std::abs(max_escape_rate(quad(-6.0)).value - oracle::direct_green_fine({-6.0, 0.0, 1.0}, 0.0)) <= 1e-10);

  const auto g = MarkedPolynomial::from_critical_data({1.0, -1.0}, 5.0);
  const auto c = coeffs(g);
  const double ref = std::max(oracle::direct_green_fine(c, 1.0), oracle::direct_green_fine(c, -1.0));
  CHECK(std::abs(max_escape_rate(g).value - ref) <= 1e-10);
}

TEST_CASE("filled Julia membership") {
  const auto z2 = quad(0.0);
  CHECK(in_filled_julia(z2, 0.5).kind == Membership::Kind::Inside);
  const auto e = in_filled_julia(z2, 2.0);
  CHECK(e.kind == Membership::Kind::Escapes);
  CHECK(e.green == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(in_filled_julia(quad(0.25), 0.0).kind == Membership::Kind::Inconclusive);
}

TEST_CASE("functional equation, pullback identity and harmonicity on random samples") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 3;
    std::vector<cplx> c(d - 1);
    cplx mean = 0.0;
    for (auto& x : c) mean += (x = {n(rng), n(rng)});
    for (auto& x : c) x -= mean / static_cast<double>(d - 1);
    const auto f = MarkedPolynomial::from_critical_data(c, {n(rng), n(rng)});
    const cplx z{2.0 * n(rng), 2.0 * n(rng)};
    const BasinSample s = green(f, z);
    if (!s.escaped() || s.derivative_underflow) continue;
    ++checked;
    CHECK(std::abs(green(f, f(z)).green - d * s.green) <= 1e-8);
    const cplx w = omega(f, f(z)) * f.derivative(z) - static_cast<double>(d) * s.omega;
    CHECK(std::abs(w) <= 1e-8 * (1.0 + std::abs(s.omega) * std::abs(f.derivative(z))));

    const double h = 1e-3;
    if (green(f, z + 2.0 * h).escaped() && s.green > 0.05) {
      const double lap = green(f, z + h).green + green(f, z - h).green + green(f, z + cplx(0, h)).green +
                         green(f, z - cplx(0, h)).green - 4.0 * s.green;
      CHECK(std::abs(lap) <= 1e-3 * std::max(1.0, s.green));
    }

    const EscapeConfig more{1e-10, 4000};
    CHECK(green(f, z, more).green >= s.green - 1e-10);
  }
  CHECK(checked > 50);
}
