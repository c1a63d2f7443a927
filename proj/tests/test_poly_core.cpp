#include <doctest.h>

#include <random>

#include "basinlab/error.hpp"
#include "basinlab/poly_core.hpp"
#include "oracles.hpp"

using namespace basinlab;

namespace {

void check_coeffs(const MarkedPolynomial& f, const std::vector<cplx>& expected, double tol = 1e-12) {
  REQUIRE(f.coefficients().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(f.coefficients()[i] - expected[i]) <= tol);
}

std::vector<cplx> random_centered(std::mt19937_64& rng, int count, double scale = 1.5) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<cplx> c(count);
  cplx mean = 0.0;
  for (auto& x : c) {
    x = {n(rng), n(rng)};
    mean += x;
  }
  for (auto& x : c) x -= mean / static_cast<double>(count);
  return c;
}

}  // namespace

TEST_CASE("from_critical_data builds the integrated polynomial") {
  check_coeffs(MarkedPolynomial::from_critical_data({0.0}, {0.0, 1.0}), {{0.0, 1.0}, 0.0, 1.0});
  check_coeffs(MarkedPolynomial::from_critical_data({0.0, 0.0}, 0.0), {0.0, 0.0, 0.0, 1.0});
  check_coeffs(MarkedPolynomial::from_critical_data({1.0, -1.0}, 0.0), {0.0, -3.0, 0.0, 1.0});
}

TEST_CASE("from_critical_data preconditions") {
  CHECK_THROWS_AS(MarkedPolynomial::from_critical_data({}, 0.0), Error);
  try {
    MarkedPolynomial::from_critical_data({1.0, 1.0}, 0.0);
    FAIL("expected NotCentered");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotCentered);
  }
}

TEST_CASE("marking invariants for random polynomials") {
  std::mt19937_64 rng(7);
  for (int d = 2; d <= 5; ++d)
    for (int trial = 0; trial < 10; ++trial) {
      const auto c = random_centered(rng, d - 1);
      const cplx a{0.3 * trial - 1.0, 0.7};
      const auto f = MarkedPolynomial::from_critical_data(c, a);
      const auto expected = oracle::integrate_marking(c, a);
      for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(std::abs(f.coefficients()[i] - expected[i]) <= 1e-10 * (1.0 + std::abs(expected[i])));
      CHECK(f.coefficients().back() == cplx(1.0));
      CHECK(std::abs(f.coefficients()[d - 1]) <= 1e-12);
      CHECK(std::abs(f(0.0) - a) <= 1e-14);
      for (cplx ci : c) CHECK(std::abs(f.derivative(ci)) <= 1e-9 * (1.0 + std::pow(std::abs(ci), d)));
    }
}

TEST_CASE("critical values") {
  const auto f = MarkedPolynomial::from_critical_data({0.0}, {0.0, 1.0});
  CHECK(std::abs(critical_values(f)[0] - cplx(0.0, 1.0)) < 1e-15);
  const auto g = MarkedPolynomial::from_critical_data({1.0, -1.0}, 0.0);
  const auto v = critical_values(g);
  CHECK(std::abs(v[0] + 2.0) < 1e-14);
  CHECK(std::abs(v[1] - 2.0) < 1e-14);

  // Degree 4: evaluate at independently found roots of f'.
  std::mt19937_64 rng(11);
  const auto c = random_centered(rng, 3);
  const auto h = MarkedPolynomial::from_critical_data(c, {0.2, -0.4});
  const auto coeffs = oracle::integrate_marking(c, {0.2, -0.4});
  std::vector<cplx> deriv;
  for (std::size_t i = 1; i < coeffs.size(); ++i) deriv.push_back(static_cast<double>(i) * coeffs[i]);
  std::vector<cplx> brute;
  for (cplx r : oracle::roots(deriv)) brute.push_back(oracle::eval(coeffs, r));
  CHECK(multiset_distance(critical_values(h), brute) <= 1e-9);
}

TEST_CASE("round trip through coefficients") {
  std::mt19937_64 rng(3);
  for (int d = 2; d <= 5; ++d) {
    const auto f = MarkedPolynomial::from_critical_data(random_centered(rng, d - 1), {0.5, 0.25});
    const auto g = MarkedPolynomial::from_coefficients(f.coefficients());
    const auto h = MarkedPolynomial::from_critical_data(
        std::vector<cplx>(g.critical_points().begin(), g.critical_points().end()), g.origin_image());
    CHECK(coefficient_distance(f, h) <= 1e-10);
  }
}

TEST_CASE("critical values are polynomial in the marking") {
  // Finite differences of nu against the derivative of the expanded composite
  // f(c_j) with respect to a, which is 1 for every j.
  const std::vector<cplx> c{{0.4, 0.1}, {-0.4, -0.1}};
  const cplx a{0.1, 0.2}, h{1e-6, 0.0};
  const auto plus = critical_values(MarkedPolynomial::from_critical_data(c, a + h));
  const auto minus = critical_values(MarkedPolynomial::from_critical_data(c, a - h));
  for (std::size_t j = 0; j < plus.size(); ++j) CHECK(std::abs((plus[j] - minus[j]) / (2.0 * h) - 1.0) <= 1e-6);
}

TEST_CASE("normalize") {
  SUBCASE("2z^2") {
    const std::vector<cplx> p{0.0, 0.0, 2.0};
    const auto n = normalize(p);
    CHECK(std::abs(n.poly.coefficients()[0]) < 1e-14);
    for (double x : {0.3, -1.2, 2.5}) {
      const cplx z{x, 0.5 * x};
      CHECK(std::abs(n.conjugacy(oracle::eval(p, z)) - n.poly(n.conjugacy(z))) <= 1e-8 * std::abs(n.poly(n.conjugacy(z))));
    }
  }
  SUBCASE("z^2 + z") {
    const std::vector<cplx> p{0.0, 1.0, 1.0};
    const auto n = normalize(p);
    CHECK(std::abs(n.poly.coefficients()[0] - 0.25) < 1e-14);
    CHECK(std::abs(n.conjugacy.scale - 1.0) < 1e-14);
    CHECK(std::abs(n.conjugacy.offset - 0.5) < 1e-14);
  }
  SUBCASE("already normalized") {
    const auto f = MarkedPolynomial::from_critical_data({1.0, -1.0}, {0.0, 0.5});
    const auto n = normalize(f.coefficients());
    CHECK(coefficient_distance(n.poly, f) < 1e-13);
    CHECK(std::abs(n.conjugacy.scale - 1.0) < 1e-14);
    CHECK(std::abs(n.conjugacy.offset) < 1e-14);
  }
  SUBCASE("random conjugacy identity") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int d = 2; d <= 5; ++d) {
      std::vector<cplx> p(d + 1);
      for (auto& x : p) x = {g(rng), g(rng)};
      const auto n = normalize(p);
      const double arg = std::arg(n.conjugacy.scale);
      CHECK(std::fmod(arg + 2 * M_PI, 2 * M_PI) < 2 * M_PI / (d - 1) + 1e-12);
      for (int s = 0; s < 20; ++s) {
        const cplx z{g(rng), g(rng)};
        const cplx lhs = n.conjugacy(oracle::eval(p, z));
        const cplx rhs = n.poly(n.conjugacy(z));
        CHECK(std::abs(lhs - rhs) <= 1e-8 * (1.0 + std::abs(rhs)));
      }
    }
  }
  CHECK_THROWS_AS(normalize(std::vector<cplx>{1.0, 1.0, 1e-310}), Error);
}

TEST_CASE("rotate_conjugate") {
  const auto z4 = MarkedPolynomial::from_critical_data({0.0, 0.0, 0.0}, 0.0);
  for (int k = 0; k < 3; ++k) CHECK(coefficient_distance(rotate_conjugate(z4, k), z4) < 1e-14);

  const auto odd = MarkedPolynomial::from_critical_data({1.0, -1.0}, 0.0);
  CHECK(coefficient_distance(rotate_conjugate(odd, 1), odd) < 1e-14);

  const auto plus1 = MarkedPolynomial::from_critical_data({0.0, 0.0}, 1.0);
  check_coeffs(rotate_conjugate(plus1, 1), {-1.0, 0.0, 0.0, 1.0}, 1e-14);

  // Group action.
  std::mt19937_64 rng(9);
  const auto f = MarkedPolynomial::from_critical_data(random_centered(rng, 4), {0.3, 0.1});
  for (int k1 = 0; k1 < 4; ++k1)
    for (int k2 = 0; k2 < 4; ++k2)
      CHECK(coefficient_distance(rotate_conjugate(rotate_conjugate(f, k1), k2), rotate_conjugate(f, (k1 + k2) % 4)) <=
            1e-12);
}
