#include <doctest.h>

#include "basinlab/error.hpp"
#include "basinlab/local_models.hpp"
#include "oracles.hpp"

using namespace basinlab;

namespace {

MarkedPolynomial quad(cplx c) { return MarkedPolynomial::from_critical_data({0.0}, c); }

double residue_sum(const LocalModelSurface& s) {
  double r = 0.0;
  for (double x : s.residues) r += x;
  return r;
}

}  // namespace

TEST_CASE("extracting from z^3 gives one unbranched cubic model") {
  const Basin basin(MarkedPolynomial::from_critical_data({0.0, 0.0}, 0.0));
  for (double t : {0.3, 1.0}) {
    const auto models = extract_local_models(basin, t);
    REQUIRE(models.size() == 1);
    CHECK(models[0].degree == 3);
    CHECK(models[0].critical_value_angles.empty());
    CHECK(representative_distance(models[0].representative, MarkedPolynomial::from_critical_data({0.0, 0.0}, 0.0)) <=
          1e-8);
    CHECK(std::abs(residue_sum(models[0].base) - 1.0) <= 1e-10);
  }
}

TEST_CASE("extracting from z^2 - 6") {
  const Basin basin(quad(-6.0));
  const auto above = extract_local_models(basin, 0.9);
  REQUIRE(above.size() == 1);
  CHECK(above[0].degree == 2);
  CHECK(above[0].critical_value_angles.empty());
  CHECK(representative_distance(above[0].representative, quad(0.0)) <= 1e-8);

  const auto below = extract_local_models(basin, 0.5);
  REQUIRE(below.size() == 2);
  for (const auto& lm : below) {
    CHECK(lm.degree == 1);
    CHECK(lm.representative.degree() == 1);
    CHECK(local_model_to_polynomial(lm).degree() == 1);
  }
}

TEST_CASE("degree accounting and round trip on a cubic") {
  const Basin basin(MarkedPolynomial::from_critical_data({{1.0, 0.3}, {-1.0, -0.3}}, {4.0, 1.0}));
  for (double t : {0.2, 0.5}) {
    const auto models = extract_local_models(basin, t);
    int sum = 0;
    for (const auto& lm : models) {
      sum += lm.degree;
      CHECK(std::abs(residue_sum(lm.base) - 1.0) <= 1e-10);
      const MarkedPolynomial p = local_model_to_polynomial(lm);
      const PointedLocalModelMap back = restrict_to_base(p, lm.base);
      CHECK(back.degree == lm.degree);
      CHECK(representative_distance(back.representative, lm.representative) <= 1e-8);
    }
    // The components over one image leaf together cover it d times; at these
    // heights {G = 3t} is connected.
    CHECK(sum == 3);
  }
}

TEST_CASE("branched quadratic models on the round annulus") {
  const auto base = LocalModelSurface::annulus(-0.5, 0.0, 0.5);
  std::vector<MarkedPolynomial> loop;
  const int n = 64;
  for (int i = 0; i < n; ++i) {
    const double alpha = 2 * M_PI * i / n;
    const auto lm = sample_LMkk1(base, 2, {alpha});
    // The central leaf is the unit circle with the marked point at 1.
    CHECK(std::abs(lm.representative.origin_image() - std::polar(1.0, alpha)) <= 1e-8);
    CHECK(std::abs(critical_values(local_model_to_polynomial(lm))[0] - std::polar(1.0, alpha)) <= 1e-8);
    loop.push_back(lm.representative);
  }
  for (int i = 0; i < n; ++i) CHECK(coefficient_distance(loop[i], loop[(i + 1) % n]) <= 10.0 * 2 * M_PI / n);
}

TEST_CASE("coalesced and distinct critical values") {
  const auto base = LocalModelSurface::annulus(-0.5, 0.0, 0.5);
  const auto coalesced = sample_LMkk1(base, 3, {1.0, 1.0});
  const auto expected = MarkedPolynomial::from_critical_data({0.0, 0.0}, std::polar(1.0, 1.0));
  CHECK(representative_distance(coalesced.representative, expected) <= 1e-8);

  for (int k : {3, 4}) {
    std::vector<double> angles;
    for (int i = 0; i < k - 1; ++i) angles.push_back(0.4 + 1.7 * i);
    const auto lm = sample_LMkk1(base, k, angles);
    CHECK(lm.degree == k);
    std::vector<cplx> want;
    for (double a : angles) want.push_back(std::polar(1.0, a));
    CHECK(multiset_distance(critical_values(lm.representative), want) <= 1e-8);
  }
}

TEST_CASE("local model to polynomial") {
  PointedLocalModelMap trivial;
  trivial.base = LocalModelSurface::annulus(-0.5, 0.0, 0.5);
  trivial.representative = MarkedPolynomial::linear({0.2, 0.0});
  CHECK(local_model_to_polynomial(trivial).degree() == 1);

  PointedLocalModelMap cover;
  cover.base = trivial.base;
  cover.degree = 2;
  cover.representative = quad(0.0);
  CHECK(coefficient_distance(local_model_to_polynomial(cover), quad(0.0)) <= 1e-15);

  PointedLocalModelMap bad = cover;
  bad.representative = quad(0.5);
  CHECK_THROWS_AS(local_model_to_polynomial(bad), Error);

  // z^3 - 3bz + a has critical values a -+ 2 b^{3/2} = 0.8i -+ 0.6, both on the unit circle.
  const double c = std::sqrt(std::pow(0.3, 2.0 / 3.0));
  const auto restricted =
      restrict_to_base(MarkedPolynomial::from_critical_data({c, -c}, {0.0, 0.8}), LocalModelSurface::annulus(-0.5, 0.0, 0.5));
  CHECK(restricted.degree == 3);
  REQUIRE(restricted.critical_value_angles.size() == 2);
  std::vector<cplx> on_leaf;
  for (double a : restricted.critical_value_angles) on_leaf.push_back(std::polar(1.0, a));
  CHECK(multiset_distance(on_leaf, std::vector<cplx>{{-0.6, 0.8}, {0.6, 0.8}}) <= 1e-8);
}

TEST_CASE("two-pole base") {
  LocalModelSurface base;
  base.band_low = -0.2;
  base.band_high = 0.2;
  base.poles = {-0.5, 0.5};
  base.residues = {0.5, 0.5};
  validate(base);
  for (double a : {0.0, 1.0, 2.5, 4.0}) {
    const cplx p = central_leaf_point(base, a);
    CHECK(std::abs(std::abs(p - 0.5) * std::abs(p + 0.5) - 1.0) <= 1e-9);
  }
  CHECK(central_leaf_point(base, 0.0).real() > 0.0);

  LocalModelSurface broken = base;
  broken.residues = {0.5, 0.6};
  CHECK_THROWS_AS(validate(broken), Error);
  broken.residues = {0.5, 0.5};
  broken.slit_angles = {0.1, 0.2};
  broken.slit_permutation = {0, 0};
  CHECK_THROWS_AS(validate(broken), Error);
}
