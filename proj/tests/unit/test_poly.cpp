#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "momentgmp/poly.hpp"
#include "test_util.hpp"

using namespace momentgmp::poly;
using testutil::binom_oracle;
using testutil::dirac_moments;
using testutil::make_poly;
using testutil::TestRng;

TEST_CASE("monomials_upto enumerates graded lex bases") {
  auto m1 = monomials_upto(1, 2);
  REQUIRE(m1.size() == 3);
  CHECK(m1[0] == MultiIndex{0});
  CHECK(m1[1] == MultiIndex{1});
  CHECK(m1[2] == MultiIndex{2});

  auto m2 = monomials_upto(2, 1);
  REQUIRE(m2.size() == 3);
  CHECK(m2[0] == MultiIndex{0, 0});
  CHECK(m2[1] == MultiIndex{1, 0});
  CHECK(m2[2] == MultiIndex{0, 1});

  CHECK(monomials_upto(3, 6).size() == binom_oracle(9, 3));
}

TEST_CASE("monomials_upto is a strict total order refining degree") {
  GradedLexLess less;
  for (int n = 1; n <= 4; ++n) {
    for (int k = 0; k <= 5; ++k) {
      const auto mons = monomials_upto(n, k);
      CHECK(mons[0].total() == 0);  // index of alpha = 0 is 0
      CHECK(static_cast<long>(mons.size()) == binom_oracle(n + k, n));
      for (std::size_t i = 1; i < mons.size(); ++i) {
        CHECK(less(mons[i - 1], mons[i]));
        CHECK(mons[i - 1].total() <= mons[i].total());
      }
    }
  }
}

TEST_CASE("multinomial coefficients are exact") {
  CHECK(multinomial(2, MultiIndex{2}) == 1.0);
  CHECK(multinomial(2, MultiIndex{1}) == 2.0);
  CHECK(multinomial(4, MultiIndex{0, 0}) == 1.0);
  CHECK(multinomial(4, MultiIndex{2, 1}) == 12.0);  // 4!/(1! 2! 1!)
  // Against the factorial formula.
  for (int d = 0; d <= 12; ++d)
    for (const auto& a : monomials_upto(3, d)) {
      double expect = static_cast<double>(factorial_u64(d));
      expect /= static_cast<double>(factorial_u64(d - a.total()));
      for (int i = 0; i < a.size(); ++i)
        expect /= static_cast<double>(factorial_u64(a[i]));
      CHECK(multinomial(d, a) == doctest::Approx(expect).epsilon(1e-15));
    }
  CHECK_THROWS_AS(multinomial(21, MultiIndex{1}), std::domain_error);
}

TEST_CASE("apolar product on fixed examples") {
  const auto x2 = make_poly(1, {{{2}, 1.0}});
  const auto x = make_poly(1, {{{1}, 1.0}});
  CHECK(apolar_product(x2, x2, 2) == doctest::Approx(1.0));
  CHECK(apolar_product(x, x, 2) == doctest::Approx(0.5));

  // (1 + 0.5 x)^2 paired against g reproduces g(0.5).
  const auto affine = make_poly(1, {{{0}, 1.0}, {{1}, 0.5}});
  const auto f = affine * affine;
  CHECK(f.coefficient(MultiIndex{1}) == doctest::Approx(1.0));
  CHECK(apolar_product(f, x2, 2) == doctest::Approx(0.25));

  CHECK_THROWS_AS(apolar_product(make_poly(1, {{{3}, 1.0}}), x, 2),
                  std::domain_error);
}

TEST_CASE("apolar product is bilinear, symmetric and positive definite") {
  TestRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const int d = rng.uniform_int(1, 6);
    Polynomial f(n), g(n), h(n);
    for (const auto& a : monomials_upto(n, d)) {
      f.add_term(a, rng.uniform(-1, 1));
      g.add_term(a, rng.uniform(-1, 1));
      h.add_term(a, rng.uniform(-1, 1));
    }
    const double s = rng.uniform(-2, 2), t = rng.uniform(-2, 2);
    CHECK(apolar_product(f * s + g * t, h, d) ==
          doctest::Approx(s * apolar_product(f, h, d) + t * apolar_product(g, h, d))
              .epsilon(1e-10));
    CHECK(apolar_product(f, g, d) == doctest::Approx(apolar_product(g, f, d)));
    if (!f.is_zero()) CHECK(apolar_norm(f, d) > 0.0);
  }
}

TEST_CASE("power_of_affine expansions") {
  Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  const auto c = power_of_affine(zero2, 4);
  CHECK(c.terms().size() == 1);
  CHECK(c.coefficient(MultiIndex{0, 0}) == doctest::Approx(1.0));

  Eigen::VectorXd one(1);
  one << 1.0;
  const auto sq = power_of_affine(one, 2);
  CHECK(sq.coefficient(MultiIndex{0}) == doctest::Approx(1.0));
  CHECK(sq.coefficient(MultiIndex{1}) == doctest::Approx(2.0));
  CHECK(sq.coefficient(MultiIndex{2}) == doctest::Approx(1.0));
}

TEST_CASE("apolar reproducing identity on 200 random cases") {
  TestRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const int d = rng.uniform_int(1, 6);
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = rng.uniform(-1, 1);
    if (xi.norm() > 1.0) xi /= xi.norm();
    Polynomial g(n);
    for (const auto& a : monomials_upto(n, d)) g.add_term(a, rng.uniform(-1, 1));
    const double lhs = apolar_product(power_of_affine(xi, d), g, d);
    const double rhs = g.evaluate(xi);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("a_norm and apolar_norm examples") {
  CHECK(a_norm(Polynomial::constant(2, 1.0)) == doctest::Approx(1.0));
  CHECK(a_norm(make_poly(2, {{{1, 1}, 1.0}})) == doctest::Approx(1.0));
  CHECK(a_norm(make_poly(1, {{{2}, 1.0}})) == doctest::Approx(2.0));

  CHECK(apolar_norm(Polynomial::zero(1), 4) == doctest::Approx(0.0));
  CHECK(apolar_norm(make_poly(1, {{{2}, 1.0}}), 2) == doctest::Approx(1.0));
  CHECK(apolar_norm(make_poly(1, {{{1}, 1.0}}), 2) ==
        doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("coefficient l1 norm is factorial free") {
  const auto f = make_poly(1, {{{0}, -3.0}, {{2}, 2.0}});
  CHECK(coefficient_l1_norm(f) == doctest::Approx(5.0));
  CHECK(a_norm(f) == doctest::Approx(3.0 + 2.0 * 2.0));
}

TEST_CASE("weighted functional norm on moment sequences") {
  const auto origin = dirac_moments({{1.0, {0.0, 0.0}}}, 2, 4);
  CHECK(weighted_functional_norm(origin) == doctest::Approx(1.0));

  TestRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(1, 3);
    std::vector<double> pt(static_cast<std::size_t>(n));
    for (auto& v : pt) v = rng.uniform(-1, 1);
    const auto lam = dirac_moments({{1.0, pt}}, n, 4);
    CHECK(weighted_functional_norm(lam) == doctest::Approx(1.0));
  }

  const auto two = dirac_moments({{2.0, {1.0, 1.0}}}, 2, 2);
  CHECK(weighted_functional_norm(two) == doctest::Approx(2.0));
}

TEST_CASE("duality pairing bound |<f,lambda>| <= ||f||_A ||lambda||") {
  TestRng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const int k = rng.uniform_int(0, 4);
    PseudoMoments lam(n, k);
    for (int i = 0; i < lam.size(); ++i) lam.at_index(i) = rng.uniform(-2, 2);
    Polynomial f(n);
    for (const auto& a : monomials_upto(n, k)) f.add_term(a, rng.uniform(-2, 2));
    const double pairing = std::abs(lam.pairing(f));
    const double bound = a_norm(f) * weighted_functional_norm(lam);
    CHECK(pairing <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("dehomogenize_rescale") {
  // x0^4 in one variable after dehomogenization.
  const auto f1 = make_poly(2, {{{4, 0}, 1.0}});
  const auto r1 = dehomogenize_rescale(f1, 2.0);
  CHECK(r1.terms().size() == 1);
  CHECK(r1.coefficient(MultiIndex{0}) == doctest::Approx(1.0));

  // x0^3 x1: the coefficient picks up 1/scale so that decomposition points
  // shrink into the unit ball (points are recovered by multiplying back).
  const auto f2 = make_poly(2, {{{3, 1}, 1.0}});
  const auto r2 = dehomogenize_rescale(f2, 2.0);
  CHECK(r2.coefficient(MultiIndex{1}) == doctest::Approx(0.5));

  CHECK_THROWS_AS(dehomogenize_rescale(make_poly(2, {{{1, 0}, 1.0}, {{0, 2}, 1.0}}), 2.0),
                  std::domain_error);

  // Round trip against a known decomposition: F = sum w (1 + <xi, y>)^d has
  // rescaled form sum w (1 + <xi/s, x>)^d.
  TestRng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.uniform_int(1, 2);
    const int d = rng.uniform_int(2, 4);
    const double s = rng.uniform(1.0, 8.0);
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = rng.uniform(-3, 3);
    // Homogenize (1 + <xi, y>)^d as (x0 + <xi, y>)^d.
    Eigen::VectorXd lifted(n + 1);
    lifted[0] = 1.0;
    lifted.tail(n) = xi;
    Polynomial hom(n + 1);
    for (const auto& a : monomials_upto(n + 1, d)) {
      if (a.total() != d) continue;
      double coef = multinomial(d, a);
      for (int i = 0; i < n + 1; ++i)
        for (int e = 0; e < a[i]; ++e) coef *= lifted[i];
      hom.add_term(a, coef);
    }
    const Polynomial back = dehomogenize_rescale(hom, s);
    const Polynomial expect = power_of_affine(Eigen::VectorXd(xi / s), d);
    CHECK(a_norm(back - expect) <= 1e-9 * (1.0 + a_norm(expect)));
  }
}

TEST_CASE("pseudo moments store densely and truncate canonically") {
  PseudoMoments lam(2, 3);
  CHECK(lam.size() == 10);
  CHECK(lam[MultiIndex{0, 0}] == 0.0);
  for (int i = 0; i < lam.size(); ++i) lam.at_index(i) = i + 1.0;
  CHECK(lam[MultiIndex{0, 0}] == doctest::Approx(1.0));  // mass is entry 0

  const auto t = lam.truncated(1);
  CHECK(t.order() == 1);
  CHECK(t.size() == 3);
  CHECK(t[MultiIndex{1, 0}] == lam[MultiIndex{1, 0}]);

  const auto up = lam.truncated(4);
  CHECK(up.order() == 4);
  CHECK(up[MultiIndex{4, 0}] == 0.0);
}

TEST_CASE("polynomials never store zero coefficients") {
  Polynomial p(1);
  p.add_term(MultiIndex{1}, 2.0);
  p.add_term(MultiIndex{1}, -2.0);
  CHECK(p.is_zero());
  CHECK(p.degree() == 0);
}
