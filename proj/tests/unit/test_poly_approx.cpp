#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "moikit/calculus.hpp"
#include "moikit/error.hpp"
#include "moikit/poly_approx.hpp"
#include "oracles.hpp"

using namespace moikit;

TEST(Monomials, CountAndOrder) {
  const auto m = monomials_of_degree(2, 2);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].components, (std::vector<int>{2, 0}));
  EXPECT_EQ(m[1].components, (std::vector<int>{1, 1}));
  EXPECT_EQ(m[2].components, (std::vector<int>{0, 2}));
  for (int a = 1; a <= 4; ++a)
    for (int d = 0; d <= 5; ++d) {
      EXPECT_EQ(monomials_of_degree(a, d).size(), homogeneous_dimension(a, d));
      EXPECT_EQ(homogeneous_dimension(a, d), static_cast<std::size_t>(binomial(a + d - 1, d)));
    }
}

TEST(MonomialPolynomial, EvaluatesAndValidates) {
  MonomialPolynomial p{2, {{MultiIndex{{2, 1}}, 3.0}, {MultiIndex{{0, 0}}, -1.0}}};
  EXPECT_NO_THROW(p.validate());
  const std::vector<double> x{2.0, -1.0};
  EXPECT_DOUBLE_EQ(p(x), 3.0 * 4.0 * -1.0 - 1.0);
  EXPECT_EQ(p.degree(), 3);
  EXPECT_DOUBLE_EQ(p.coefficient(MultiIndex{{2, 1}}), 3.0);
  EXPECT_DOUBLE_EQ(p.coefficient(MultiIndex{{1, 1}}), 0.0);
  MonomialPolynomial bad{2, {{MultiIndex{{1}}, 1.0}}};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(InnerPowers, ReconstructsRandomPolynomials) {
  std::mt19937_64 gen(1);
  Rng rng(2);
  for (int arity = 1; arity <= 3; ++arity)
    for (int degree = 0; degree <= 4; ++degree) {
      const auto p = oracle::random_monomial_polynomial(arity, degree, gen);
      const auto ip = decompose_inner_powers(p, rng);
      for (int i = 0; i <= degree; ++i) EXPECT_EQ(ip.count_of_degree(i), homogeneous_dimension(arity, i));
      const auto r = inner_power_residual(p, ip);
      EXPECT_LE(r.residual, 1e-8 * std::max(1.0, r.p_norm)) << "m=" << arity << " degree=" << degree;
    }
}

TEST(InnerPowers, LinearProductsMatchPowerForm) {
  std::mt19937_64 gen(3);
  Rng rng(4);
  for (int arity = 1; arity <= 3; ++arity) {
    const auto p = oracle::random_monomial_polynomial(arity, 4, gen);
    const auto ip = decompose_inner_powers(p, rng);
    const auto lp = to_linear_products(ip);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> x;
      for (int i = 0; i < arity; ++i) x.push_back(oracle::uniform(gen, -1, 1));
      EXPECT_NEAR(lp(x), ip(x), 1e-10 * std::max(1.0, std::abs(ip(x))));
      EXPECT_NEAR(lp(x), p(x), 1e-8);
    }
    const auto back = lp.expand();
    for (const auto& term : p.terms) EXPECT_NEAR(back.coefficient(term.exponent), term.coefficient, 1e-8);
  }
}

TEST(InnerPowers, DeterministicForSeed) {
  std::mt19937_64 gen(5);
  const auto p = oracle::random_monomial_polynomial(2, 3, gen);
  Rng a(9), b(9);
  const auto x = decompose_inner_powers(p, a);
  const auto y = decompose_inner_powers(p, b);
  ASSERT_EQ(x.terms.size(), y.terms.size());
  for (std::size_t i = 0; i < x.terms.size(); ++i) {
    EXPECT_EQ(x.terms[i].coefficient, y.terms[i].coefficient);
    EXPECT_EQ(x.terms[i].direction, y.terms[i].direction);
  }
}

TEST(Fit, ReproducesPolynomialExactly) {
  Rng rng(6);
  const std::vector<double> lo{-1.0, 0.0}, hi{1.0, 2.0};
  const auto f = [](std::span<const double> x) { return 1.0 + x[0] * x[1] - 0.5 * x[1] * x[1]; };
  const auto r = fit_polynomial(f, lo, hi, 2, rng);
  EXPECT_LE(r.sup_error, 1e-10);
  EXPECT_NEAR(r.polynomial.coefficient(MultiIndex{{1, 1}}), 1.0, 1e-10);
  EXPECT_EQ(r.test_points, 1000u);
}

TEST(Fit, ErrorShrinksWithDegree) {
  const std::vector<double> lo{-1.0}, hi{1.0};
  const auto f = [](std::span<const double> x) { return std::exp(x[0]); };
  Rng r1(7), r2(7);
  const double e2 = fit_polynomial(f, lo, hi, 2, r1).sup_error;
  const double e6 = fit_polynomial(f, lo, hi, 6, r2).sup_error;
  EXPECT_LT(e6, e2 * 1e-3);
}
