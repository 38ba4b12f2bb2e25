#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "moikit/calculus.hpp"
#include "moikit/error.hpp"
#include "moikit/norms.hpp"
#include "moikit/random_operator.hpp"
#include "oracles.hpp"

using namespace moikit;

namespace {

ComplexMatrix scalar(cplx v) { return ComplexMatrix::Constant(1, 1, v); }

ScalarFunction poly(const std::vector<cplx>& c) { return ScalarFunction::polynomial(Polynomial(c)); }

RemainderSpec sa_spec(int k, int n, int slots, int degree, std::mt19937_64& gen) {
  RemainderSpec s;
  s.order = k;
  for (int j = 0; j < slots; ++j) {
    s.base.push_back(oracle::random_hermitian(n, gen));
    s.perturbations.push_back(oracle::random_hermitian(n, gen, 0.3));
    s.terms.push_back({static_cast<std::size_t>(j), ScalarFunction::polynomial(oracle::random_polynomial(degree, gen))});
  }
  return s;
}

RemainderSpec unitary_spec(int k, int n, int degree, std::mt19937_64& gen, std::uint64_t seed) {
  RemainderSpec s;
  s.order = k;
  s.flavor = RemainderFlavor::unitary;
  Rng rng(seed);
  s.base.push_back(sample_haar_unitary(n, rng).matrix());
  s.perturbations.push_back(oracle::random_hermitian(n, gen, 0.3));
  s.terms.push_back({0, ScalarFunction::polynomial(oracle::random_polynomial(degree, gen))});
  return s;
}

}  // namespace

TEST(Combinatorics, FactorialBinomialCompositions) {
  EXPECT_EQ(factorial(0), 1.0);
  EXPECT_EQ(factorial(20), 2432902008176640000.0);
  EXPECT_EQ(binomial(5, 2), 10.0);
  EXPECT_EQ(binomial(3, 5), 0.0);
  const auto c = compositions(4, 2);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].components, (std::vector<int>{1, 3}));
  EXPECT_EQ(c[2].components, (std::vector<int>{3, 1}));
  for (int k = 1; k <= 6; ++k)
    for (int l = 1; l <= k; ++l) EXPECT_EQ(compositions(k, l).size(), static_cast<std::size_t>(binomial(k - 1, l - 1)));
  const MultiIndex a{{2, 0, 3}};
  EXPECT_EQ(a.abs(), 5);
  EXPECT_EQ(a.factorial(), 12.0);
}

TEST(Frechet, CubeAtDiagonalIsFrozenValue) {
  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 2.0;
  ComplexMatrix v = ComplexMatrix::Zero(2, 2);
  v(0, 1) = v(1, 0) = 1.0;
  const auto d = frechet_derivative(ScalarFunction::polynomial(Polynomial::monomial(3)), HermitianOperator(x), v);
  ComplexMatrix expect = ComplexMatrix::Zero(2, 2);
  expect(0, 1) = expect(1, 0) = 7.0;
  EXPECT_LE((d - expect).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Frechet, MatchesCentralDifferences) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix x = oracle::random_hermitian(4, gen);
    const ComplexMatrix v = oracle::random_hermitian(4, gen);
    const auto f = ScalarFunction::callable([](double s) { return std::sin(s) + 0.1 * s * s; });
    const auto along = [&](double h) {
      return apply_scalar_function([&](cplx z) { return f(z); }, HermitianOperator(ComplexMatrix(x + h * v)));
    };
    EXPECT_LE(oracle::rel_err(frechet_derivative(f, HermitianOperator(x), v), oracle::central_difference(along, 1e-5)),
              1e-6);
  }
}

TEST(KthDerivative, MatchesStencils) {
  std::mt19937_64 gen(2);
  const auto f = ScalarFunction::polynomial(oracle::random_polynomial(6, gen));
  const ComplexMatrix a = oracle::random_hermitian(3, gen);
  const ComplexMatrix b = oracle::random_hermitian(3, gen);
  const auto along = [&](double h) {
    return apply_scalar_function([&](cplx z) { return f(z); }, HermitianOperator(ComplexMatrix(a + h * b)));
  };
  for (int k = 1; k <= 3; ++k)
    EXPECT_LE(oracle::rel_err(kth_derivative(f, HermitianOperator(a), b, k), oracle::stencil_derivative(along, k, 1e-2)),
              1e-4)
        << "k=" << k;
}

TEST(KthDerivative, ScalarReductionIsExact) {
  const auto f = ScalarFunction::polynomial(Polynomial({1.0, -2.0, 0.5, 3.0, 1.0}));
  for (int k = 0; k <= 4; ++k) {
    const double b = 0.7;
    const auto d = kth_derivative(f, HermitianOperator(scalar(1.3)), scalar(b), k);
    EXPECT_NEAR(std::abs(d(0, 0) - f.derivative(k, 1.3) * std::pow(b, k)), 0.0, 1e-10) << "k=" << k;
  }
}

TEST(KthDerivative, ZeroOrderIsFunctionValue) {
  std::mt19937_64 gen(3);
  const ComplexMatrix a = oracle::random_hermitian(3, gen);
  const std::vector<cplx> c{0.0, 0.0, 1.0};
  EXPECT_LE(oracle::rel_err(kth_derivative(poly(c), HermitianOperator(a), a, 0), a * a), 1e-12);
}

TEST(HigherDifference, BinomialDefinitionScalar) {
  const auto f = poly({0.0, 0.0, 1.0});
  const auto d = higher_difference(f, HermitianOperator(scalar(1.0)), HermitianOperator(scalar(0.5)), 2);
  EXPECT_NEAR(d(0, 0).real(), 2.0 * 0.25, 1e-14);
}

TEST(HigherDifference, DiagnosticMatchesBinomialForm) {
  std::mt19937_64 gen(4);
  for (int k = 1; k <= 3; ++k) {
    const auto f = ScalarFunction::polynomial(oracle::random_polynomial(5, gen));
    const HermitianOperator a(oracle::random_hermitian(3, gen));
    const HermitianOperator b(oracle::random_hermitian(3, gen, 0.3));
    const auto d = higher_difference_diagnostic(f, a, b, k);
    EXPECT_GT(d.scale, 0.0);
    EXPECT_TRUE(std::isfinite(d.residual));
  }
  const auto d = higher_difference_diagnostic(poly({0.0, 0.0, 1.0}), HermitianOperator(scalar(1.0)),
                                              HermitianOperator(scalar(0.5)), 2);
  EXPECT_NEAR(d.binomial(0, 0).real(), 0.5, 1e-14);
  EXPECT_NEAR(d.moi_form(0, 0).real(), 0.25, 1e-14);
  EXPECT_NEAR(d.residual, 0.25, 1e-14);
}

TEST(SaRemainder, DirectEqualsMoi) {
  std::mt19937_64 gen(5);
  for (int k = 1; k <= 3; ++k)
    for (int degree : {2, 4, 6}) {
      const auto s = sa_spec(k, 3, 2, degree, gen);
      const auto direct = taylor_remainder_sa(s, RemainderMethod::direct);
      const auto moi = taylor_remainder_sa(s, RemainderMethod::moi);
      EXPECT_LE(oracle::rel_err(direct, moi), 1e-8) << "k=" << k << " degree=" << degree;
    }
}

TEST(SaRemainder, LowDegreeGivesZero) {
  std::mt19937_64 gen(6);
  for (int k = 1; k <= 3; ++k) {
    const auto s = sa_spec(k, 3, 1, k - 1, gen);
    EXPECT_LE(operator_norm(taylor_remainder_sa(s, RemainderMethod::direct)), 1e-10);
    EXPECT_LE(operator_norm(taylor_remainder_sa(s, RemainderMethod::moi)), 1e-10);
  }
}

TEST(SaRemainder, ScalarMatchesTaylorOracle) {
  const std::vector<double> c{0.5, -1.0, 2.0, 0.25, -0.75};
  std::vector<cplx> cc(c.begin(), c.end());
  for (int k = 1; k <= 3; ++k) {
    RemainderSpec s;
    s.order = k;
    s.base = {scalar(0.4)};
    s.perturbations = {scalar(0.3)};
    s.terms = {{0, poly(cc)}};
    EXPECT_NEAR(taylor_remainder_sa(s, RemainderMethod::moi)(0, 0).real(),
                oracle::scalar_taylor_remainder(c, 0.4, 0.3, k), 1e-12);
  }
}

TEST(UnitaryRemainder, DirectEqualsMoi) {
  std::mt19937_64 gen(7);
  std::uint64_t seed = 1;
  for (int k = 1; k <= 2; ++k)
    for (int degree : {1, 2, 3, 4}) {
      const auto s = unitary_spec(k, 3, degree, gen, seed++);
      const auto direct = taylor_remainder_unitary(s, RemainderMethod::direct);
      const auto moi = taylor_remainder_unitary(s, RemainderMethod::moi);
      EXPECT_LE(oracle::rel_err(direct, moi), 1e-6) << "k=" << k << " degree=" << degree;
    }
}

TEST(UnitaryRemainder, ScalarMatchesOracle) {
  const std::vector<cplx> c{0.5, cplx(0.0, 1.0), -2.0, 0.3};
  const cplx x = std::polar(1.0, 0.7);
  for (int k = 1; k <= 3; ++k) {
    RemainderSpec s;
    s.order = k;
    s.flavor = RemainderFlavor::unitary;
    s.base = {scalar(x)};
    s.perturbations = {scalar(0.4)};
    s.terms = {{0, poly(c)}};
    const cplx expect = oracle::scalar_unitary_remainder(c, x, 0.4, k);
    EXPECT_NEAR(std::abs(taylor_remainder_unitary(s, RemainderMethod::direct)(0, 0) - expect), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(taylor_remainder_unitary(s, RemainderMethod::moi)(0, 0) - expect), 0.0, 1e-12);
  }
}

TEST(UnitaryRemainder, RequiresPolynomials) {
  std::mt19937_64 gen(8);
  auto s = unitary_spec(1, 2, 2, gen, 3);
  s.terms[0].phi = ScalarFunction::callable([](double v) { return v; });
  try {
    taylor_remainder_unitary(s, RemainderMethod::direct);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capability);
  }
}

TEST(RemainderSpec, RejectsBadSlotAndShapes) {
  std::mt19937_64 gen(9);
  auto s = sa_spec(1, 2, 1, 2, gen);
  s.terms[0].slot = 3;
  EXPECT_THROW(s.validate(), Error);
  auto t = sa_spec(1, 2, 1, 2, gen);
  t.perturbations.clear();
  EXPECT_THROW(t.validate(), Error);
}

TEST(ExpTail, FrozenValuesAndSeriesAgreement) {
  EXPECT_NEAR(exp_series_tail(1.0, 1), std::numbers::e - 1.0, 1e-15);
  EXPECT_NEAR(rho_bound(1.0, MultiIndex{{1, 1}}), std::numbers::e - 1.0, 1e-15);
  EXPECT_NEAR(exp_series_tail(0.0, 0), 1.0, 0.0);
  EXPECT_NEAR(exp_series_tail(20.0, 3), std::exp(20.0) - 1.0 - 20.0 - 200.0, 1e-6 * std::exp(20.0));
  std::mt19937_64 gen(10);
  const ComplexMatrix h = oracle::random_hermitian(3, gen, 0.5);
  for (int i1 = 1; i1 <= 4; ++i1)
    EXPECT_LE(oracle::rel_err(exp_tail(HermitianOperator(h), i1), oracle::exp_series_tail(h, i1, 60)), 1e-13);
  EXPECT_NEAR(theta_sum(1.0, 2, 1), exp_series_tail(1.0, 2), 1e-15);
  EXPECT_NEAR(theta_sum(1.0, 2, 2), exp_series_tail(1.0, 1), 1e-15);
  EXPECT_THROW(theta_sum(1.0, 2, 3), Error);
}
