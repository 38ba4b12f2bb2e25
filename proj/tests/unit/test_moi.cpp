#include <gtest/gtest.h>

#include <random>

#include "moikit/error.hpp"
#include "moikit/moi.hpp"
#include "moikit/norms.hpp"
#include "oracles.hpp"

using namespace moikit;

namespace {

struct Instance {
  std::vector<HermitianOperator> ops;
  std::vector<ComplexMatrix> args;
  std::vector<SpectralRef> refs() const { return spectral_refs<HermitianOperator>(ops); }
  std::vector<oracle::Mat> raw() const {
    std::vector<oracle::Mat> r;
    for (const auto& o : ops) r.push_back(o.matrix());
    return r;
  }
};

Instance random_instance(int n, int m, std::mt19937_64& gen) {
  Instance in;
  for (int j = 0; j < m; ++j) in.ops.emplace_back(oracle::random_hermitian(n, gen));
  for (int j = 0; j + 1 < m; ++j) in.args.push_back(oracle::random_matrix(n, gen));
  return in;
}

MultivariateFunction lift(const SeparableIntegrand& s) { return MultivariateFunction::from_separable(s); }

oracle::Psi as_psi(const MultivariateFunction& f) {
  return [f](const std::vector<cplx>& x) { return f(x); };
}

}  // namespace

TEST(MoiApply, ArityOneIsFunctionalCalculus) {
  std::mt19937_64 gen(1);
  const HermitianOperator a(oracle::random_hermitian(4, gen));
  const std::vector<cplx> coeffs{0.5, -1.0, 0.25, 2.0};
  const auto psi = MultivariateFunction(1, [&](std::span<const cplx> x) {
    return Polynomial(coeffs)(x[0]);
  });
  const std::vector<SpectralRef> refs{a.spectral()};
  const auto t = moi_apply(refs, psi, {});
  EXPECT_LE(oracle::rel_err(t, oracle::polynomial_of_matrix(coeffs, a.matrix())), 1e-12);
}

TEST(MoiApply, MatchesDirectProjectorSum) {
  std::mt19937_64 gen(2);
  for (int n = 2; n <= 3; ++n)
    for (int m = 2; m <= 4; ++m) {
      const auto in = random_instance(n, m, gen);
      const auto psi = lift(oracle::random_separable(static_cast<std::size_t>(m), 2, 3, gen));
      const auto refs = in.refs();
      const auto t = moi_apply(refs, psi, in.args);
      EXPECT_LE(oracle::rel_err(t, oracle::direct_projector_sum(in.raw(), as_psi(psi), in.args)), 1e-10);
    }
}

TEST(MoiApply, ConstantOneGivesProductOfArguments) {
  std::mt19937_64 gen(3);
  const auto in = random_instance(3, 3, gen);
  const auto refs = in.refs();
  const auto t = moi_apply(refs, MultivariateFunction::constant(3, 1.0), in.args);
  EXPECT_LE(oracle::rel_err(t, in.args[0] * in.args[1]), 1e-12);
}

TEST(MoiApply, DoubleOperatorIntegralOfDividedDifferenceIsCommutator) {
  std::mt19937_64 gen(4);
  const HermitianOperator a(oracle::random_hermitian(4, gen));
  const HermitianOperator b(oracle::random_hermitian(4, gen));
  const ComplexMatrix x = oracle::random_matrix(4, gen);
  const auto psi = integrand_from_divided_difference(ScalarFunction::polynomial(Polynomial::monomial(1)), 1);
  const std::vector<SpectralRef> refs{a.spectral(), b.spectral()};
  const std::vector<ComplexMatrix> args{x};
  // x^[1] ≡ 1.
  EXPECT_LE(oracle::rel_err(moi_apply(refs, psi, args), x), 1e-12);
  const MultivariateFunction left(2, [](std::span<const cplx> l) { return l[0]; });
  const MultivariateFunction right(2, [](std::span<const cplx> l) { return l[1]; });
  EXPECT_LE(oracle::rel_err(moi_apply(refs, left, args), a.matrix() * x), 1e-12);
  EXPECT_LE(oracle::rel_err(moi_apply(refs, right, args), x * b.matrix()), 1e-12);
}

TEST(MoiApply, WorkerCountDoesNotChangeBits) {
  std::mt19937_64 gen(5);
  const auto in = random_instance(6, 3, gen);
  const auto psi = lift(oracle::random_separable(3, 3, 3, gen));
  const auto refs = in.refs();
  const auto t1 = moi_apply(refs, psi, in.args, {1});
  for (int w : {2, 3, 7}) EXPECT_EQ(t1, moi_apply(refs, psi, in.args, {w}));
}

TEST(MoiApply, NonFiniteIntegrandIsDomainError) {
  std::mt19937_64 gen(6);
  const auto in = random_instance(2, 2, gen);
  const auto refs = in.refs();
  const MultivariateFunction bad(2, [](std::span<const cplx>) { return cplx(std::nan(""), 0.0); });
  try {
    moi_apply(refs, bad, in.args);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(MoiRequest, ValidatesShapes) {
  std::mt19937_64 gen(7);
  const HermitianOperator a(oracle::random_hermitian(2, gen));
  MoiRequest r{{a.spectral(), a.spectral()}, MultivariateFunction::constant(2, 1.0), {}};
  EXPECT_THROW(r.validate(), Error);
  r.arguments.push_back(oracle::random_matrix(3, gen));
  EXPECT_THROW(r.validate(), Error);
  r.arguments[0] = oracle::random_matrix(2, gen);
  EXPECT_NO_THROW(r.validate());
  const auto res = moi_evaluate(r);
  EXPECT_EQ(res.eigen_tuple_count, 4u);
  MoiRequest wrong_arity{{a.spectral(), a.spectral()}, MultivariateFunction::constant(3, 1.0), {r.arguments[0]}};
  EXPECT_THROW(wrong_arity.validate(), Error);
}

TEST(MoiIdentities, LinearitySplitAndPartition) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = random_instance(3, 5, gen);
    const auto refs = in.refs();
    const auto phi = lift(oracle::random_separable(5, 2, 2, gen));
    const auto psi = lift(oracle::random_separable(5, 2, 2, gen));
    const double scale = std::max(1.0, operator_norm(moi_apply(refs, phi, in.args)));
    EXPECT_LE(moi_linear_combination_residual(phi, psi, cplx(0.3, -1.0), cplx(2.0), refs, in.args), 1e-10 * scale);

    const auto p1 = lift(oracle::random_separable(2, 2, 2, gen));
    const auto p2 = lift(oracle::random_separable(3, 2, 2, gen));
    const auto whole = moi_apply(refs, integrand_oplus(p1, p2), in.args);
    EXPECT_LE(oracle::rel_err(whole, moi_split_evaluate(p1, p2, refs, in.args)), 1e-10);

    const std::vector<std::size_t> sizes{2, 1, 2};
    const std::vector<MultivariateFunction> segs{lift(oracle::random_separable(2, 1, 2, gen)),
                                                 lift(oracle::random_separable(1, 2, 2, gen)),
                                                 lift(oracle::random_separable(2, 1, 2, gen))};
    const auto joined = integrand_oplus(integrand_oplus(segs[0], segs[1]), segs[2]);
    EXPECT_LE(oracle::rel_err(moi_apply(refs, joined, in.args), moi_partition_evaluate(sizes, segs, refs, in.args)),
              1e-10);
  }
}

TEST(MoiNormBound, OperatorModeDominates) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = random_instance(3, 3, gen);
    const auto s = oracle::random_separable(3, 2, 3, gen);
    const auto refs = in.refs();
    const auto r = moi_norm_bound(refs, s, in.args, NormMode::operator_mode());
    EXPECT_LE(r.actual, r.bound * (1 + 1e-12));
    EXPECT_TRUE(std::isinf(r.q));
  }
}

TEST(MoiNormBound, SchattenHolderExponent) {
  std::mt19937_64 gen(10);
  const auto in = random_instance(3, 3, gen);
  const auto s = oracle::random_separable(3, 2, 2, gen);
  const auto refs = in.refs();
  const auto r = moi_norm_bound(refs, s, in.args, NormMode::schatten({2.0, 2.0}));
  EXPECT_DOUBLE_EQ(r.q, 1.0);
  EXPECT_TRUE(std::isinf(r.q_alternative));
  EXPECT_LE(r.actual, r.bound * (1 + 1e-12));
  const auto r2 = moi_norm_bound(refs, s, in.args, NormMode::schatten({3.0, 1.5}));
  EXPECT_NEAR(r2.q, 1.0, 1e-15);
  EXPECT_LE(r2.actual, r2.bound * (1 + 1e-12));
  const auto r3 = moi_norm_bound(refs, s, in.args, NormMode::schatten({4.0, 4.0}));
  EXPECT_DOUBLE_EQ(r3.q, 2.0);
  EXPECT_DOUBLE_EQ(r3.q_alternative, 2.0);
  try {
    moi_norm_bound(refs, s, in.args, NormMode::schatten({0.5, 2.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parameter);
  }
}

TEST(PerturbationLemma, ResidualIsRoundoff) {
  std::mt19937_64 gen(11);
  for (int m = 1; m <= 3; ++m)
    for (std::size_t j = 1; j <= static_cast<std::size_t>(m) + 1; ++j) {
      std::vector<HermitianOperator> as;
      std::vector<ComplexMatrix> xs;
      for (int i = 0; i < m; ++i) as.emplace_back(oracle::random_hermitian(3, gen));
      for (int i = 0; i < m; ++i) xs.push_back(oracle::random_matrix(3, gen));
      const HermitianOperator c(oracle::random_hermitian(3, gen));
      const HermitianOperator d(oracle::random_hermitian(3, gen));
      const auto f = ScalarFunction::polynomial(oracle::random_polynomial(5, gen));
      const auto r = perturbation_residual(f, as, j, c, d, xs);
      EXPECT_LE(r.residual, 1e-9 * std::max(1.0, r.scale)) << "m=" << m << " j=" << j;
    }
}

TEST(ContinuityLemma, LhsBelowBoundAndLinearDecay) {
  std::mt19937_64 gen(12);
  const auto f = ScalarFunction::polynomial(oracle::random_polynomial(4, gen));
  std::vector<HermitianOperator> as{HermitianOperator(oracle::random_hermitian(3, gen)),
                                    HermitianOperator(oracle::random_hermitian(3, gen))};
  const std::vector<ComplexMatrix> xs{oracle::random_matrix(3, gen)};
  std::vector<ComplexMatrix> dirs;
  for (int i = 0; i < 2; ++i) {
    ComplexMatrix h = oracle::random_hermitian(3, gen);
    dirs.push_back(h / operator_norm(h));
  }
  std::vector<double> lhs;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    std::vector<HermitianOperator> pert;
    for (int i = 0; i < 2; ++i) pert.emplace_back(ComplexMatrix(as[static_cast<std::size_t>(i)].matrix() + eps * dirs[static_cast<std::size_t>(i)]));
    const auto r = continuity_modulus(f, 1, as, pert, xs);
    EXPECT_TRUE(r.certified);
    EXPECT_LE(r.lhs, r.bound);
    lhs.push_back(r.lhs);
  }
  EXPECT_NEAR(lhs[0] / lhs[1], 10.0, 2.0);
  EXPECT_NEAR(lhs[1] / lhs[2], 10.0, 2.0);
}
