#include <gtest/gtest.h>

#include <random>

#include "moikit/error.hpp"
#include "moikit/tensor.hpp"
#include "oracles.hpp"

using namespace moikit;

namespace {

Tensor random_tensor(std::vector<Index> shape, std::mt19937_64& gen) {
  auto t = Tensor::zeros(std::move(shape));
  for (auto& z : t.data) z = cplx(oracle::uniform(gen, -1, 1), oracle::uniform(gen, -1, 1));
  return t;
}

HermitianTensor random_hermitian_tensor(const std::vector<Index>& dims, std::mt19937_64& gen) {
  const Index n = shape_product(dims);
  return HermitianTensor::fold(HermitianOperator(oracle::random_hermitian(static_cast<int>(n), gen)), dims);
}

SquareTensor random_square_tensor(const std::vector<Index>& dims, std::mt19937_64& gen) {
  const Index n = shape_product(dims);
  return SquareTensor::fold(oracle::random_matrix(static_cast<int>(n), gen), dims);
}

}  // namespace

TEST(StarK, MatchesNaiveLoops) {
  std::mt19937_64 gen(1);
  const auto a = random_tensor({2, 3, 2}, gen);
  const auto b = random_tensor({3, 2, 4}, gen);
  for (std::size_t k : {0u, 1u, 2u}) {
    const auto bk = k == 1 ? random_tensor({2, 4}, gen) : b;
    const auto fast = star_k(a, bk, k);
    const auto slow = oracle::star_k_loops(a, bk, k);
    ASSERT_EQ(fast.shape, slow.shape);
    for (std::size_t i = 0; i < fast.data.size(); ++i) EXPECT_NEAR(std::abs(fast.data[i] - slow.data[i]), 0.0, 1e-13);
  }
}

TEST(StarK, RejectsMismatchedModes) {
  std::mt19937_64 gen(2);
  EXPECT_THROW(star_k(random_tensor({2, 3}, gen), random_tensor({2, 3}, gen), 1), Error);
}

TEST(Tensor, InnerProductIsConjugateLinearInFirst) {
  std::mt19937_64 gen(3);
  const auto u = random_tensor({2, 2}, gen);
  const auto v = random_tensor({2, 2}, gen);
  auto iu = u;
  for (auto& z : iu.data) z *= cplx(0.0, 1.0);
  EXPECT_NEAR(std::abs(inner(iu, v) - cplx(0.0, -1.0) * inner(u, v)), 0.0, 1e-14);
  EXPECT_NEAR(inner(u, u).imag(), 0.0, 1e-14);
}

TEST(SquareTensor, FoldUnfoldRoundTrip) {
  std::mt19937_64 gen(4);
  const std::vector<Index> dims{2, 3};
  const ComplexMatrix m = oracle::random_matrix(6, gen);
  const auto t = SquareTensor::fold(m, dims);
  EXPECT_EQ(t.unfold(), m);
  const auto tt = t.as_tensor();
  const std::vector<Index> idx{1, 2, 0, 1};
  EXPECT_EQ(tt.at(idx), m(1 * 3 + 2, 0 * 3 + 1));
}

TEST(HermitianTensor, RejectsNonHermitianUnfolding) {
  std::mt19937_64 gen(5);
  EXPECT_THROW(HermitianTensor(random_square_tensor({2, 2}, gen)), Error);
}

TEST(TensorEigen, ReconstructsAndFlagsPsd) {
  std::mt19937_64 gen(6);
  const auto h = random_hermitian_tensor({2, 3}, gen);
  const auto es = tensor_eigendecompose(h);
  EXPECT_EQ(es.eigenvalues.size(), 6u);
  EXPECT_LE((es.reconstruct().unfold() - h.unfold().matrix()).norm(), 1e-10);
  for (std::size_t i = 0; i < es.eigentensors.size(); ++i)
    for (std::size_t j = 0; j < es.eigentensors.size(); ++j)
      EXPECT_NEAR(std::abs(inner(es.eigentensors[i], es.eigentensors[j]) - cplx(i == j ? 1.0 : 0.0)), 0.0, 1e-10);
  const ComplexMatrix g = oracle::random_matrix(4, gen);
  const auto psd = HermitianTensor::fold(HermitianOperator(ComplexMatrix(0.5 * (g * g.adjoint() + (g * g.adjoint()).adjoint()))), {2, 2});
  EXPECT_TRUE(tensor_eigendecompose(psd).positive_semidefinite);
}

TEST(Mti, EqualsFoldedMoiOnTwoAndThreeModes) {
  std::mt19937_64 gen(7);
  for (const std::vector<Index>& dims : {std::vector<Index>{2, 2}, std::vector<Index>{2, 3}}) {
    for (std::size_t m = 2; m <= 3; ++m) {
      std::vector<HermitianTensor> hs;
      std::vector<SquareTensor> xs;
      std::vector<HermitianOperator> ops;
      std::vector<ComplexMatrix> args;
      for (std::size_t j = 0; j < m; ++j) {
        hs.push_back(random_hermitian_tensor(dims, gen));
        ops.push_back(hs.back().unfold());
      }
      for (std::size_t j = 0; j + 1 < m; ++j) {
        xs.push_back(random_square_tensor(dims, gen));
        args.push_back(xs.back().unfold());
      }
      const auto psi = MultivariateFunction::from_separable(oracle::random_separable(m, 2, 2, gen));
      const auto mti = mti_evaluate(hs, psi, xs);
      std::vector<oracle::Mat> raw;
      for (const auto& o : ops) raw.push_back(o.matrix());
      const auto direct = oracle::direct_projector_sum(
          raw, [&](const std::vector<cplx>& x) { return psi(x); }, args);
      EXPECT_EQ(mti.mode_dims, dims);
      EXPECT_LE(oracle::rel_err(mti.unfold(), direct), 1e-10);
    }
  }
}

TEST(Mti, RejectsMismatchedModeDims) {
  std::mt19937_64 gen(8);
  const std::vector<HermitianTensor> hs{random_hermitian_tensor({2, 2}, gen), random_hermitian_tensor({4}, gen)};
  const std::vector<SquareTensor> xs{random_square_tensor({2, 2}, gen)};
  EXPECT_THROW(mti_evaluate(hs, MultivariateFunction::constant(2, 1.0), xs), Error);
}
