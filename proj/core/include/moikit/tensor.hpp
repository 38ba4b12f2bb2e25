#pragma once

#include <span>
#include <vector>

#include "moikit/integrand.hpp"
#include "moikit/moi.hpp"
#include "moikit/spectral.hpp"

namespace moikit {

/// Dense complex tensor, row-major over `shape`. An empty shape is a scalar.
struct Tensor {
  std::vector<Index> shape;
  std::vector<cplx> data;

  Tensor() : data{cplx(0.0)} {}
  Tensor(std::vector<Index> shape, std::vector<cplx> data);
  static Tensor zeros(std::vector<Index> shape);

  Index size() const noexcept { return static_cast<Index>(data.size()); }
  cplx& at(std::span<const Index> index);
  cplx at(std::span<const Index> index) const;
  Tensor conj() const;
};

Index shape_product(std::span<const Index> dims);

/// Contraction of the trailing k modes of A with the leading k modes of B.
Tensor star_k(const Tensor& a, const Tensor& b, std::size_t k);

/// ⟨U, V⟩ = Σ conj(U)·V.
cplx inner(const Tensor& u, const Tensor& v);

/// Square 2N-way tensor of shape I_1×…×I_N×I_1×…×I_N. Entries are stored flat
/// row-major, which is exactly the row-major layout of its (ΠI)×(ΠI) unfolding.
struct SquareTensor {
  std::vector<Index> mode_dims;
  std::vector<cplx> entries;

  SquareTensor(std::vector<Index> mode_dims, std::vector<cplx> entries);

  Index side() const noexcept { return shape_product(mode_dims); }
  ComplexMatrix unfold() const;
  static SquareTensor fold(const ComplexMatrix& m, std::vector<Index> mode_dims);
  Tensor as_tensor() const;
};

/// Square tensor whose unfolding is Hermitian (entrywise conjugate symmetry ≤ 1e−12).
class HermitianTensor {
 public:
  explicit HermitianTensor(SquareTensor t);

  const SquareTensor& tensor() const noexcept { return t_; }
  const std::vector<Index>& mode_dims() const noexcept { return t_.mode_dims; }
  const HermitianOperator& unfold() const noexcept { return op_; }
  static HermitianTensor fold(const HermitianOperator& op, std::vector<Index> mode_dims);

 private:
  SquareTensor t_;
  HermitianOperator op_;
};

struct TensorEigenSystem {
  std::vector<Index> mode_dims;
  std::vector<double> eigenvalues;
  /// Unit-norm eigentensors of shape I_1×…×I_N.
  std::vector<Tensor> eigentensors;
  bool positive_semidefinite = false;

  /// Σ λ_i 𝒰_i ⋆_0 conj(𝒰_i), i.e. the 2N-way reconstruction.
  SquareTensor reconstruct() const;
};

inline constexpr double kPsdTolerance = 1e-10;

TensorEigenSystem tensor_eigendecompose(const HermitianTensor& h);

/// Σ ψ(λ…) 𝒫_{1,i_1} ⋆_N 𝒳_1 ⋆_N ⋯ ⋆_N 𝒫_{m,i_m}, via the unfolding isomorphism.
SquareTensor mti_evaluate(std::span<const HermitianTensor> tensors, const MultivariateFunction& psi,
                          std::span<const SquareTensor> arguments, const MoiOptions& options = {});

}  // namespace moikit
