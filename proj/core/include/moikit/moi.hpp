#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "moikit/integrand.hpp"
#include "moikit/spectral.hpp"

namespace moikit {

using SpectralRef = std::reference_wrapper<const SpectralDecomposition>;

struct MoiOptions {
  /// Workers partition the outermost eigen-index. Each output row is owned by
  /// one worker, so the result is bitwise identical for every worker count.
  int workers = 1;
};

/// T^{A_1..A_m}_ψ(X_1..X_{m−1}) = Σ ψ(λ_{i_1},…,λ_{i_m}) P_{i_1} X_1 P_{i_2} ⋯ X_{m−1} P_{i_m},
/// evaluated in rotated coordinates Y_j = U_j* X_j U_{j+1}. m = 1 gives ψ(A_1).
ComplexMatrix moi_apply(std::span<const SpectralRef> operators, const MultivariateFunction& psi,
                        std::span<const ComplexMatrix> arguments, const MoiOptions& options = {});

struct MoiRequest {
  std::vector<SpectralDecomposition> operators;
  MultivariateFunction integrand;
  std::vector<ComplexMatrix> arguments;

  /// m ≥ 2, arity = m, m − 1 arguments, all dimensions equal.
  void validate() const;
};

struct MoiResult {
  ComplexMatrix value;
  std::uint64_t eigen_tuple_count = 0;
  double wall_time_s = 0.0;
};

MoiResult moi_evaluate(const MoiRequest& request, const MoiOptions& options = {});

/// ‖T_{αφ+βψ} − (αT_φ + βT_ψ)‖ in operator norm.
double moi_linear_combination_residual(const MultivariateFunction& phi, const MultivariateFunction& psi, cplx alpha,
                                       cplx beta, std::span<const SpectralRef> operators,
                                       std::span<const ComplexMatrix> arguments);

/// T_{ψ1}(X_1..X_{k−1}) · X_k · T_{ψ2}(X_{k+1}..X_{m−1}) with k = arity(ψ1).
ComplexMatrix moi_split_evaluate(const MultivariateFunction& psi1, const MultivariateFunction& psi2,
                                 std::span<const SpectralRef> operators, std::span<const ComplexMatrix> arguments);

/// Factored product over contiguous segments: (Π_{i<ℓ} T_{ψ_i}(…) X_{j_i}) T_{ψ_ℓ}(…),
/// where `segment_sizes` gives the length of each segment in order.
ComplexMatrix moi_partition_evaluate(std::span<const std::size_t> segment_sizes,
                                     std::span<const MultivariateFunction> segment_integrands,
                                     std::span<const SpectralRef> operators, std::span<const ComplexMatrix> arguments);

struct NormMode {
  enum class Kind { operator_norm, schatten } kind = Kind::operator_norm;
  /// Schatten exponents p_1..p_{m−1}, each ≥ 1 with Σ 1/p_i ≤ 1.
  std::vector<double> p;

  static NormMode operator_mode() { return {}; }
  static NormMode schatten(std::vector<double> p) { return {Kind::schatten, std::move(p)}; }
};

struct NormBoundResult {
  double bound = 0.0;
  double actual = 0.0;
  /// Exponent of the result norm under the Hölder rule 1/q = Σ 1/p_i (∞ in operator mode).
  double q = 0.0;
  /// The alternative exponent 1/q = 1 − Σ 1/p_i, recorded for reports (∞ when that sum is 0;
  /// NaN when nonpositive).
  double q_alternative = 0.0;
  double projective_norm = 0.0;
};

/// bound = ‖ψ‖_proj(spectra)·Π‖X_i‖ (mode-appropriate norms); actual = norm of T.
NormBoundResult moi_norm_bound(std::span<const SpectralRef> operators, const SeparableIntegrand& psi,
                               std::span<const ComplexMatrix> arguments, const NormMode& mode);

struct ResidualReport {
  double residual = 0.0;
  /// Magnitude of the compared quantities, for relative contracts.
  double scale = 0.0;
};

/// Residual of T^{A_<j,C,A_≥j}_{f^[m]}(X) − T^{A_<j,D,A_≥j}_{f^[m]}(X) − T^{A_<j,C,D,A_≥j}_{f^[m+1]}(X_<j, C−D, X_≥j).
/// `a_list` holds A_1..A_m, `insertion` is j ∈ [1, m+1], `arguments` holds X_1..X_m.
ResidualReport perturbation_residual(const ScalarFunction& f, std::span<const HermitianOperator> a_list,
                                     std::size_t insertion, const HermitianOperator& c, const HermitianOperator& d,
                                     std::span<const ComplexMatrix> arguments);

struct ContinuityReport {
  double lhs = 0.0;
  double bound = 0.0;
  /// True when ‖f^[n+1]‖ came from a separable (projective) representation.
  bool certified = false;
};

/// lhs = ‖T^{A'}_{f^[n]}(X) − T^{A}_{f^[n]}(X)‖, bound = ‖f^[n+1]‖·Σ_i ‖A'_i − A_i‖·Π‖X_j‖
/// with the norm taken over the union of both spectra.
ContinuityReport continuity_modulus(const ScalarFunction& f, int order, std::span<const HermitianOperator> a_list,
                                    std::span<const HermitianOperator> perturbed,
                                    std::span<const ComplexMatrix> arguments);

/// Convenience: spectral references of a list of operators.
template <class Op>
std::vector<SpectralRef> spectral_refs(std::span<const Op> ops) {
  std::vector<SpectralRef> refs;
  refs.reserve(ops.size());
  for (const auto& op : ops) refs.emplace_back(op.spectral());
  return refs;
}

}  // namespace moikit
