#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace moikit {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;
/// Eigenvalues of one operator, in the order of its spectral decomposition.
using Spectrum = std::vector<cplx>;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kReconstructionTolerance = 1e-10;

/// Largest absolute entry.
double max_abs(const ComplexMatrix& m);

/// Throws a validation error unless `m` is non-empty, square and finite.
void validate_square_finite(const ComplexMatrix& m, std::string_view what);

/// Max-entry asymmetry ‖M − M*‖_max together with the offending position.
struct AsymmetryReport {
  double value = 0.0;
  Index row = 0;
  Index col = 0;
};
AsymmetryReport hermitian_asymmetry(const ComplexMatrix& m);

enum class SpectrumKind { hermitian, unitary };

/// Eigenvalues plus an orthonormal eigenbasis (columns). For Hermitian input
/// the eigenvalues are real and ascending; for unitary input they lie on the
/// unit circle and are ordered by principal phase in (−π, π].
class SpectralDecomposition {
 public:
  SpectralDecomposition(ComplexVector eigenvalues, ComplexMatrix basis, SpectrumKind kind);

  Index dim() const noexcept { return eigenvalues_.size(); }
  SpectrumKind kind() const noexcept { return kind_; }
  const ComplexVector& eigenvalues() const noexcept { return eigenvalues_; }
  const ComplexMatrix& basis() const noexcept { return basis_; }
  Spectrum spectrum() const;

  /// P_i = column_i · column_i*.
  ComplexMatrix projector(Index i) const;
  /// Σ_i λ_i P_i.
  ComplexMatrix reconstruct() const;
  /// U · diag(f(λ_1), …, f(λ_n)) · U*. Throws a domain error naming the
  /// eigenvalue when f is not finite there.
  ComplexMatrix apply(const std::function<cplx(cplx)>& f) const;

 private:
  ComplexVector eigenvalues_;
  ComplexMatrix basis_;
  SpectrumKind kind_;
};

/// Self-adjoint operator with a lazily computed, shared spectral cache.
/// Copies share the cache; the matrix itself never changes after construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix matrix);
  /// Adopts a known decomposition (validated against the matrix).
  HermitianOperator(ComplexMatrix matrix, SpectralDecomposition spectral);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.rows(); }
  const SpectralDecomposition& spectral() const;

 private:
  struct Cache {
    std::once_flag once;
    std::optional<SpectralDecomposition> value;
  };
  ComplexMatrix matrix_;
  std::shared_ptr<Cache> cache_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(ComplexMatrix matrix);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.rows(); }
  const SpectralDecomposition& spectral() const;

 private:
  struct Cache {
    std::once_flag once;
    std::optional<SpectralDecomposition> value;
  };
  ComplexMatrix matrix_;
  std::shared_ptr<Cache> cache_;
};

SpectralDecomposition spectral_decompose(const HermitianOperator& op);
SpectralDecomposition spectral_decompose(const UnitaryOperator& op);

/// f(A) through the spectral theorem.
ComplexMatrix apply_scalar_function(const std::function<cplx(cplx)>& f, const HermitianOperator& op);
ComplexMatrix apply_scalar_function(const std::function<cplx(cplx)>& f, const UnitaryOperator& op);

/// e^{ιH} for Hermitian H, computed spectrally.
UnitaryOperator exp_i(const HermitianOperator& h);

}  // namespace moikit
