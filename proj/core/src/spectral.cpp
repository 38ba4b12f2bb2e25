#include "moikit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "moikit/error.hpp"

namespace moikit {

namespace {

double principal_phase(cplx z) {
  const double phase = std::arg(z);
  return phase <= -std::numbers::pi ? std::numbers::pi : phase;
}

SpectralDecomposition sorted(const ComplexVector& values, const ComplexMatrix& basis, SpectrumKind kind) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  if (kind == SpectrumKind::hermitian) {
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return values[a].real() < values[b].real(); });
  } else {
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return principal_phase(values[a]) < principal_phase(values[b]);
    });
  }
  ComplexVector v(values.size());
  ComplexMatrix u(basis.rows(), basis.cols());
  for (Index k = 0; k < values.size(); ++k) {
    v[k] = values[order[static_cast<std::size_t>(k)]];
    u.col(k) = basis.col(order[static_cast<std::size_t>(k)]);
  }
  return SpectralDecomposition(std::move(v), std::move(u), kind);
}

void check_reconstruction(const SpectralDecomposition& sd, const ComplexMatrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double residual = (sd.reconstruct() - m).cwiseAbs().maxCoeff();
  if (!(residual <= kReconstructionTolerance * scale)) {
    std::ostringstream os;
    os << "spectral decomposition did not reconstruct the operator (residual " << residual << ")";
    raise(ErrorKind::numerical, os.str());
  }
}

}  // namespace

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void validate_square_finite(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    raise(ErrorKind::validation, os.str());
  }
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        std::ostringstream os;
        os << what << ": non-finite entry at (" << i << ", " << j << ")";
        raise(ErrorKind::validation, os.str());
      }
}

AsymmetryReport hermitian_asymmetry(const ComplexMatrix& m) {
  AsymmetryReport r;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const double d = std::abs(m(i, j) - std::conj(m(j, i)));
      if (d > r.value) r = {d, i, j};
    }
  return r;
}

SpectralDecomposition::SpectralDecomposition(ComplexVector eigenvalues, ComplexMatrix basis, SpectrumKind kind)
    : eigenvalues_(std::move(eigenvalues)), basis_(std::move(basis)), kind_(kind) {
  require(basis_.rows() == basis_.cols() && basis_.cols() == eigenvalues_.size() && eigenvalues_.size() > 0,
          ErrorKind::validation, "spectral decomposition: basis must be square and match the eigenvalue count");
}

Spectrum SpectralDecomposition::spectrum() const {
  return Spectrum(eigenvalues_.data(), eigenvalues_.data() + eigenvalues_.size());
}

ComplexMatrix SpectralDecomposition::projector(Index i) const {
  return basis_.col(i) * basis_.col(i).adjoint();
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return basis_ * eigenvalues_.asDiagonal() * basis_.adjoint();
}

ComplexMatrix SpectralDecomposition::apply(const std::function<cplx(cplx)>& f) const {
  ComplexVector values(dim());
  for (Index i = 0; i < dim(); ++i) {
    values[i] = f(eigenvalues_[i]);
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      std::ostringstream os;
      os << "function is not finite at eigenvalue " << eigenvalues_[i];
      raise(ErrorKind::domain, os.str());
    }
  }
  return basis_ * values.asDiagonal() * basis_.adjoint();
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix)
    : matrix_(std::move(matrix)), cache_(std::make_shared<Cache>()) {
  validate_square_finite(matrix_, "hermitian operator");
  const auto asym = hermitian_asymmetry(matrix_);
  if (asym.value > kHermitianTolerance * std::max(1.0, max_abs(matrix_))) {
    std::ostringstream os;
    os << "matrix is not Hermitian: |M(" << asym.row << "," << asym.col << ") - conj(M(" << asym.col << ","
       << asym.row << "))| = " << asym.value;
    raise(ErrorKind::validation, os.str());
  }
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix, SpectralDecomposition spectral)
    : HermitianOperator(std::move(matrix)) {
  require(spectral.kind() == SpectrumKind::hermitian && spectral.dim() == dim(), ErrorKind::validation,
          "hermitian operator: supplied decomposition does not match");
  check_reconstruction(spectral, matrix_);
  std::call_once(cache_->once, [&] { cache_->value.emplace(std::move(spectral)); });
}

const SpectralDecomposition& HermitianOperator::spectral() const {
  std::call_once(cache_->once, [this] { cache_->value.emplace(spectral_decompose(*this)); });
  return *cache_->value;
}

UnitaryOperator::UnitaryOperator(ComplexMatrix matrix)
    : matrix_(std::move(matrix)), cache_(std::make_shared<Cache>()) {
  validate_square_finite(matrix_, "unitary operator");
  const ComplexMatrix gram = matrix_.adjoint() * matrix_;
  const double defect = max_abs(gram - ComplexMatrix::Identity(dim(), dim()));
  if (defect > kUnitaryTolerance) {
    std::ostringstream os;
    os << "matrix is not unitary: max|U*U - I| = " << defect;
    raise(ErrorKind::validation, os.str());
  }
}

const SpectralDecomposition& UnitaryOperator::spectral() const {
  std::call_once(cache_->once, [this] { cache_->value.emplace(spectral_decompose(*this)); });
  return *cache_->value;
}

SpectralDecomposition spectral_decompose(const HermitianOperator& op) {
  const ComplexMatrix& m = op.matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) raise(ErrorKind::numerical, "Hermitian eigensolver did not converge");
  auto sd = sorted(solver.eigenvalues().cast<cplx>(), solver.eigenvectors(), SpectrumKind::hermitian);
  check_reconstruction(sd, m);
  return sd;
}

SpectralDecomposition spectral_decompose(const UnitaryOperator& op) {
  const ComplexMatrix& m = op.matrix();
  Eigen::ComplexSchur<ComplexMatrix> schur(m);
  if (schur.info() != Eigen::Success) raise(ErrorKind::numerical, "complex Schur decomposition did not converge");
  // A normal matrix has a diagonal Schur form; off-diagonal mass is rounding.
  ComplexVector values = schur.matrixT().diagonal();
  for (Index i = 0; i < values.size(); ++i) values[i] /= std::abs(values[i]);
  auto sd = sorted(values, schur.matrixU(), SpectrumKind::unitary);
  check_reconstruction(sd, m);
  return sd;
}

ComplexMatrix apply_scalar_function(const std::function<cplx(cplx)>& f, const HermitianOperator& op) {
  return op.spectral().apply(f);
}

ComplexMatrix apply_scalar_function(const std::function<cplx(cplx)>& f, const UnitaryOperator& op) {
  return op.spectral().apply(f);
}

UnitaryOperator exp_i(const HermitianOperator& h) {
  return UnitaryOperator(apply_scalar_function([](cplx x) { return std::exp(cplx(0.0, 1.0) * x); }, h));
}

}  // namespace moikit
