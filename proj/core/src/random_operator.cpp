#include "moikit/random_operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>

#include "moikit/error.hpp"
#include "moikit/norms.hpp"

namespace moikit {

void RandomOperatorModel::validate() const {
  require(dim >= 1, ErrorKind::validation, "random operator model: dim must be positive");
  std::visit(
      [&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, UniformLaw>) {
          require(law.a < law.b, ErrorKind::validation, "uniform law requires a < b");
        } else if constexpr (std::is_same_v<T, GaussianLaw>) {
          require(law.sd > 0.0, ErrorKind::validation, "gaussian law requires sd > 0");
        } else {
          if (static_cast<Index>(law.values.size()) != dim) {
            std::ostringstream os;
            os << "fixed law has " << law.values.size() << " values for dim " << dim;
            raise(ErrorKind::validation, os.str());
          }
        }
      },
      law);
}

UnitaryOperator sample_haar_unitary(Index dim, Rng& rng) {
  require(dim >= 1, ErrorKind::validation, "haar sampler: dim must be positive");
  ComplexMatrix z(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) z(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix& r = qr.matrixQR();
  for (Index k = 0; k < dim; ++k) {
    const cplx d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= mag > 0.0 ? d / mag : cplx(1.0);
  }
  return UnitaryOperator(std::move(q));
}

std::vector<double> sample_eigenvalues(const RandomOperatorModel& model, Rng& rng) {
  model.validate();
  std::vector<double> values(static_cast<std::size_t>(model.dim));
  std::visit(
      [&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, UniformLaw>) {
          for (auto& v : values) v = rng.uniform(law.a, law.b);
        } else if constexpr (std::is_same_v<T, GaussianLaw>) {
          for (auto& v : values) v = rng.normal(law.mean, law.sd);
        } else {
          values = law.values;
        }
      },
      model.law);
  return values;
}

HermitianOperator sample_random_hermitian(const RandomOperatorModel& model, Rng& rng) {
  const auto lambda = sample_eigenvalues(model, rng);
  const auto u = sample_haar_unitary(model.dim, rng);
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(lambda.data(), model.dim);
  ComplexMatrix a = u.matrix() * diag.cast<cplx>().asDiagonal() * u.matrix().adjoint();
  ComplexMatrix herm = (a + a.adjoint()) * 0.5;
  return HermitianOperator(std::move(herm));
}

HermitianOperator sample_hermitian_direction(Index dim, double norm, Rng& rng) {
  ComplexMatrix g(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) g(i, j) = rng.complex_normal();
  ComplexMatrix h = (g + g.adjoint()) * 0.5;
  const double n = operator_norm(h);
  if (n > 0.0) h *= norm / n;
  return HermitianOperator((h + h.adjoint()) * 0.5);
}

}  // namespace moikit
