#include "moikit/norms.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "moikit/error.hpp"

namespace moikit {

Eigen::VectorXd singular_values(const ComplexMatrix& m) {
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

double operator_norm(const ComplexMatrix& m) {
  const auto sigma = singular_values(m);
  return sigma.size() == 0 ? 0.0 : sigma[0];
}

double schatten_norm_from_singular_values(const Eigen::VectorXd& sigma, double p) {
  if (!(p >= 1.0)) {
    std::ostringstream os;
    os << "Schatten exponent must satisfy p >= 1, got " << p;
    raise(ErrorKind::parameter, os.str());
  }
  if (sigma.size() == 0) return 0.0;
  const double top = sigma.maxCoeff();
  if (std::isinf(p) || top == 0.0) return top;
  // Scaled by σ_max: the sum is ≥ 1, so the result never drops below σ_max.
  double sum = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) sum += std::pow(sigma[i] / top, p);
  return top * std::pow(sum, 1.0 / p);
}

double schatten_norm(const ComplexMatrix& m, double p) {
  return schatten_norm_from_singular_values(singular_values(m), p);
}

}  // namespace moikit
