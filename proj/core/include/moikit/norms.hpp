#pragma once

#include <limits>

#include "moikit/spectral.hpp"

namespace moikit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Singular values, descending.
Eigen::VectorXd singular_values(const ComplexMatrix& m);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);

/// (Σ σ_i^p)^{1/p}; p = ∞ gives the operator norm. Throws a parameter error
/// for p < 1.
double schatten_norm(const ComplexMatrix& m, double p);

/// Schatten norm from precomputed singular values (descending).
double schatten_norm_from_singular_values(const Eigen::VectorXd& sigma, double p);

}  // namespace moikit
