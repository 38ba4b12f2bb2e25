#pragma once

#include <span>
#include <vector>

namespace moikit {

/// Pairwise summation in a fixed tree order.
double pairwise_sum(std::span<const double> values);

struct MeanEstimate {
  double mean = 0.0;
  /// Sample standard deviation over √N.
  double stderr_ = 0.0;
};

MeanEstimate mean_and_stderr(std::span<const double> values);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against uniform(a, b), asymptotic p-value.
KsResult ks_uniform(std::vector<double> samples, double a, double b);

/// Kolmogorov survival function Q(λ) = 2 Σ (−1)^{j−1} e^{−2 j² λ²}.
double kolmogorov_q(double lambda);

}  // namespace moikit
