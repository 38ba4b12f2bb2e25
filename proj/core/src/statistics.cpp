#include "moikit/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "moikit/error.hpp"

namespace moikit {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

MeanEstimate mean_and_stderr(std::span<const double> v) {
  MeanEstimate e;
  if (v.empty()) return e;
  const double n = static_cast<double>(v.size());
  e.mean = pairwise_sum(v) / n;
  if (v.size() < 2) return e;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - e.mean) * (v[i] - e.mean);
  e.stderr_ = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return e;
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_uniform(std::vector<double> samples, double a, double b) {
  require(!samples.empty(), ErrorKind::validation, "KS test needs samples");
  require(a < b, ErrorKind::parameter, "KS test needs a < b");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = std::clamp((samples[i] - a) / (b - a), 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

}  // namespace moikit
