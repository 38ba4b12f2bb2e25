#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moikit/integrand.hpp"
#include "moikit/random_operator.hpp"
#include "moikit/statistics.hpp"

namespace moikit {

enum class TheoremId {
  moi_norm_a,
  moi_norm_schatten_b,
  first_derivative,
  kth_derivative,
  higher_difference,
  sa_remainder,
  unitary_remainder,
};

std::string_view to_string(TheoremId id) noexcept;
TheoremId parse_theorem_id(std::string_view name);

/// Inputs per theorem:
///   moi_norm_a / moi_norm_schatten_b  models A_1..A_m, fixed X_1..X_{m−1}, `integrand`, `schatten_p` (b)
///   first_derivative                   model X, fixed V (dX/dt), `function`, `upsilon` > ‖V‖
///   kth_derivative                     model A, fixed B, `function`, `order`
///   higher_difference                  model A, fixed Hermitian B, `function`, `order`, `kappa`
///   sa_remainder                       models X_j, fixed H_j, `slot_functions`, `order`
///   unitary_remainder                  models give the dims of Haar X_j, fixed H_j, `slot_functions`, `order`
/// Random draws come from the experiment seed; model seeds are not consulted.
struct TailBoundExperiment {
  TheoremId theorem = TheoremId::moi_norm_a;
  std::vector<RandomOperatorModel> operator_models;
  std::vector<ComplexMatrix> fixed_inputs;
  std::optional<SeparableIntegrand> integrand;
  std::optional<ScalarFunction> function;
  std::vector<ScalarFunction> slot_functions;
  int order = 1;
  std::vector<double> schatten_p;
  double upsilon = 0.0;
  double kappa = 0.0;
  std::vector<double> theta_grid;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TailBoundRow {
  double theta = 0.0;
  double empirical_prob = 0.0;
  /// sqrt(p̂(1−p̂)/N + stderr(bound)²).
  double mc_stderr = 0.0;
  double bound_rhs = 0.0;
  bool satisfied = false;
};

struct ExpectationEstimate {
  std::string name;
  MeanEstimate estimate;
};

struct TailBoundReport {
  TheoremId theorem = TheoremId::moi_norm_a;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t completed = 0;
  std::size_t aborted = 0;
  /// More than 1% of samples aborted.
  bool run_failed = false;
  std::string norm_surrogate = "projective";
  std::vector<TailBoundRow> rows;
  MeanEstimate statistic;
  std::vector<ExpectationEstimate> expectations;
  /// Fixed-κ reading (higher_difference only); samples violating κ are excluded.
  std::vector<TailBoundRow> fixed_kappa_rows;
  std::size_t kappa_excluded = 0;
  std::map<std::string, double> constants;
  std::vector<std::string> abort_messages;

  bool all_satisfied() const;
};

struct HarnessOptions {
  int workers = 1;
};

inline constexpr double kMaxAbortFraction = 0.01;

TailBoundReport run_tail_bound(const TailBoundExperiment& exp, const HarnessOptions& options = {});

/// p̂ ≤ bound + 3·sqrt(var_p + var_bound), with var_p = p̂(1−p̂)/N.
TailBoundRow tail_row(double theta, std::span<const double> statistic, std::span<const double> bound_numerator);

using StatisticGenerator = std::function<double(Rng&)>;

/// Mean and stderr of a statistic over N per-sample streams mix64(seed, i).
MeanEstimate estimate_expectation(const StatisticGenerator& gen, std::size_t samples, std::uint64_t seed,
                                  const HarnessOptions& options = {});

struct ConvergenceConfig {
  RandomOperatorModel model;
  ScalarFunction function = ScalarFunction::polynomial(Polynomial::monomial(1));
  /// Integrand order n: T = T^{A_0..A_n}_{f^[n]}(X_1..X_n).
  int order = 1;
  int r = 1;
  double eps0 = 0.1;
  int steps = 64;
  std::size_t samples = 200;
  double perturbation_norm = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ConvergenceRow {
  int m = 0;
  double eps = 0.0;
  MeanEstimate difference;  // E‖T(A^{(m)}) − T(A)‖^r
  MeanEstimate bound;       // E (continuity RHS)^r
  bool dominated = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::size_t aborted = 0;
  bool run_failed = false;
  bool dominated = false;
  bool monotone_decreasing = false;
  double decay_ratio = 0.0;
  /// E_M ≤ 1e−3·E_1.
  bool decay_target_met = false;
  std::string norm_surrogate = "projective";
};

ConvergenceReport convergence_in_mean_check(const ConvergenceConfig& config, const HarnessOptions& options = {});

/// Runs `body(i)` for i in [0, count) over strided worker threads; rethrows the first failure.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace moikit
