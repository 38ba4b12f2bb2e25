#pragma once

#include <functional>
#include <span>
#include <vector>

#include "moikit/calculus.hpp"
#include "moikit/rng.hpp"

namespace moikit {

/// Exponent tuples of total degree `degree` in `arity` variables, lexicographic descending.
std::vector<MultiIndex> monomials_of_degree(int arity, int degree);

/// n_i = C(m + i − 1, i).
std::size_t homogeneous_dimension(int arity, int degree);

struct MonomialTerm {
  MultiIndex exponent;
  double coefficient = 0.0;
};

/// p(x) = Σ a_j x^{e_j} with unique exponents.
struct MonomialPolynomial {
  int arity = 1;
  std::vector<MonomialTerm> terms;

  void validate() const;
  int degree() const;
  double operator()(std::span<const double> x) const;
  /// Coefficient of x^e (zero when absent).
  double coefficient(const MultiIndex& e) const;
};

struct InnerPowerTerm {
  int degree = 0;
  double coefficient = 0.0;
  /// Unit vector in R^m.
  std::vector<double> direction;
};

/// Σ c⟨x, v⟩^i.
struct InnerPowerForm {
  int arity = 1;
  std::vector<InnerPowerTerm> terms;

  double operator()(std::span<const double> x) const;
  std::size_t count_of_degree(int degree) const;
};

/// Σ_i Π_j ⟨x̌, u_{i,j}⟩ with x̌ = [x, 1]; term i (1-based) has exactly i factors.
struct LinearProductForm {
  int arity = 1;
  std::vector<std::vector<std::vector<double>>> terms;

  double operator()(std::span<const double> x) const;
  /// Expands every product into monomials.
  MonomialPolynomial expand() const;
};

inline constexpr double kDirectionConditionLimit = 1e10;
inline constexpr int kDirectionAttempts = 10;

/// Per homogeneous degree i, draws n_i uniform unit directions and solves the
/// multinomial system; resamples when cond > 1e10, at most 10 attempts.
InnerPowerForm decompose_inner_powers(const MonomialPolynomial& p, Rng& rng);

/// Sup over the 10^m grid on [−1,1]^m of |p − ip|, and of |p|.
struct GridResidual {
  double residual = 0.0;
  double p_norm = 0.0;
};
GridResidual inner_power_residual(const MonomialPolynomial& p, const InnerPowerForm& ip);

/// Each c⟨x,v⟩^i becomes ⟨x̌,[cv,0]⟩⟨x̌,[v,0]⟩^{i−1}, padded with ⟨x̌,[0,1]⟩ factors.
LinearProductForm to_linear_products(const InnerPowerForm& ip);

struct FitReport {
  MonomialPolynomial polynomial;
  double sup_error = 0.0;
  std::size_t fit_points = 0;
  std::size_t test_points = 0;
};

using BoxFunction = std::function<double(std::span<const double>)>;

/// Least-squares fit of total degree ≤ k on a tensor Chebyshev grid mapped to
/// the box; sup error over 10³ independent uniform points.
FitReport fit_polynomial(const BoxFunction& f, std::span<const double> lo, std::span<const double> hi, int degree,
                         Rng& rng);

}  // namespace moikit
