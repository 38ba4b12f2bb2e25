#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moikit/spectral.hpp"

namespace moikit {

/// Polynomial with complex coefficients, ascending by degree.
class Polynomial {
 public:
  Polynomial() : coeffs_{cplx(0.0)} {}
  explicit Polynomial(std::vector<cplx> coeffs);
  static Polynomial monomial(int power, cplx coefficient = 1.0);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  cplx operator()(cplx z) const;
  Polynomial derivative(int order = 1) const;

 private:
  std::vector<cplx> coeffs_;
};

/// Scalar integrand f with whatever derivative access its kind provides.
///   polynomial                 exact derivatives of every order, complex arguments
///   callable_with_derivatives  f, f', …, f^(K) supplied by the caller, real arguments
///   callable_only              value only; derivatives up to order 3 by
///                              Richardson-extrapolated central differences
class ScalarFunction {
 public:
  enum class Kind { polynomial, callable_with_derivatives, callable_only };
  using RealFn = std::function<double(double)>;

  static ScalarFunction polynomial(Polynomial p, std::string domain_note = {});
  /// fns[r] is the r-th derivative; fns[0] is the value.
  static ScalarFunction with_derivatives(std::vector<RealFn> fns, std::string domain_note = {});
  static ScalarFunction callable(RealFn value, std::string domain_note = {});

  Kind kind() const noexcept { return kind_; }
  const std::string& domain_note() const noexcept { return note_; }
  const Polynomial* as_polynomial() const noexcept { return kind_ == Kind::polynomial ? &poly_ : nullptr; }

  cplx operator()(cplx z) const;
  /// Highest derivative order this function can provide.
  int derivative_order_available() const noexcept;
  /// r-th derivative at a real point; capability error beyond the available order.
  double derivative(int order, double x) const;

 private:
  Kind kind_ = Kind::polynomial;
  Polynomial poly_;
  std::vector<RealFn> fns_;
  std::string note_;
};

inline constexpr int kNumericDerivativeMaxOrder = 3;

/// Finite projective-tensor representation ψ(λ) = Σ_n Π_i f_{i,n}(λ_i).
struct SeparableIntegrand {
  std::size_t arity = 0;
  std::vector<std::vector<ScalarFunction>> terms;

  void validate() const;
  cplx operator()(std::span<const cplx> lambda) const;
};

/// ψ(λ_1, …, λ_m), optionally carrying a separable representation.
class MultivariateFunction {
 public:
  using Fn = std::function<cplx(std::span<const cplx>)>;

  MultivariateFunction(std::size_t arity, Fn fn, std::optional<SeparableIntegrand> separable = std::nullopt);
  static MultivariateFunction from_separable(SeparableIntegrand s);
  static MultivariateFunction constant(std::size_t arity, cplx value);

  std::size_t arity() const noexcept { return arity_; }
  cplx operator()(std::span<const cplx> lambda) const { return fn_(lambda); }
  const std::optional<SeparableIntegrand>& separable() const noexcept { return separable_; }

 private:
  std::size_t arity_;
  Fn fn_;
  std::optional<SeparableIntegrand> separable_;
};

/// αφ + βψ; the separable form (when both exist) concatenates scaled terms.
MultivariateFunction linear_combination(cplx alpha, const MultivariateFunction& phi, cplx beta,
                                        const MultivariateFunction& psi);

/// (p ⊕ q)(λ_1..λ_m) = p(λ_1..λ_k)·q(λ_{k+1}..λ_m): all pairwise term concatenations.
SeparableIntegrand integrand_oplus(const SeparableIntegrand& p, const SeparableIntegrand& q);
MultivariateFunction integrand_oplus(const MultivariateFunction& p, const MultivariateFunction& q);

/// Σ_n Π_i max_{λ ∈ spectra_i} |f_{i,n}(λ)|. Depends on the representation,
/// not on the function it represents.
double projective_norm_bound(const SeparableIntegrand& psi, std::span<const Spectrum> spectra);

/// max |ψ| over the Cartesian product of the spectra.
double sup_norm_on_grid(const MultivariateFunction& psi, std::span<const Spectrum> spectra);

/// Largest relative discrepancy between ψ and its separable form on a 5^m grid
/// over the box [lo, hi]^m: |ψ − Σ Π f| / (1 + |ψ|). Zero when no separable form.
double separable_consistency_defect(const MultivariateFunction& psi, double lo, double hi);

// ---- divided differences ------------------------------------------------

/// Default confluence tolerance 1e−7·max(1, max|node|).
double default_confluence_tolerance(std::span<const cplx> nodes);

struct DividedDifferenceSpec {
  ScalarFunction f;
  std::vector<cplx> nodes;  // order + 1 nodes
  std::optional<double> confluence_tolerance;
};

/// f^[n](λ_0, …, λ_n). Polynomials use the complete-homogeneous-symmetric
/// expansion (exact at coincident and complex nodes). Other functions use the
/// Newton table on sorted real nodes, replacing τ-coincident clusters by
/// f^(r)(λ)/r!.
cplx divided_difference(const ScalarFunction& f, std::span<const cplx> nodes,
                        std::optional<double> confluence_tolerance = std::nullopt);
cplx divided_difference(const DividedDifferenceSpec& spec);

/// Monomial expansion of p^[k]: for each power p ≥ k, the terms
/// c_p·λ_0^{a_0}·λ_1^{a_1}⋯λ_k^{a_k} over compositions a of p − k.
SeparableIntegrand divided_difference_separable(const Polynomial& p, int order);

/// (λ_0, …, λ_k) ↦ f^[k](λ_0, …, λ_k); polynomials also carry the separable form.
MultivariateFunction integrand_from_divided_difference(const ScalarFunction& f, int order);

}  // namespace moikit
