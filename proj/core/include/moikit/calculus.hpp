#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "moikit/integrand.hpp"
#include "moikit/moi.hpp"
#include "moikit/spectral.hpp"

namespace moikit {

struct MultiIndex {
  std::vector<int> components;

  int abs() const noexcept;
  /// Π a_i!; exact for a_i ≤ 20.
  double factorial() const;
};

/// n! as a double (exact through 20!, correctly rounded beyond).
double factorial(int n);
double binomial(int n, int k);

/// All compositions of `total` into `parts` positive parts, lexicographic.
std::vector<MultiIndex> compositions(int total, int parts);

/// d/dt f(X + tV)|_{t=0} = T^{X,X}_{f^[1]}(V).
ComplexMatrix frechet_derivative(const ScalarFunction& f, const HermitianOperator& x, const ComplexMatrix& v,
                                 const MoiOptions& options = {});

/// d^k/dt^k f(A + tB)|_{t=0} = k!·T^{A,…,A}_{f^[k]}(B,…,B); k = 0 gives f(A).
ComplexMatrix kth_derivative(const ScalarFunction& f, const HermitianOperator& a, const ComplexMatrix& b, int k,
                             const MoiOptions& options = {});

/// Δ^k_B f(A) = Σ_i (−1)^{k−i} C(k,i) f(A + iB).
ComplexMatrix higher_difference(const ScalarFunction& f, const HermitianOperator& a, const HermitianOperator& b,
                                int k);

/// Spectra of A, A+B, …, A+kB.
std::vector<HermitianOperator> difference_ladder(const HermitianOperator& a, const HermitianOperator& b, int k);

struct HigherDifferenceDiagnostic {
  ComplexMatrix binomial;
  ComplexMatrix moi_form;
  double residual = 0.0;
  double scale = 0.0;
};

/// Compares Δ^k_B f(A) with Σ_{j=1}^k T^{A,A+B,…,A+kB}_{(λ_{j+1}−λ_j) f^[k]}(B,…,B).
/// Exploratory: the two need not agree.
HigherDifferenceDiagnostic higher_difference_diagnostic(const ScalarFunction& f, const HermitianOperator& a,
                                                        const HermitianOperator& b, int k);

/// Slot term φ_j(X_j) of f(X̲) = Σ_j φ_j(X_j). `slot` is 0-based.
struct SlotFunction {
  std::size_t slot = 0;
  ScalarFunction phi;
};

enum class RemainderFlavor { self_adjoint, unitary };
enum class RemainderMethod { direct, moi };

struct RemainderSpec {
  int order = 1;
  std::vector<SlotFunction> terms;
  /// Base operators X_j (Hermitian for self_adjoint, unitary for unitary flavor).
  std::vector<ComplexMatrix> base;
  /// Hermitian perturbations H_j.
  std::vector<ComplexMatrix> perturbations;
  RemainderFlavor flavor = RemainderFlavor::self_adjoint;

  void validate() const;
};

/// f(X̲ + H̲) − Σ_{r<k} (1/r!) d^r/dt^r f(X̲ + tH̲)|_0.
ComplexMatrix taylor_remainder_sa(const RemainderSpec& spec, RemainderMethod method, const MoiOptions& options = {});

/// f(e^{ιH̲}X̲) − Σ_{r<k} (1/r!) d^r/dt^r f(e^{ιtH̲}X̲)|_0 for polynomial φ_j.
ComplexMatrix taylor_remainder_unitary(const RemainderSpec& spec, RemainderMethod method,
                                       const MoiOptions& options = {});

/// e^{ιH} − Σ_{m<i1} (ιH)^m/m!.
ComplexMatrix exp_tail(const HermitianOperator& h, int i1);

/// Σ_{m ≥ i1} a^m/m! for a ≥ 0.
double exp_series_tail(double a, int i1);

/// ρ(H, i, ℓ) = (Σ_{m≥i_1} ‖H‖^m/m!)·Π_{p≥2} ‖H‖^{i_p}/i_p!.
double rho_bound(double h_norm, const MultiIndex& composition);
double rho_bound(const HermitianOperator& h, const MultiIndex& composition);

/// Θ(k, ℓ) = Σ ρ(H, i, ℓ) over compositions of k into ℓ parts.
double theta_sum(double h_norm, int k, int parts);
double theta_sum(const HermitianOperator& h, int k, int parts);

}  // namespace moikit
