#include "moikit/calculus.hpp"

#include <cmath>
#include <sstream>

#include "moikit/error.hpp"
#include "moikit/norms.hpp"

namespace moikit {

namespace {

constexpr int kSeriesTerms = 64;

std::vector<ComplexMatrix> copies(const ComplexMatrix& m, int k) {
  return std::vector<ComplexMatrix>(static_cast<std::size_t>(k), m);
}

ComplexMatrix identity_like(const ComplexMatrix& m) { return ComplexMatrix::Identity(m.rows(), m.cols()); }

// Σ_{m ≥ i1} z^m/m! by direct summation; valid when |z| is moderate relative to i1.
cplx series_tail(cplx z, int i1) {
  cplx term = 1.0;
  for (int m = 1; m <= i1; ++m) term *= z / static_cast<double>(m);
  cplx sum = 0.0;
  for (int m = i1; m < i1 + kSeriesTerms; ++m) {
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    term *= z / static_cast<double>(m + 1);
  }
  return sum;
}

cplx exp_minus_partial(cplx z, int i1) {
  cplx partial = 0.0;
  cplx term = 1.0;
  for (int m = 0; m < i1; ++m) {
    partial += term;
    term *= z / static_cast<double>(m + 1);
  }
  return std::exp(z) - partial;
}

cplx tail_of_exp(cplx z, int i1) {
  return std::abs(z) <= 1.0 + 0.5 * i1 ? series_tail(z, i1) : exp_minus_partial(z, i1);
}

}  // namespace

int MultiIndex::abs() const noexcept {
  int s = 0;
  for (int a : components) s += a;
  return s;
}

double MultiIndex::factorial() const {
  double p = 1.0;
  for (int a : components) p *= moikit::factorial(a);
  return p;
}

double factorial(int n) {
  require(n >= 0, ErrorKind::parameter, "factorial of a negative integer");
  if (n <= 20) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return static_cast<double>(f);
  }
  return std::tgamma(static_cast<double>(n) + 1.0);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

std::vector<MultiIndex> compositions(int total, int parts) {
  std::vector<MultiIndex> out;
  if (parts < 1 || total < parts) return out;
  std::vector<int> current;
  auto rec = [&](auto&& self, int remaining, int slots) -> void {
    if (slots == 1) {
      current.push_back(remaining);
      out.push_back(MultiIndex{current});
      current.pop_back();
      return;
    }
    for (int first = 1; first <= remaining - (slots - 1); ++first) {
      current.push_back(first);
      self(self, remaining - first, slots - 1);
      current.pop_back();
    }
  };
  rec(rec, total, parts);
  return out;
}

ComplexMatrix frechet_derivative(const ScalarFunction& f, const HermitianOperator& x, const ComplexMatrix& v,
                                 const MoiOptions& options) {
  return kth_derivative(f, x, v, 1, options);
}

ComplexMatrix kth_derivative(const ScalarFunction& f, const HermitianOperator& a, const ComplexMatrix& b, int k,
                             const MoiOptions& options) {
  require(k >= 0, ErrorKind::parameter, "derivative order must be nonnegative");
  require(b.rows() == a.dim() && b.cols() == a.dim(), ErrorKind::validation, "direction dimension differs from operator");
  const auto psi = integrand_from_divided_difference(f, k);
  const std::vector<SpectralRef> ops(static_cast<std::size_t>(k) + 1, SpectralRef(a.spectral()));
  const auto args = copies(b, k);
  return factorial(k) * moi_apply(ops, psi, args, options);
}

std::vector<HermitianOperator> difference_ladder(const HermitianOperator& a, const HermitianOperator& b, int k) {
  require(k >= 0, ErrorKind::parameter, "difference order must be nonnegative");
  require(a.dim() == b.dim(), ErrorKind::validation, "difference: operator dimensions differ");
  std::vector<HermitianOperator> ladder;
  ladder.push_back(a);
  for (int i = 1; i <= k; ++i) ladder.emplace_back(a.matrix() + static_cast<double>(i) * b.matrix());
  return ladder;
}

ComplexMatrix higher_difference(const ScalarFunction& f, const HermitianOperator& a, const HermitianOperator& b,
                                int k) {
  const auto ladder = difference_ladder(a, b, k);
  ComplexMatrix sum = ComplexMatrix::Zero(a.dim(), a.dim());
  const auto fr = [&](cplx z) { return f(cplx(z.real(), 0.0)); };
  for (int i = 0; i <= k; ++i) {
    const double sign = (k - i) % 2 == 0 ? 1.0 : -1.0;
    sum += sign * binomial(k, i) * apply_scalar_function(fr, ladder[static_cast<std::size_t>(i)]);
  }
  return sum;
}

HigherDifferenceDiagnostic higher_difference_diagnostic(const ScalarFunction& f, const HermitianOperator& a,
                                                        const HermitianOperator& b, int k) {
  require(k >= 1, ErrorKind::parameter, "difference diagnostic needs k >= 1");
  HigherDifferenceDiagnostic d;
  d.binomial = higher_difference(f, a, b, k);
  const auto ladder = difference_ladder(a, b, k);
  const auto dd = integrand_from_divided_difference(f, k);
  // Σ_j (λ_{j+1} − λ_j) telescopes to λ_{k+1} − λ_1.
  const MultivariateFunction weighted(static_cast<std::size_t>(k) + 1, [dd](std::span<const cplx> l) {
    return (l.back() - l.front()) * dd(l);
  });
  d.moi_form = moi_apply(spectral_refs<HermitianOperator>(ladder), weighted, copies(b.matrix(), k));
  d.residual = operator_norm(d.binomial - d.moi_form);
  d.scale = std::max({1.0, operator_norm(d.binomial), operator_norm(d.moi_form)});
  return d;
}

void RemainderSpec::validate() const {
  require(order >= 1, ErrorKind::parameter, "remainder order must be >= 1");
  require(!base.empty(), ErrorKind::validation, "remainder needs at least one base operator");
  if (base.size() != perturbations.size()) {
    std::ostringstream os;
    os << "remainder: " << base.size() << " base operators but " << perturbations.size() << " perturbations";
    raise(ErrorKind::validation, os.str());
  }
  const Index n = base.front().rows();
  for (std::size_t j = 0; j < base.size(); ++j) {
    validate_square_finite(base[j], "base operator");
    validate_square_finite(perturbations[j], "perturbation");
    require(base[j].rows() == n && perturbations[j].rows() == n, ErrorKind::validation,
            "remainder: operator dimensions differ");
    HermitianOperator{perturbations[j]};
    if (flavor == RemainderFlavor::self_adjoint)
      HermitianOperator{base[j]};
    else
      UnitaryOperator{base[j]};
  }
  for (const auto& t : terms) {
    if (t.slot >= base.size()) {
      std::ostringstream os;
      os << "remainder term refers to slot " << t.slot << " but only " << base.size() << " operators exist";
      raise(ErrorKind::validation, os.str());
    }
    if (flavor == RemainderFlavor::unitary && !t.phi.as_polynomial())
      raise(ErrorKind::capability, "unitary remainders require polynomial slot functions");
  }
}

ComplexMatrix taylor_remainder_sa(const RemainderSpec& spec, RemainderMethod method, const MoiOptions& options) {
  require(spec.flavor == RemainderFlavor::self_adjoint, ErrorKind::validation,
          "self-adjoint remainder called with unitary flavor");
  spec.validate();
  const Index n = spec.base.front().rows();
  const int k = spec.order;
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (const auto& term : spec.terms) {
    const HermitianOperator x(spec.base[term.slot]);
    const ComplexMatrix& h = spec.perturbations[term.slot];
    const HermitianOperator shifted(x.matrix() + h);
    if (method == RemainderMethod::direct) {
      const auto phi = [&](cplx z) { return term.phi(cplx(z.real(), 0.0)); };
      r += apply_scalar_function(phi, shifted);
      for (int m = 0; m < k; ++m) r -= kth_derivative(term.phi, x, h, m, options) / factorial(m);
    } else {
      std::vector<SpectralRef> ops{SpectralRef(shifted.spectral())};
      ops.insert(ops.end(), static_cast<std::size_t>(k), SpectralRef(x.spectral()));
      r += moi_apply(ops, integrand_from_divided_difference(term.phi, k), copies(h, k), options);
    }
  }
  return r;
}

namespace {

// Truncated t-power series with matrix coefficients.
using MatrixSeries = std::vector<ComplexMatrix>;

MatrixSeries series_mul(const MatrixSeries& a, const MatrixSeries& b) {
  const std::size_t len = a.size();
  MatrixSeries out(len, ComplexMatrix::Zero(a.front().rows(), a.front().cols()));
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = 0; i + j < len; ++j) out[i + j] += a[i] * b[j];
  return out;
}

ComplexMatrix matrix_polynomial(const Polynomial& p, const ComplexMatrix& w) {
  const auto& c = p.coeffs();
  ComplexMatrix acc = c.back() * identity_like(w);
  for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i)
    acc = acc * w + c[static_cast<std::size_t>(i)] * identity_like(w);
  return acc;
}

}  // namespace

ComplexMatrix taylor_remainder_unitary(const RemainderSpec& spec, RemainderMethod method, const MoiOptions& options) {
  require(spec.flavor == RemainderFlavor::unitary, ErrorKind::validation,
          "unitary remainder called with self-adjoint flavor");
  spec.validate();
  const Index n = spec.base.front().rows();
  const int k = spec.order;
  const cplx iu(0.0, 1.0);
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (const auto& term : spec.terms) {
    const Polynomial& phi = *term.phi.as_polynomial();
    const ComplexMatrix& x = spec.base[term.slot];
    const HermitianOperator h(spec.perturbations[term.slot]);
    const ComplexMatrix w = exp_i(h).matrix() * x;
    // (ιH)^m/m!·X for m = 0..k.
    std::vector<ComplexMatrix> scaled_powers;
    ComplexMatrix pw = identity_like(x);
    for (int m = 0; m <= k; ++m) {
      scaled_powers.push_back(pw * x);
      pw = pw * (iu * h.matrix()) / static_cast<double>(m + 1);
    }
    if (method == RemainderMethod::direct) {
      const MatrixSeries z(scaled_powers.begin(), scaled_powers.begin() + k);
      const auto& c = phi.coeffs();
      MatrixSeries acc(static_cast<std::size_t>(k), ComplexMatrix::Zero(n, n));
      acc[0] = c.back() * identity_like(x);
      for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) {
        acc = series_mul(acc, z);
        acc[0] += c[static_cast<std::size_t>(i)] * identity_like(x);
      }
      r += matrix_polynomial(phi, w);
      for (const auto& coeff : acc) r -= coeff;
    } else {
      const UnitaryOperator wu(w);
      const UnitaryOperator xu(x);
      for (int ell = 1; ell <= k; ++ell) {
        const auto psi = integrand_from_divided_difference(term.phi, ell);
        std::vector<SpectralRef> ops{SpectralRef(wu.spectral())};
        ops.insert(ops.end(), static_cast<std::size_t>(ell), SpectralRef(xu.spectral()));
        for (const auto& comp : compositions(k, ell)) {
          std::vector<ComplexMatrix> args;
          args.push_back(exp_tail(h, comp.components[0]) * x);
          for (std::size_t p = 1; p < comp.components.size(); ++p)
            args.push_back(scaled_powers[static_cast<std::size_t>(comp.components[p])]);
          r += moi_apply(ops, psi, args, options);
        }
      }
    }
  }
  return r;
}

ComplexMatrix exp_tail(const HermitianOperator& h, int i1) {
  require(i1 >= 1, ErrorKind::parameter, "exp_tail needs i1 >= 1");
  return h.spectral().apply([i1](cplx lambda) { return tail_of_exp(cplx(0.0, lambda.real()), i1); });
}

double exp_series_tail(double a, int i1) {
  require(a >= 0.0, ErrorKind::parameter, "exp_series_tail needs a nonnegative argument");
  require(i1 >= 0, ErrorKind::parameter, "exp_series_tail needs i1 >= 0");
  return tail_of_exp(cplx(a, 0.0), i1).real();
}

double rho_bound(double h_norm, const MultiIndex& composition) {
  require(!composition.components.empty(), ErrorKind::validation, "rho_bound: empty composition");
  for (int part : composition.components)
    require(part >= 1, ErrorKind::validation, "rho_bound: composition parts must be >= 1");
  double rho = exp_series_tail(h_norm, composition.components.front());
  for (std::size_t p = 1; p < composition.components.size(); ++p) {
    const int ip = composition.components[p];
    rho *= std::pow(h_norm, ip) / factorial(ip);
  }
  return rho;
}

double rho_bound(const HermitianOperator& h, const MultiIndex& composition) {
  return rho_bound(operator_norm(h.matrix()), composition);
}

double theta_sum(double h_norm, int k, int parts) {
  if (parts < 1 || parts > k) {
    std::ostringstream os;
    os << "theta_sum: need 1 <= l <= k, got l = " << parts << ", k = " << k;
    raise(ErrorKind::parameter, os.str());
  }
  double s = 0.0;
  for (const auto& c : compositions(k, parts)) s += rho_bound(h_norm, c);
  return s;
}

double theta_sum(const HermitianOperator& h, int k, int parts) {
  return theta_sum(operator_norm(h.matrix()), k, parts);
}

}  // namespace moikit
