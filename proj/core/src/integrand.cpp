#include "moikit/integrand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "moikit/error.hpp"

namespace moikit {

Polynomial::Polynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  for (const auto& c : coeffs_)
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), ErrorKind::validation,
            "polynomial coefficients must be finite");
}

Polynomial Polynomial::monomial(int power, cplx coefficient) {
  require(power >= 0, ErrorKind::validation, "monomial power must be nonnegative");
  std::vector<cplx> c(static_cast<std::size_t>(power) + 1, cplx(0.0));
  c.back() = coefficient;
  return Polynomial(std::move(c));
}

cplx Polynomial::operator()(cplx z) const {
  cplx acc = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative(int order) const {
  require(order >= 0, ErrorKind::parameter, "derivative order must be nonnegative");
  std::vector<cplx> c = coeffs_;
  for (int r = 0; r < order; ++r) {
    if (c.size() <= 1) return Polynomial();
    std::vector<cplx> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    c = std::move(d);
  }
  return Polynomial(std::move(c));
}

ScalarFunction ScalarFunction::polynomial(Polynomial p, std::string domain_note) {
  ScalarFunction f;
  f.kind_ = Kind::polynomial;
  f.poly_ = std::move(p);
  f.note_ = std::move(domain_note);
  return f;
}

ScalarFunction ScalarFunction::with_derivatives(std::vector<RealFn> fns, std::string domain_note) {
  require(!fns.empty(), ErrorKind::validation, "callable function needs at least a value function");
  ScalarFunction f;
  f.kind_ = Kind::callable_with_derivatives;
  f.fns_ = std::move(fns);
  f.note_ = std::move(domain_note);
  return f;
}

ScalarFunction ScalarFunction::callable(RealFn value, std::string domain_note) {
  ScalarFunction f;
  f.kind_ = Kind::callable_only;
  f.fns_ = {std::move(value)};
  f.note_ = std::move(domain_note);
  return f;
}

cplx ScalarFunction::operator()(cplx z) const {
  if (kind_ == Kind::polynomial) return poly_(z);
  if (z.imag() != 0.0) {
    std::ostringstream os;
    os << "real-valued callable evaluated at complex point " << z;
    raise(ErrorKind::domain, os.str());
  }
  return fns_.front()(z.real());
}

int ScalarFunction::derivative_order_available() const noexcept {
  switch (kind_) {
    case Kind::polynomial: return std::numeric_limits<int>::max();
    case Kind::callable_with_derivatives: return static_cast<int>(fns_.size()) - 1;
    case Kind::callable_only: return kNumericDerivativeMaxOrder;
  }
  return 0;
}

namespace {

double central_difference(const ScalarFunction::RealFn& f, int order, double x, double h) {
  switch (order) {
    case 1: return (f(x + h) - f(x - h)) / (2.0 * h);
    case 2: return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    case 3: return (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h);
    default: return f(x);
  }
}

// Two Richardson levels on an O(h²) stencil: steps h, h/2, h/4.
double richardson_derivative(const ScalarFunction::RealFn& f, int order, double x) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double base = order == 1 ? std::cbrt(eps) : std::pow(eps, 1.0 / (order + 6));
  const double h = base * std::max(1.0, std::abs(x));
  const double d0 = central_difference(f, order, x, h);
  const double d1 = central_difference(f, order, x, h / 2.0);
  const double d2 = central_difference(f, order, x, h / 4.0);
  const double r0 = (4.0 * d1 - d0) / 3.0;
  const double r1 = (4.0 * d2 - d1) / 3.0;
  return (16.0 * r1 - r0) / 15.0;
}

}  // namespace

double ScalarFunction::derivative(int order, double x) const {
  require(order >= 0, ErrorKind::parameter, "derivative order must be nonnegative");
  if (order > derivative_order_available()) {
    std::ostringstream os;
    os << "derivative of order " << order << " requested but only " << derivative_order_available()
       << " available";
    raise(ErrorKind::capability, os.str());
  }
  switch (kind_) {
    case Kind::polynomial: return poly_.derivative(order)(x).real();
    case Kind::callable_with_derivatives: return fns_[static_cast<std::size_t>(order)](x);
    case Kind::callable_only:
      return order == 0 ? fns_.front()(x) : richardson_derivative(fns_.front(), order, x);
  }
  return 0.0;
}

void SeparableIntegrand::validate() const {
  require(arity >= 1, ErrorKind::validation, "separable integrand: arity must be positive");
  require(!terms.empty(), ErrorKind::validation, "separable integrand: terms list is empty");
  for (std::size_t n = 0; n < terms.size(); ++n)
    if (terms[n].size() != arity) {
      std::ostringstream os;
      os << "separable integrand: term " << n << " has " << terms[n].size() << " factors, expected " << arity;
      raise(ErrorKind::validation, os.str());
    }
}

cplx SeparableIntegrand::operator()(std::span<const cplx> lambda) const {
  cplx sum = 0.0;
  for (const auto& term : terms) {
    cplx prod = 1.0;
    for (std::size_t i = 0; i < arity; ++i) prod *= term[i](lambda[i]);
    sum += prod;
  }
  return sum;
}

MultivariateFunction::MultivariateFunction(std::size_t arity, Fn fn, std::optional<SeparableIntegrand> separable)
    : arity_(arity), fn_(std::move(fn)), separable_(std::move(separable)) {
  require(arity_ >= 1, ErrorKind::validation, "multivariate function: arity must be positive");
  if (separable_) {
    separable_->validate();
    require(separable_->arity == arity_, ErrorKind::validation,
            "multivariate function: separable arity differs from function arity");
  }
}

MultivariateFunction MultivariateFunction::from_separable(SeparableIntegrand s) {
  s.validate();
  const std::size_t arity = s.arity;
  auto shared = std::make_shared<const SeparableIntegrand>(s);
  return MultivariateFunction(
      arity, [shared](std::span<const cplx> l) { return (*shared)(l); }, std::move(s));
}

MultivariateFunction MultivariateFunction::constant(std::size_t arity, cplx value) {
  SeparableIntegrand s{arity, {}};
  std::vector<ScalarFunction> term(arity, ScalarFunction::polynomial(Polynomial({cplx(1.0)})));
  term[0] = ScalarFunction::polynomial(Polynomial({value}));
  s.terms.push_back(std::move(term));
  return from_separable(std::move(s));
}

namespace {

ScalarFunction scaled(const ScalarFunction& f, cplx c) {
  if (const auto* p = f.as_polynomial()) {
    auto coeffs = p->coeffs();
    for (auto& x : coeffs) x *= c;
    return ScalarFunction::polynomial(Polynomial(std::move(coeffs)), f.domain_note());
  }
  require(c.imag() == 0.0, ErrorKind::capability, "cannot scale a real callable by a complex factor");
  const double s = c.real();
  if (f.kind() == ScalarFunction::Kind::callable_only)
    return ScalarFunction::callable([f, s](double x) { return s * f(x).real(); }, f.domain_note());
  std::vector<ScalarFunction::RealFn> fns;
  for (int r = 0; r <= f.derivative_order_available(); ++r)
    fns.push_back([f, s, r](double x) { return s * f.derivative(r, x); });
  return ScalarFunction::with_derivatives(std::move(fns), f.domain_note());
}

}  // namespace

MultivariateFunction linear_combination(cplx alpha, const MultivariateFunction& phi, cplx beta,
                                        const MultivariateFunction& psi) {
  require(phi.arity() == psi.arity(), ErrorKind::validation, "linear combination: arity mismatch");
  std::optional<SeparableIntegrand> sep;
  if (phi.separable() && psi.separable()) {
    SeparableIntegrand s{phi.arity(), {}};
    for (auto term : phi.separable()->terms) {
      term[0] = scaled(term[0], alpha);
      s.terms.push_back(std::move(term));
    }
    for (auto term : psi.separable()->terms) {
      term[0] = scaled(term[0], beta);
      s.terms.push_back(std::move(term));
    }
    sep = std::move(s);
  }
  return MultivariateFunction(
      phi.arity(), [alpha, beta, phi, psi](std::span<const cplx> l) { return alpha * phi(l) + beta * psi(l); },
      std::move(sep));
}

SeparableIntegrand integrand_oplus(const SeparableIntegrand& p, const SeparableIntegrand& q) {
  p.validate();
  q.validate();
  SeparableIntegrand out{p.arity + q.arity, {}};
  out.terms.reserve(p.terms.size() * q.terms.size());
  for (const auto& tp : p.terms)
    for (const auto& tq : q.terms) {
      auto term = tp;
      term.insert(term.end(), tq.begin(), tq.end());
      out.terms.push_back(std::move(term));
    }
  return out;
}

MultivariateFunction integrand_oplus(const MultivariateFunction& p, const MultivariateFunction& q) {
  std::optional<SeparableIntegrand> sep;
  if (p.separable() && q.separable()) sep = integrand_oplus(*p.separable(), *q.separable());
  const std::size_t k = p.arity();
  return MultivariateFunction(
      p.arity() + q.arity(),
      [p, q, k](std::span<const cplx> l) { return p(l.first(k)) * q(l.subspan(k)); }, std::move(sep));
}

double projective_norm_bound(const SeparableIntegrand& psi, std::span<const Spectrum> spectra) {
  psi.validate();
  require(spectra.size() == psi.arity, ErrorKind::validation,
          "projective norm: need one spectrum per integrand variable");
  for (const auto& s : spectra) require(!s.empty(), ErrorKind::validation, "projective norm: empty spectrum");
  double total = 0.0;
  for (const auto& term : psi.terms) {
    double prod = 1.0;
    for (std::size_t i = 0; i < psi.arity; ++i) {
      double best = 0.0;
      for (const auto& lambda : spectra[i]) best = std::max(best, std::abs(term[i](lambda)));
      prod *= best;
    }
    total += prod;
  }
  return total;
}

double sup_norm_on_grid(const MultivariateFunction& psi, std::span<const Spectrum> spectra) {
  require(spectra.size() == psi.arity(), ErrorKind::validation, "sup norm: need one spectrum per variable");
  for (const auto& s : spectra) require(!s.empty(), ErrorKind::validation, "sup norm: empty spectrum");
  const std::size_t m = spectra.size();
  std::vector<std::size_t> idx(m, 0);
  std::vector<cplx> point(m);
  double best = 0.0;
  while (true) {
    for (std::size_t i = 0; i < m; ++i) point[i] = spectra[i][idx[i]];
    best = std::max(best, std::abs(psi(point)));
    std::size_t i = 0;
    while (i < m && ++idx[i] == spectra[i].size()) idx[i++] = 0;
    if (i == m) break;
  }
  return best;
}

double separable_consistency_defect(const MultivariateFunction& psi, double lo, double hi) {
  if (!psi.separable()) return 0.0;
  Spectrum grid(5);
  for (int i = 0; i < 5; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / 4.0;
  const std::size_t m = psi.arity();
  std::vector<std::size_t> idx(m, 0);
  std::vector<cplx> point(m);
  double worst = 0.0;
  while (true) {
    for (std::size_t i = 0; i < m; ++i) point[i] = grid[idx[i]];
    const cplx direct = psi(point);
    worst = std::max(worst, std::abs(direct - (*psi.separable())(point)) / (1.0 + std::abs(direct)));
    std::size_t i = 0;
    while (i < m && ++idx[i] == grid.size()) idx[i++] = 0;
    if (i == m) break;
  }
  return worst;
}

}  // namespace moikit
