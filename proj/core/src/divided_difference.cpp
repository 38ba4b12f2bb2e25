#include <algorithm>
#include <cmath>
#include <sstream>

#include "moikit/error.hpp"
#include "moikit/integrand.hpp"

namespace moikit {

namespace {

// Σ_p c_p h_{p−n}(z_0..z_n), h_r the complete homogeneous symmetric polynomial.
cplx polynomial_divided_difference(const Polynomial& p, std::span<const cplx> nodes) {
  const int order = static_cast<int>(nodes.size()) - 1;
  const int top = p.degree() - order;
  if (top < 0) return 0.0;
  std::vector<cplx> h(static_cast<std::size_t>(top) + 1, cplx(0.0));
  h[0] = 1.0;
  for (const cplx z : nodes)
    for (std::size_t r = 1; r < h.size(); ++r) h[r] += z * h[r - 1];
  cplx sum = 0.0;
  for (int r = 0; r <= top; ++r) sum += p.coeffs()[static_cast<std::size_t>(r + order)] * h[static_cast<std::size_t>(r)];
  return sum;
}

double factorial(int r) {
  double f = 1.0;
  for (int i = 2; i <= r; ++i) f *= i;
  return f;
}

cplx newton_divided_difference(const ScalarFunction& f, std::span<const cplx> nodes, double tau) {
  std::vector<double> x(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].imag() != 0.0) {
      std::ostringstream os;
      os << "divided difference of a real callable at complex node " << nodes[i];
      raise(ErrorKind::domain, os.str());
    }
    x[i] = nodes[i].real();
  }
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  // column-by-column Newton table kept in one vector: t[i] holds f[x_i..x_{i+width}]
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = f(x[i]).real();
  for (std::size_t width = 1; width < n; ++width) {
    for (std::size_t i = 0; i + width < n; ++i) {
      const std::size_t j = i + width;
      if (x[j] - x[i] <= tau) {
        t[i] = f.derivative(static_cast<int>(width), x[i]) / factorial(static_cast<int>(width));
      } else {
        t[i] = (t[i + 1] - t[i]) / (x[j] - x[i]);
      }
    }
  }
  if (!std::isfinite(t[0])) {
    std::ostringstream os;
    os << "divided difference is not finite at nodes (";
    for (std::size_t i = 0; i < n; ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    raise(ErrorKind::domain, os.str());
  }
  return t[0];
}

void compositions_into(int total, std::size_t parts, std::vector<int>& current,
                       std::vector<std::vector<int>>& out) {
  if (current.size() + 1 == parts) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int a = total; a >= 0; --a) {
    current.push_back(a);
    compositions_into(total - a, parts, current, out);
    current.pop_back();
  }
}

}  // namespace

double default_confluence_tolerance(std::span<const cplx> nodes) {
  double scale = 1.0;
  for (const auto& z : nodes) scale = std::max(scale, std::abs(z));
  return 1e-7 * scale;
}

cplx divided_difference(const ScalarFunction& f, std::span<const cplx> nodes, std::optional<double> tau) {
  require(!nodes.empty(), ErrorKind::validation, "divided difference needs at least one node");
  const double tol = tau.value_or(default_confluence_tolerance(nodes));
  require(tol > 0.0, ErrorKind::parameter, "confluence tolerance must be positive");
  if (const auto* p = f.as_polynomial()) return polynomial_divided_difference(*p, nodes);
  return newton_divided_difference(f, nodes, tol);
}

cplx divided_difference(const DividedDifferenceSpec& spec) {
  return divided_difference(spec.f, spec.nodes, spec.confluence_tolerance);
}

SeparableIntegrand divided_difference_separable(const Polynomial& p, int order) {
  require(order >= 0, ErrorKind::parameter, "divided difference order must be nonnegative");
  const std::size_t arity = static_cast<std::size_t>(order) + 1;
  SeparableIntegrand s{arity, {}};
  for (int power = order; power <= p.degree(); ++power) {
    const cplx c = p.coeffs()[static_cast<std::size_t>(power)];
    if (c == cplx(0.0)) continue;
    std::vector<std::vector<int>> comps;
    std::vector<int> current;
    compositions_into(power - order, arity, current, comps);
    for (const auto& a : comps) {
      std::vector<ScalarFunction> term;
      term.reserve(arity);
      for (std::size_t i = 0; i < arity; ++i)
        term.push_back(ScalarFunction::polynomial(Polynomial::monomial(a[i], i == 0 ? c : cplx(1.0))));
      s.terms.push_back(std::move(term));
    }
  }
  if (s.terms.empty())
    s.terms.emplace_back(arity, ScalarFunction::polynomial(Polynomial({cplx(0.0)})));
  return s;
}

MultivariateFunction integrand_from_divided_difference(const ScalarFunction& f, int order) {
  require(order >= 0, ErrorKind::parameter, "divided difference order must be nonnegative");
  if (order > f.derivative_order_available()) {
    std::ostringstream os;
    os << "integrand of order " << order << " needs derivatives the function does not provide (max "
       << f.derivative_order_available() << ")";
    raise(ErrorKind::capability, os.str());
  }
  std::optional<SeparableIntegrand> sep;
  if (const auto* p = f.as_polynomial()) sep = divided_difference_separable(*p, order);
  return MultivariateFunction(
      static_cast<std::size_t>(order) + 1, [f](std::span<const cplx> l) { return divided_difference(f, l); },
      std::move(sep));
}

}  // namespace moikit
