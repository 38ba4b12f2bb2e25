#include "moikit/poly_approx.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "moikit/error.hpp"

namespace moikit {

namespace {

using ExponentMap = std::map<std::vector<int>, double>;

double multinomial(const MultiIndex& a) { return factorial(a.abs()) / a.factorial(); }

double monomial_value(const MultiIndex& e, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.components.size(); ++i) v *= std::pow(x[i], e.components[i]);
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

MonomialPolynomial from_map(int arity, const ExponentMap& m) {
  MonomialPolynomial p;
  p.arity = arity;
  for (const auto& [e, c] : m)
    if (c != 0.0) p.terms.push_back({MultiIndex{e}, c});
  return p;
}

// Multiplies by Σ_l u_l x_l + u_m.
ExponentMap times_linear(const ExponentMap& p, std::span<const double> u) {
  ExponentMap out;
  const std::size_t m = u.size() - 1;
  for (const auto& [e, c] : p) {
    if (u[m] != 0.0) out[e] += c * u[m];
    for (std::size_t l = 0; l < m; ++l) {
      if (u[l] == 0.0) continue;
      auto e2 = e;
      ++e2[l];
      out[e2] += c * u[l];
    }
  }
  return out;
}

std::vector<double> unit_direction(int m, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(m));
  double norm = 0.0;
  do {
    for (auto& x : v) x = rng.normal();
    norm = std::sqrt(dot(v, v));
  } while (norm < 1e-12);
  for (auto& x : v) x /= norm;
  return v;
}

void grid_points(int m, int per_dim, double lo, double hi, const std::function<void(std::span<const double>)>& visit) {
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> x(static_cast<std::size_t>(m));
  const double step = per_dim > 1 ? (hi - lo) / (per_dim - 1) : 0.0;
  while (true) {
    for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = lo + step * idx[static_cast<std::size_t>(i)];
    visit(x);
    int d = m - 1;
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == per_dim) idx[static_cast<std::size_t>(d--)] = 0;
    if (d < 0) break;
  }
}

}  // namespace

std::vector<MultiIndex> monomials_of_degree(int arity, int degree) {
  require(arity >= 1 && degree >= 0, ErrorKind::parameter, "monomials need arity >= 1 and degree >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int slots) -> void {
    if (slots == 1) {
      cur.push_back(remaining);
      out.push_back(MultiIndex{cur});
      cur.pop_back();
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      cur.push_back(a);
      self(self, remaining - a, slots - 1);
      cur.pop_back();
    }
  };
  rec(rec, degree, arity);
  return out;
}

std::size_t homogeneous_dimension(int arity, int degree) {
  return static_cast<std::size_t>(binomial(arity + degree - 1, degree));
}

void MonomialPolynomial::validate() const {
  require(arity >= 1, ErrorKind::validation, "polynomial arity must be >= 1");
  std::set<std::vector<int>> seen;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& e = terms[t].exponent.components;
    if (static_cast<int>(e.size()) != arity) {
      std::ostringstream os;
      os << "term " << t << " has " << e.size() << " exponents, expected " << arity;
      raise(ErrorKind::validation, os.str());
    }
    for (int a : e) require(a >= 0, ErrorKind::validation, "exponents must be nonnegative");
    require(std::isfinite(terms[t].coefficient), ErrorKind::validation, "coefficients must be finite");
    if (!seen.insert(e).second) {
      std::ostringstream os;
      os << "duplicate exponent in term " << t;
      raise(ErrorKind::validation, os.str());
    }
  }
}

int MonomialPolynomial::degree() const {
  int d = 0;
  for (const auto& t : terms)
    if (t.coefficient != 0.0) d = std::max(d, t.exponent.abs());
  return d;
}

double MonomialPolynomial::operator()(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == arity, ErrorKind::validation, "polynomial evaluated at wrong arity");
  double s = 0.0;
  for (const auto& t : terms) s += t.coefficient * monomial_value(t.exponent, x);
  return s;
}

double MonomialPolynomial::coefficient(const MultiIndex& e) const {
  for (const auto& t : terms)
    if (t.exponent.components == e.components) return t.coefficient;
  return 0.0;
}

double InnerPowerForm::operator()(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coefficient * std::pow(dot(x, t.direction), t.degree);
  return s;
}

std::size_t InnerPowerForm::count_of_degree(int degree) const {
  std::size_t c = 0;
  for (const auto& t : terms) c += t.degree == degree ? 1 : 0;
  return c;
}

double LinearProductForm::operator()(std::span<const double> x) const {
  std::vector<double> xh(x.begin(), x.end());
  xh.push_back(1.0);
  double s = 0.0;
  for (const auto& term : terms) {
    double p = 1.0;
    for (const auto& u : term) p *= dot(xh, u);
    s += p;
  }
  return s;
}

MonomialPolynomial LinearProductForm::expand() const {
  ExponentMap total;
  for (const auto& term : terms) {
    ExponentMap p{{std::vector<int>(static_cast<std::size_t>(arity), 0), 1.0}};
    for (const auto& u : term) p = times_linear(p, u);
    for (const auto& [e, c] : p) total[e] += c;
  }
  return from_map(arity, total);
}

InnerPowerForm decompose_inner_powers(const MonomialPolynomial& p, Rng& rng) {
  p.validate();
  const int m = p.arity;
  const int k = p.degree();
  InnerPowerForm out;
  out.arity = m;
  for (int i = 0; i <= k; ++i) {
    const auto monos = monomials_of_degree(m, i);
    const auto n = static_cast<Index>(monos.size());
    Eigen::VectorXd rhs(n);
    for (Index a = 0; a < n; ++a) rhs(a) = p.coefficient(monos[static_cast<std::size_t>(a)]);

    double last_cond = 0.0;
    bool solved = false;
    for (int attempt = 0; attempt < kDirectionAttempts && !solved; ++attempt) {
      std::vector<std::vector<double>> dirs;
      for (Index d = 0; d < n; ++d) dirs.push_back(unit_direction(m, rng));
      Eigen::MatrixXd sys(n, n);
      for (Index a = 0; a < n; ++a) {
        const auto& alpha = monos[static_cast<std::size_t>(a)];
        for (Index d = 0; d < n; ++d)
          sys(a, d) = multinomial(alpha) * monomial_value(alpha, dirs[static_cast<std::size_t>(d)]);
      }
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      last_cond = s(n - 1) > 0.0 ? s(0) / s(n - 1) : std::numeric_limits<double>::infinity();
      if (last_cond > kDirectionConditionLimit) continue;
      const Eigen::VectorXd c = svd.solve(rhs);
      for (Index d = 0; d < n; ++d) out.terms.push_back({i, c(d), dirs[static_cast<std::size_t>(d)]});
      solved = true;
    }
    if (!solved) {
      std::ostringstream os;
      os << "inner-power decomposition failed at degree " << i << ": direction system condition number "
         << last_cond << " exceeds " << kDirectionConditionLimit << " after " << kDirectionAttempts << " attempts";
      raise(ErrorKind::numerical, os.str());
    }
  }
  return out;
}

GridResidual inner_power_residual(const MonomialPolynomial& p, const InnerPowerForm& ip) {
  GridResidual r;
  grid_points(p.arity, 10, -1.0, 1.0, [&](std::span<const double> x) {
    const double pv = p(x);
    r.residual = std::max(r.residual, std::abs(pv - ip(x)));
    r.p_norm = std::max(r.p_norm, std::abs(pv));
  });
  return r;
}

LinearProductForm to_linear_products(const InnerPowerForm& ip) {
  LinearProductForm out;
  out.arity = ip.arity;
  const auto m = static_cast<std::size_t>(ip.arity);
  std::vector<const InnerPowerTerm*> order;
  for (const auto& t : ip.terms) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(),
                   [](const InnerPowerTerm* a, const InnerPowerTerm* b) { return a->degree < b->degree; });
  std::vector<double> one(m + 1, 0.0);
  one[m] = 1.0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& t = *order[pos];
    const std::size_t factors = pos + 1;
    std::vector<std::vector<double>> term;
    if (t.degree == 0) {
      std::vector<double> u(m + 1, 0.0);
      u[m] = t.coefficient;
      term.push_back(u);
    } else {
      std::vector<double> v(t.direction.begin(), t.direction.end());
      v.push_back(0.0);
      std::vector<double> first = v;
      for (auto& x : first) x *= t.coefficient;
      term.push_back(first);
      for (int j = 1; j < t.degree; ++j) term.push_back(v);
    }
    require(term.size() <= factors, ErrorKind::numerical, "linear product form: degree exceeds triangular slot");
    while (term.size() < factors) term.push_back(one);
    out.terms.push_back(std::move(term));
  }
  return out;
}

FitReport fit_polynomial(const BoxFunction& f, std::span<const double> lo, std::span<const double> hi, int degree,
                         Rng& rng) {
  const int m = static_cast<int>(lo.size());
  require(m >= 1 && hi.size() == lo.size(), ErrorKind::validation, "fit: box bounds must have matching arity >= 1");
  require(degree >= 0, ErrorKind::parameter, "fit: degree must be nonnegative");
  for (int i = 0; i < m; ++i)
    require(lo[static_cast<std::size_t>(i)] < hi[static_cast<std::size_t>(i)], ErrorKind::validation,
            "fit: box must have lo < hi in every coordinate");

  std::vector<MultiIndex> basis;
  for (int d = 0; d <= degree; ++d)
    for (auto& e : monomials_of_degree(m, d)) basis.push_back(std::move(e));

  const int q = 2 * (degree + 1);
  std::vector<double> nodes(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) nodes[static_cast<std::size_t>(j)] = std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * q));

  std::vector<double> center(static_cast<std::size_t>(m)), half(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < center.size(); ++i) {
    center[i] = 0.5 * (lo[i] + hi[i]);
    half[i] = 0.5 * (hi[i] - lo[i]);
  }

  std::vector<std::vector<double>> ts;
  std::vector<double> values;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> x(static_cast<std::size_t>(m)), t(static_cast<std::size_t>(m));
  while (true) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = nodes[static_cast<std::size_t>(idx[i])];
      x[i] = center[i] + half[i] * t[i];
    }
    ts.push_back(t);
    values.push_back(f(x));
    int d = m - 1;
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == q) idx[static_cast<std::size_t>(d--)] = 0;
    if (d < 0) break;
  }

  Eigen::MatrixXd v(static_cast<Index>(ts.size()), static_cast<Index>(basis.size()));
  for (std::size_t r = 0; r < ts.size(); ++r)
    for (std::size_t c = 0; c < basis.size(); ++c)
      v(static_cast<Index>(r), static_cast<Index>(c)) = monomial_value(basis[c], ts[r]);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
  const Eigen::VectorXd coef = v.colPivHouseholderQr().solve(y);

  // t_i = (x_i − c_i)/h_i, expanded back into x-monomials.
  ExponentMap result;
  for (std::size_t c = 0; c < basis.size(); ++c) {
    ExponentMap term{{std::vector<int>(static_cast<std::size_t>(m), 0), coef(static_cast<Index>(c))}};
    for (int i = 0; i < m; ++i) {
      std::vector<double> u(static_cast<std::size_t>(m) + 1, 0.0);
      u[static_cast<std::size_t>(i)] = 1.0 / half[static_cast<std::size_t>(i)];
      u[static_cast<std::size_t>(m)] = -center[static_cast<std::size_t>(i)] / half[static_cast<std::size_t>(i)];
      for (int p = 0; p < basis[c].components[static_cast<std::size_t>(i)]; ++p) term = times_linear(term, u);
    }
    for (const auto& [e, val] : term) result[e] += val;
  }

  FitReport rep;
  rep.polynomial = from_map(m, result);
  rep.fit_points = ts.size();
  rep.test_points = 1000;
  for (std::size_t s = 0; s < rep.test_points; ++s) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
    rep.sup_error = std::max(rep.sup_error, std::abs(f(x) - rep.polynomial(x)));
  }
  return rep;
}

}  // namespace moikit
