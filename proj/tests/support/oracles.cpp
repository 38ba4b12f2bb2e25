#include "oracles.hpp"

#include <cmath>

namespace oracle {

double uniform(std::mt19937_64& gen, double a, double b) {
  return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(gen);
}

Mat direct_projector_sum(const std::vector<Mat>& hermitians, const Psi& psi, const std::vector<Mat>& args) {
  const std::size_t m = hermitians.size();
  const Eigen::Index n = hermitians.front().rows();
  std::vector<std::vector<Mat>> proj(m);
  std::vector<std::vector<cplx>> eig(m);
  for (std::size_t j = 0; j < m; ++j) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitians[j]);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXcd v = es.eigenvectors().col(i);
      proj[j].push_back(v * v.adjoint());
      eig[j].push_back(es.eigenvalues()(i));
    }
  }
  Mat total = Mat::Zero(n, n);
  std::vector<Eigen::Index> idx(m, 0);
  std::vector<cplx> point(m);
  while (true) {
    Mat prod = proj[0][static_cast<std::size_t>(idx[0])];
    point[0] = eig[0][static_cast<std::size_t>(idx[0])];
    for (std::size_t j = 1; j < m; ++j) {
      prod = prod * args[j - 1] * proj[j][static_cast<std::size_t>(idx[j])];
      point[j] = eig[j][static_cast<std::size_t>(idx[j])];
    }
    total += psi(point) * prod;
    std::size_t d = m;
    while (d > 0 && ++idx[d - 1] == n) idx[--d] = 0;
    if (d == 0) break;
  }
  return total;
}

cplx divided_difference(const std::function<cplx(cplx)>& f, const std::vector<cplx>& nodes) {
  if (nodes.size() == 1) return f(nodes[0]);
  const std::vector<cplx> head(nodes.begin(), nodes.end() - 1);
  const std::vector<cplx> tail(nodes.begin() + 1, nodes.end());
  return (divided_difference(f, tail) - divided_difference(f, head)) / (nodes.back() - nodes.front());
}

Mat polynomial_of_matrix(const std::vector<cplx>& coeffs, const Mat& m) {
  Mat total = Mat::Zero(m.rows(), m.cols());
  Mat power = Mat::Identity(m.rows(), m.cols());
  for (const auto& c : coeffs) {
    total += c * power;
    power = power * m;
  }
  return total;
}

Mat stencil_derivative(const std::function<Mat(double)>& f, int r, double h) {
  // Seven-point central stencils; sixth order for r = 1, 2 and fourth order for r = 3.
  static const double w1[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  static const double w2[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
  static const double w3[7] = {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8};
  const double* w = r == 1 ? w1 : r == 2 ? w2 : w3;
  Mat acc = Mat::Zero(f(0.0).rows(), f(0.0).cols());
  for (int s = -3; s <= 3; ++s)
    if (w[s + 3] != 0.0) acc += w[s + 3] * f(s * h);
  return acc / std::pow(h, r);
}

Mat central_difference(const std::function<Mat(double)>& f, double h) { return (f(h) - f(-h)) / (2.0 * h); }

moikit::Tensor star_k_loops(const moikit::Tensor& a, const moikit::Tensor& b, std::size_t k) {
  std::vector<Eigen::Index> out_shape(a.shape.begin(), a.shape.end() - static_cast<std::ptrdiff_t>(k));
  out_shape.insert(out_shape.end(), b.shape.begin() + static_cast<std::ptrdiff_t>(k), b.shape.end());
  const std::vector<Eigen::Index> inner(b.shape.begin(), b.shape.begin() + static_cast<std::ptrdiff_t>(k));
  auto out = moikit::Tensor::zeros(out_shape);
  const std::size_t ra = a.shape.size() - k;
  auto for_each = [](const std::vector<Eigen::Index>& shape, const std::function<void(const std::vector<Eigen::Index>&)>& fn) {
    std::vector<Eigen::Index> idx(shape.size(), 0);
    while (true) {
      fn(idx);
      std::size_t d = shape.size();
      while (d > 0 && ++idx[d - 1] == shape[d - 1]) idx[--d] = 0;
      if (d == 0) break;
    }
  };
  for_each(out_shape, [&](const std::vector<Eigen::Index>& o) {
    cplx s = 0.0;
    for_each(inner, [&](const std::vector<Eigen::Index>& c) {
      std::vector<Eigen::Index> ia(o.begin(), o.begin() + static_cast<std::ptrdiff_t>(ra));
      ia.insert(ia.end(), c.begin(), c.end());
      std::vector<Eigen::Index> ib(c.begin(), c.end());
      ib.insert(ib.end(), o.begin() + static_cast<std::ptrdiff_t>(ra), o.end());
      s += a.at(ia) * b.at(ib);
    });
    out.at(o) = s;
  });
  return out;
}

double scalar_taylor_remainder(const std::vector<double>& coeffs, double x, double h, int k) {
  auto eval = [&](double t) {
    double s = 0.0;
    for (std::size_t p = coeffs.size(); p-- > 0;) s = s * t + coeffs[p];
    return s;
  };
  double taylor = 0.0;
  for (int r = 0; r < k; ++r) {
    // r-th derivative at x divided by r!: Σ_p c_p C(p, r) x^{p−r}.
    double d = 0.0;
    for (std::size_t p = static_cast<std::size_t>(r); p < coeffs.size(); ++p) {
      double binom = 1.0;
      for (int i = 1; i <= r; ++i) binom = binom * static_cast<double>(static_cast<int>(p) - r + i) / i;
      d += coeffs[p] * binom * std::pow(x, static_cast<int>(p) - r);
    }
    taylor += d * std::pow(h, r);
  }
  return eval(x + h) - taylor;
}

cplx scalar_unitary_remainder(const std::vector<cplx>& coeffs, cplx x, double h, int k) {
  const cplx iu(0.0, 1.0);
  cplx full = 0.0, taylor = 0.0;
  for (std::size_t p = 0; p < coeffs.size(); ++p) {
    const cplx cp = coeffs[p] * std::pow(x, static_cast<int>(p));
    full += cp * std::exp(iu * static_cast<double>(p) * h);
    double fact = 1.0;
    for (int r = 0; r < k; ++r) {
      if (r > 0) fact *= r;
      taylor += cp * std::pow(iu * static_cast<double>(p) * h, r) / fact;
    }
  }
  return full - taylor;
}

Mat exp_series_tail(const Mat& h, int i1, int terms) {
  const cplx iu(0.0, 1.0);
  Mat term = Mat::Identity(h.rows(), h.cols());
  for (int m = 1; m <= i1; ++m) term = term * (iu * h) / static_cast<double>(m);
  Mat sum = Mat::Zero(h.rows(), h.cols());
  for (int m = i1; m < i1 + terms; ++m) {
    sum += term;
    term = term * (iu * h) / static_cast<double>(m + 1);
  }
  return sum;
}

double random_vector_norm(const Mat& m, int trials, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXcd v(m.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(nd(gen), nd(gen));
    v.normalize();
    best = std::max(best, (m * v).norm());
  }
  return best;
}

Mat random_matrix(int n, std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> nd;
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scale * cplx(nd(gen), nd(gen));
  return m;
}

Mat random_hermitian(int n, std::mt19937_64& gen, double scale) {
  const Mat g = random_matrix(n, gen, scale);
  Mat h = 0.5 * (g + g.adjoint());
  for (int i = 0; i < n; ++i) h(i, i) = h(i, i).real();
  return h;
}

std::vector<double> random_real_coeffs(int degree, std::mt19937_64& gen) {
  std::vector<double> c;
  for (int i = 0; i <= degree; ++i) c.push_back(uniform(gen, -1.0, 1.0));
  return c;
}

moikit::Polynomial random_polynomial(int degree, std::mt19937_64& gen) {
  std::vector<cplx> c;
  for (double x : random_real_coeffs(degree, gen)) c.emplace_back(x, 0.0);
  return moikit::Polynomial(c);
}

moikit::SeparableIntegrand random_separable(std::size_t arity, int terms, int degree, std::mt19937_64& gen) {
  moikit::SeparableIntegrand s;
  s.arity = arity;
  for (int t = 0; t < terms; ++t) {
    std::vector<moikit::ScalarFunction> row;
    for (std::size_t i = 0; i < arity; ++i) row.push_back(moikit::ScalarFunction::polynomial(random_polynomial(degree, gen)));
    s.terms.push_back(std::move(row));
  }
  return s;
}

moikit::MonomialPolynomial random_monomial_polynomial(int arity, int degree, std::mt19937_64& gen) {
  moikit::MonomialPolynomial p;
  p.arity = arity;
  for (int d = 0; d <= degree; ++d)
    for (const auto& e : moikit::monomials_of_degree(arity, d)) p.terms.push_back({e, uniform(gen, -1.0, 1.0)});
  return p;
}

double rel_err(const Mat& a, const Mat& b) {
  const double scale = std::max({1.0, a.norm(), b.norm()});
  return (a - b).norm() / scale;
}

}  // namespace oracle
