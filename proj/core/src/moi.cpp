#include "moikit/moi.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "moikit/error.hpp"
#include "moikit/norms.hpp"

namespace moikit {

namespace {

void check_shapes(std::span<const SpectralRef> operators, const MultivariateFunction& psi,
                  std::span<const ComplexMatrix> arguments) {
  require(!operators.empty(), ErrorKind::validation, "operator integral needs at least one operator");
  if (psi.arity() != operators.size()) {
    std::ostringstream os;
    os << "integrand arity " << psi.arity() << " does not match operator count " << operators.size();
    raise(ErrorKind::validation, os.str());
  }
  if (arguments.size() + 1 != operators.size()) {
    std::ostringstream os;
    os << "expected " << operators.size() - 1 << " argument operators, got " << arguments.size();
    raise(ErrorKind::validation, os.str());
  }
  const Index n = operators.front().get().dim();
  for (const auto& op : operators)
    require(op.get().dim() == n, ErrorKind::validation, "operator dimensions differ");
  for (const auto& x : arguments)
    require(x.rows() == n && x.cols() == n, ErrorKind::validation, "argument dimension differs from operators");
}

[[noreturn]] void non_finite_integrand(std::span<const cplx> point) {
  std::ostringstream os;
  os << "integrand is not finite at eigenvalue tuple (";
  for (std::size_t i = 0; i < point.size(); ++i) os << (i ? ", " : "") << point[i];
  os << ")";
  raise(ErrorKind::domain, os.str());
}

// Rows i_1 ∈ rows of the rotated result R(i_1, i_m).
class RotatedSum {
 public:
  RotatedSum(std::span<const SpectralRef> ops, const MultivariateFunction& psi, std::span<const ComplexMatrix> args)
      : psi_(psi), m_(ops.size()), n_(ops.front().get().dim()) {
    lambda_.reserve(m_);
    for (const auto& op : ops) lambda_.push_back(op.get().eigenvalues());
    rotated_.reserve(args.size());
    for (std::size_t j = 0; j < args.size(); ++j)
      rotated_.push_back(ops[j].get().basis().adjoint() * args[j] * ops[j + 1].get().basis());
  }

  void fill_row(Index i1, ComplexMatrix& out) const {
    std::vector<cplx> point(m_);
    point[0] = lambda_[0][i1];
    descend(1, i1, cplx(1.0), point, i1, out);
  }

 private:
  void descend(std::size_t level, Index prev, cplx prefix, std::vector<cplx>& point, Index row,
               ComplexMatrix& out) const {
    const ComplexMatrix& y = rotated_[level - 1];
    if (level + 1 == m_) {
      for (Index i = 0; i < n_; ++i) {
        point[level] = lambda_[level][i];
        const cplx w = psi_(point);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) non_finite_integrand(point);
        out(row, i) += w * prefix * y(prev, i);
      }
      return;
    }
    for (Index i = 0; i < n_; ++i) {
      point[level] = lambda_[level][i];
      descend(level + 1, i, prefix * y(prev, i), point, row, out);
    }
  }

  const MultivariateFunction& psi_;
  std::size_t m_;
  Index n_;
  std::vector<ComplexVector> lambda_;
  std::vector<ComplexMatrix> rotated_;
};

}  // namespace

ComplexMatrix moi_apply(std::span<const SpectralRef> operators, const MultivariateFunction& psi,
                        std::span<const ComplexMatrix> arguments, const MoiOptions& options) {
  check_shapes(operators, psi, arguments);
  const SpectralDecomposition& first = operators.front().get();
  const Index n = first.dim();
  if (operators.size() == 1) {
    return first.apply([&](cplx z) {
      const cplx w = psi(std::span<const cplx>(&z, 1));
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) non_finite_integrand(std::span<const cplx>(&z, 1));
      return w;
    });
  }

  const RotatedSum sum(operators, psi, arguments);
  ComplexMatrix rotated = ComplexMatrix::Zero(n, n);
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(n)));
  if (workers == 1) {
    for (Index i = 0; i < n; ++i) sum.fill_row(i, rotated);
  } else {
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (Index i = w; i < n; i += workers) sum.fill_row(i, rotated);
        } catch (...) {
          failures[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);
  }
  return first.basis() * rotated * operators.back().get().basis().adjoint();
}

void MoiRequest::validate() const {
  require(operators.size() >= 2, ErrorKind::validation, "MOI request needs at least two operators");
  std::vector<SpectralRef> refs(operators.begin(), operators.end());
  check_shapes(refs, integrand, arguments);
}

MoiResult moi_evaluate(const MoiRequest& request, const MoiOptions& options) {
  request.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<SpectralRef> refs(request.operators.begin(), request.operators.end());
  MoiResult result;
  result.value = moi_apply(refs, request.integrand, request.arguments, options);
  const auto n = static_cast<std::uint64_t>(refs.front().get().dim());
  result.eigen_tuple_count = 1;
  for (std::size_t j = 0; j < refs.size(); ++j) result.eigen_tuple_count *= n;
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double moi_linear_combination_residual(const MultivariateFunction& phi, const MultivariateFunction& psi, cplx alpha,
                                       cplx beta, std::span<const SpectralRef> operators,
                                       std::span<const ComplexMatrix> arguments) {
  require(phi.arity() == psi.arity(), ErrorKind::validation, "linear combination: integrand arities differ");
  const auto combined = linear_combination(alpha, phi, beta, psi);
  const ComplexMatrix lhs = moi_apply(operators, combined, arguments);
  const ComplexMatrix rhs = alpha * moi_apply(operators, phi, arguments) + beta * moi_apply(operators, psi, arguments);
  return operator_norm(lhs - rhs);
}

ComplexMatrix moi_split_evaluate(const MultivariateFunction& psi1, const MultivariateFunction& psi2,
                                 std::span<const SpectralRef> operators, std::span<const ComplexMatrix> arguments) {
  const std::size_t m = operators.size();
  const std::size_t k = psi1.arity();
  if (k < 1 || k + 1 > m) {
    std::ostringstream os;
    os << "split point k = " << k << " must satisfy 1 <= k <= m - 1 = " << (m == 0 ? 0 : m - 1);
    raise(ErrorKind::validation, os.str());
  }
  require(psi2.arity() == m - k, ErrorKind::validation, "split: second integrand arity must be m - k");
  require(arguments.size() + 1 == m, ErrorKind::validation, "split: expected m - 1 arguments");
  const ComplexMatrix left = moi_apply(operators.first(k), psi1, arguments.first(k - 1));
  const ComplexMatrix right = moi_apply(operators.subspan(k), psi2, arguments.subspan(k));
  return left * arguments[k - 1] * right;
}

ComplexMatrix moi_partition_evaluate(std::span<const std::size_t> segment_sizes,
                                     std::span<const MultivariateFunction> segment_integrands,
                                     std::span<const SpectralRef> operators, std::span<const ComplexMatrix> arguments) {
  require(!segment_sizes.empty(), ErrorKind::validation, "partition: no segments");
  require(segment_sizes.size() == segment_integrands.size(), ErrorKind::validation,
          "partition: one integrand per segment required");
  require(arguments.size() + 1 == operators.size(), ErrorKind::validation, "partition: expected m - 1 arguments");
  std::size_t total = 0;
  for (std::size_t s = 0; s < segment_sizes.size(); ++s) {
    if (segment_sizes[s] == 0) raise(ErrorKind::validation, "partition: empty segment");
    if (segment_integrands[s].arity() != segment_sizes[s]) {
      std::ostringstream os;
      os << "partition: segment " << s << " has " << segment_sizes[s] << " operators but integrand arity "
         << segment_integrands[s].arity();
      raise(ErrorKind::validation, os.str());
    }
    total += segment_sizes[s];
  }
  require(total == operators.size(), ErrorKind::validation, "partition: segments do not cover the operator list");

  ComplexMatrix result;
  std::size_t start = 0;
  for (std::size_t s = 0; s < segment_sizes.size(); ++s) {
    const std::size_t len = segment_sizes[s];
    const ComplexMatrix block =
        moi_apply(operators.subspan(start, len), segment_integrands[s], arguments.subspan(start, len - 1));
    result = s == 0 ? block : ComplexMatrix(result * arguments[start - 1] * block);
    start += len;
  }
  return result;
}

NormBoundResult moi_norm_bound(std::span<const SpectralRef> operators, const SeparableIntegrand& psi,
                               std::span<const ComplexMatrix> arguments, const NormMode& mode) {
  const auto fn = MultivariateFunction::from_separable(psi);
  check_shapes(operators, fn, arguments);
  std::vector<Spectrum> spectra;
  for (const auto& op : operators) spectra.push_back(op.get().spectrum());

  NormBoundResult r;
  r.projective_norm = projective_norm_bound(psi, spectra);
  double factor = 1.0;
  if (mode.kind == NormMode::Kind::operator_norm) {
    for (const auto& x : arguments) factor *= operator_norm(x);
    r.q = kInfinity;
    r.q_alternative = kInfinity;
  } else {
    if (mode.p.size() != arguments.size()) {
      std::ostringstream os;
      os << "Schatten mode needs " << arguments.size() << " exponents, got " << mode.p.size();
      raise(ErrorKind::parameter, os.str());
    }
    double inv = 0.0;
    for (double p : mode.p) {
      if (!(p >= 1.0)) raise(ErrorKind::parameter, "Schatten exponents must be >= 1");
      inv += 1.0 / p;
    }
    if (inv > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "Schatten exponents violate sum 1/p_i <= 1 (sum = " << inv << ")";
      raise(ErrorKind::parameter, os.str());
    }
    for (std::size_t i = 0; i < arguments.size(); ++i) factor *= schatten_norm(arguments[i], mode.p[i]);
    r.q = inv == 0.0 ? kInfinity : std::max(1.0, 1.0 / inv);
    const double alt = 1.0 - inv;
    r.q_alternative = alt == 0.0 ? kInfinity : (alt > 0.0 ? 1.0 / alt : std::nan(""));
  }
  r.bound = r.projective_norm * factor;
  const ComplexMatrix t = moi_apply(operators, fn, arguments);
  r.actual = mode.kind == NormMode::Kind::operator_norm ? operator_norm(t) : schatten_norm(t, r.q);
  return r;
}

ResidualReport perturbation_residual(const ScalarFunction& f, std::span<const HermitianOperator> a_list,
                                     std::size_t insertion, const HermitianOperator& c, const HermitianOperator& d,
                                     std::span<const ComplexMatrix> arguments) {
  const std::size_t m = a_list.size();
  if (insertion < 1 || insertion > m + 1) {
    std::ostringstream os;
    os << "insertion index " << insertion << " outside [1, " << m + 1 << "]";
    raise(ErrorKind::validation, os.str());
  }
  require(arguments.size() == m, ErrorKind::validation, "perturbation: expected one argument per listed operator");
  const std::size_t j = insertion - 1;

  auto with = [&](std::initializer_list<const HermitianOperator*> inserted) {
    std::vector<SpectralRef> refs;
    for (std::size_t i = 0; i < j; ++i) refs.emplace_back(a_list[i].spectral());
    for (const auto* op : inserted) refs.emplace_back(op->spectral());
    for (std::size_t i = j; i < m; ++i) refs.emplace_back(a_list[i].spectral());
    return refs;
  };
  const auto psi_m = integrand_from_divided_difference(f, static_cast<int>(m));
  const auto psi_m1 = integrand_from_divided_difference(f, static_cast<int>(m) + 1);

  const ComplexMatrix lhs_c = moi_apply(with({&c}), psi_m, arguments);
  const ComplexMatrix lhs_d = moi_apply(with({&d}), psi_m, arguments);
  std::vector<ComplexMatrix> rhs_args(arguments.begin(), arguments.begin() + static_cast<std::ptrdiff_t>(j));
  rhs_args.push_back(c.matrix() - d.matrix());
  rhs_args.insert(rhs_args.end(), arguments.begin() + static_cast<std::ptrdiff_t>(j), arguments.end());
  const ComplexMatrix rhs = moi_apply(with({&c, &d}), psi_m1, rhs_args);

  ResidualReport r;
  r.residual = operator_norm(lhs_c - lhs_d - rhs);
  r.scale = std::max({1.0, operator_norm(lhs_c), operator_norm(lhs_d)});
  return r;
}

ContinuityReport continuity_modulus(const ScalarFunction& f, int order, std::span<const HermitianOperator> a_list,
                                    std::span<const HermitianOperator> perturbed,
                                    std::span<const ComplexMatrix> arguments) {
  const std::size_t slots = static_cast<std::size_t>(order) + 1;
  require(order >= 0 && a_list.size() == slots && perturbed.size() == slots, ErrorKind::validation,
          "continuity: need order + 1 operators in both lists");
  require(arguments.size() == slots - 1, ErrorKind::validation, "continuity: need order arguments");

  const auto psi = integrand_from_divided_difference(f, order);
  const ComplexMatrix base = moi_apply(spectral_refs(a_list), psi, arguments);
  const ComplexMatrix moved = moi_apply(spectral_refs(perturbed), psi, arguments);

  ContinuityReport r;
  r.lhs = operator_norm(moved - base);

  Spectrum all;
  for (const auto& op : a_list) {
    const auto s = op.spectral().spectrum();
    all.insert(all.end(), s.begin(), s.end());
  }
  for (const auto& op : perturbed) {
    const auto s = op.spectral().spectrum();
    all.insert(all.end(), s.begin(), s.end());
  }
  const std::vector<Spectrum> spectra(slots + 1, all);
  const auto next = integrand_from_divided_difference(f, order + 1);
  double psi_norm = 0.0;
  if (next.separable()) {
    psi_norm = projective_norm_bound(*next.separable(), spectra);
    r.certified = true;
  } else {
    psi_norm = sup_norm_on_grid(next, spectra);
  }
  double shifts = 0.0;
  for (std::size_t i = 0; i < slots; ++i) shifts += operator_norm(perturbed[i].matrix() - a_list[i].matrix());
  double args = 1.0;
  for (const auto& x : arguments) args *= operator_norm(x);
  r.bound = psi_norm * shifts * args;
  return r;
}

}  // namespace moikit
