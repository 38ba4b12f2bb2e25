#include "moikit/harness.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "moikit/calculus.hpp"
#include "moikit/error.hpp"
#include "moikit/moi.hpp"
#include "moikit/norms.hpp"

namespace moikit {

namespace {

constexpr std::pair<TheoremId, std::string_view> kTheoremNames[] = {
    {TheoremId::moi_norm_a, "moi_norm_a"},
    {TheoremId::moi_norm_schatten_b, "moi_norm_schatten_b"},
    {TheoremId::first_derivative, "first_derivative"},
    {TheoremId::kth_derivative, "kth_derivative"},
    {TheoremId::higher_difference, "higher_difference"},
    {TheoremId::sa_remainder, "sa_remainder"},
    {TheoremId::unitary_remainder, "unitary_remainder"},
};

struct SampleOut {
  bool ok = false;
  std::string error;
  double statistic = 0.0;
  double bound_numerator = 0.0;
  std::vector<double> expectations;
  double kappa = 0.0;
  double bound_numerator_fixed = 0.0;
};

double projective_dd(const ScalarFunction& f, int order, std::span<const Spectrum> spectra) {
  const auto psi = integrand_from_divided_difference(f, order);
  if (!psi.separable())
    raise(ErrorKind::capability, "certified bounds need a separable divided difference (polynomial function)");
  return projective_norm_bound(*psi.separable(), spectra);
}

double holder_q(std::span<const double> p) {
  double inv = 0.0;
  for (double x : p) inv += 1.0 / x;
  return inv == 0.0 ? kInfinity : std::max(1.0, 1.0 / inv);
}

void need(bool cond, const std::string& msg) { require(cond, ErrorKind::validation, msg); }

void need_polynomial(const ScalarFunction& f, const std::string& what) {
  if (!f.as_polynomial()) raise(ErrorKind::capability, what + " must be a polynomial for certified bounds");
}

std::vector<HermitianOperator> draw_hermitians(const std::vector<RandomOperatorModel>& models, Rng& rng) {
  std::vector<HermitianOperator> ops;
  for (const auto& m : models) ops.push_back(sample_random_hermitian(m, rng));
  return ops;
}

std::vector<Spectrum> spectra_of(std::span<const SpectralRef> refs) {
  std::vector<Spectrum> s;
  for (const auto& r : refs) s.push_back(r.get().spectrum());
  return s;
}

double max_gap(const Spectrum& lower, const Spectrum& upper) {
  double g = 0.0;
  for (const auto& a : upper)
    for (const auto& b : lower) g = std::max(g, std::abs(a.real() - b.real()));
  return g;
}

SampleOut run_sample(const TailBoundExperiment& e, Rng rng) {
  SampleOut out;
  const int k = e.order;
  switch (e.theorem) {
    case TheoremId::moi_norm_a:
    case TheoremId::moi_norm_schatten_b: {
      const auto ops = draw_hermitians(e.operator_models, rng);
      const auto refs = spectral_refs<HermitianOperator>(ops);
      const auto psi = MultivariateFunction::from_separable(*e.integrand);
      const ComplexMatrix t = moi_apply(refs, psi, e.fixed_inputs);
      const double proj = projective_norm_bound(*e.integrand, spectra_of(refs));
      double factor = 1.0;
      if (e.theorem == TheoremId::moi_norm_a) {
        out.statistic = operator_norm(t);
        for (const auto& x : e.fixed_inputs) factor *= operator_norm(x);
      } else {
        out.statistic = schatten_norm(t, holder_q(e.schatten_p));
        for (std::size_t i = 0; i < e.fixed_inputs.size(); ++i)
          factor *= schatten_norm(e.fixed_inputs[i], e.schatten_p[i]);
      }
      out.bound_numerator = proj * factor;
      out.expectations = {proj};
      break;
    }
    case TheoremId::first_derivative:
    case TheoremId::kth_derivative: {
      const int order = e.theorem == TheoremId::first_derivative ? 1 : k;
      const auto a = sample_random_hermitian(e.operator_models.front(), rng);
      const ComplexMatrix& dir = e.fixed_inputs.front();
      out.statistic = operator_norm(kth_derivative(*e.function, a, dir, order));
      const std::vector<Spectrum> spectra(static_cast<std::size_t>(order) + 1, a.spectral().spectrum());
      const double proj = projective_dd(*e.function, order, spectra);
      out.bound_numerator = e.theorem == TheoremId::first_derivative
                                ? e.upsilon * proj
                                : factorial(order) * std::pow(operator_norm(dir), order) * proj;
      out.expectations = {proj};
      break;
    }
    case TheoremId::higher_difference: {
      const auto a = sample_random_hermitian(e.operator_models.front(), rng);
      const HermitianOperator b(e.fixed_inputs.front());
      out.statistic = operator_norm(higher_difference(*e.function, a, b, k));
      const auto ladder = difference_ladder(a, b, k);
      std::vector<Spectrum> spectra;
      for (const auto& op : ladder) spectra.push_back(op.spectral().spectrum());
      for (std::size_t j = 0; j + 1 < spectra.size(); ++j) out.kappa = std::max(out.kappa, max_gap(spectra[j], spectra[j + 1]));
      const double proj = projective_dd(*e.function, k, spectra);
      const double common = k * std::pow(operator_norm(b.matrix()), k) * proj;
      out.bound_numerator = out.kappa * common;
      out.bound_numerator_fixed = e.kappa * common;
      out.expectations = {proj};
      break;
    }
    case TheoremId::sa_remainder: {
      const auto xs = draw_hermitians(e.operator_models, rng);
      RemainderSpec spec;
      spec.order = k;
      spec.flavor = RemainderFlavor::self_adjoint;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        spec.base.push_back(xs[j].matrix());
        spec.perturbations.push_back(e.fixed_inputs[j]);
        spec.terms.push_back({j, e.slot_functions[j]});
      }
      out.statistic = operator_norm(taylor_remainder_sa(spec, RemainderMethod::direct));
      const double n = static_cast<double>(xs.size());
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const HermitianOperator shifted(xs[j].matrix() + e.fixed_inputs[j]);
        std::vector<Spectrum> spectra{shifted.spectral().spectrum()};
        spectra.insert(spectra.end(), static_cast<std::size_t>(k), xs[j].spectral().spectrum());
        const double proj = projective_dd(e.slot_functions[j], k, spectra);
        out.bound_numerator += n * std::pow(operator_norm(e.fixed_inputs[j]), k) * proj;
        out.expectations.push_back(proj);
      }
      break;
    }
    case TheoremId::unitary_remainder: {
      RemainderSpec spec;
      spec.order = k;
      spec.flavor = RemainderFlavor::unitary;
      std::vector<UnitaryOperator> xs;
      for (std::size_t j = 0; j < e.operator_models.size(); ++j) {
        xs.push_back(sample_haar_unitary(e.operator_models[j].dim, rng));
        spec.base.push_back(xs.back().matrix());
        spec.perturbations.push_back(e.fixed_inputs[j]);
        spec.terms.push_back({j, e.slot_functions[j]});
      }
      out.statistic = operator_norm(taylor_remainder_unitary(spec, RemainderMethod::direct));
      const double n = static_cast<double>(xs.size());
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const HermitianOperator h(e.fixed_inputs[j]);
        const UnitaryOperator w(exp_i(h).matrix() * xs[j].matrix());
        const double hn = operator_norm(h.matrix());
        for (int ell = 1; ell <= k; ++ell) {
          std::vector<Spectrum> spectra{w.spectral().spectrum()};
          spectra.insert(spectra.end(), static_cast<std::size_t>(ell), xs[j].spectral().spectrum());
          const double proj = projective_dd(e.slot_functions[j], ell, spectra);
          out.bound_numerator += k * n * theta_sum(hn, k, ell) * proj;
          out.expectations.push_back(proj);
        }
      }
      break;
    }
  }
  out.ok = true;
  return out;
}

std::vector<std::string> expectation_names(const TailBoundExperiment& e) {
  switch (e.theorem) {
    case TheoremId::moi_norm_a:
    case TheoremId::moi_norm_schatten_b:
      return {"E||psi||"};
    case TheoremId::first_derivative:
      return {"E||psi^[1]||"};
    case TheoremId::kth_derivative:
    case TheoremId::higher_difference:
      return {"E||psi^[" + std::to_string(e.order) + "]||"};
    case TheoremId::sa_remainder: {
      std::vector<std::string> names;
      for (std::size_t j = 0; j < e.operator_models.size(); ++j)
        names.push_back("E||phi_" + std::to_string(j + 1) + "^[" + std::to_string(e.order) + "]||");
      return names;
    }
    case TheoremId::unitary_remainder: {
      std::vector<std::string> names;
      for (std::size_t j = 0; j < e.operator_models.size(); ++j)
        for (int ell = 1; ell <= e.order; ++ell)
          names.push_back("E||phi_" + std::to_string(j + 1) + "^[" + std::to_string(ell) + "]||");
      return names;
    }
  }
  return {};
}

}  // namespace

std::string_view to_string(TheoremId id) noexcept {
  for (const auto& [k, v] : kTheoremNames)
    if (k == id) return v;
  return "unknown";
}

TheoremId parse_theorem_id(std::string_view name) {
  for (const auto& [k, v] : kTheoremNames)
    if (v == name) return k;
  raise(ErrorKind::validation, "unknown theorem_id '" + std::string(name) + "'");
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> failures(w);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += w) body(i);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

void TailBoundExperiment::validate() const {
  need(samples >= 1000, "samples must be >= 1000");
  need(!theta_grid.empty(), "theta_grid must be non-empty");
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    need(theta_grid[i] > 0.0 && std::isfinite(theta_grid[i]), "theta_grid entries must be positive");
    if (i > 0) need(theta_grid[i] > theta_grid[i - 1], "theta_grid must be strictly increasing");
  }
  need(!operator_models.empty(), "experiment needs at least one operator model");
  for (const auto& m : operator_models) m.validate();
  const Index n = operator_models.front().dim;
  for (const auto& m : operator_models) need(m.dim == n, "operator models must share one dimension");
  for (const auto& x : fixed_inputs) {
    validate_square_finite(x, "fixed input");
    need(x.rows() == n, "fixed input dimension differs from the operator models");
  }
  const std::size_t m = operator_models.size();
  auto need_fixed = [&](std::size_t count, const char* what) {
    std::ostringstream os;
    os << to_string(theorem) << " needs " << count << " fixed inputs (" << what << "), got " << fixed_inputs.size();
    need(fixed_inputs.size() == count, os.str());
  };
  switch (theorem) {
    case TheoremId::moi_norm_a:
    case TheoremId::moi_norm_schatten_b:
      need(integrand.has_value(), "moi_norm experiments need a separable integrand");
      integrand->validate();
      need(integrand->arity == m, "integrand arity must equal the number of operator models");
      need_fixed(m - 1, "X_1..X_{m-1}");
      if (theorem == TheoremId::moi_norm_schatten_b) {
        if (schatten_p.size() != m - 1) raise(ErrorKind::parameter, "schatten_p needs one exponent per argument");
        double inv = 0.0;
        for (double p : schatten_p) {
          if (!(p >= 1.0)) raise(ErrorKind::parameter, "Schatten exponents must be >= 1");
          inv += 1.0 / p;
        }
        if (inv > 1.0 + 1e-12) raise(ErrorKind::parameter, "Schatten exponents violate sum 1/p_i <= 1");
      }
      break;
    case TheoremId::first_derivative:
    case TheoremId::kth_derivative:
    case TheoremId::higher_difference:
      need(m == 1, std::string(to_string(theorem)) + " needs exactly one operator model");
      need_fixed(1, theorem == TheoremId::first_derivative ? "dX/dt" : "B");
      need(function.has_value(), "experiment needs a scalar function");
      need_polynomial(*function, "function");
      need(order >= 1, "order must be >= 1");
      if (theorem == TheoremId::first_derivative)
        if (!(upsilon > operator_norm(fixed_inputs.front())))
          raise(ErrorKind::parameter, "upsilon must exceed ||dX/dt||");
      if (theorem == TheoremId::higher_difference) {
        HermitianOperator{fixed_inputs.front()};
        if (!(kappa > 0.0)) raise(ErrorKind::parameter, "higher_difference needs kappa > 0");
      }
      break;
    case TheoremId::sa_remainder:
    case TheoremId::unitary_remainder:
      need(order >= 1, "order must be >= 1");
      need_fixed(m, "H_j");
      need(slot_functions.size() == m, "remainder experiments need one slot function per operator");
      for (const auto& f : slot_functions) need_polynomial(f, "slot function");
      for (const auto& h : fixed_inputs) HermitianOperator{h};
      break;
  }
}

bool TailBoundReport::all_satisfied() const {
  if (run_failed) return false;
  for (const auto& r : rows)
    if (!r.satisfied) return false;
  return true;
}

TailBoundRow tail_row(double theta, std::span<const double> statistic, std::span<const double> bound_numerator) {
  TailBoundRow row;
  row.theta = theta;
  const double n = static_cast<double>(statistic.size());
  if (statistic.empty()) return row;
  std::vector<double> hits(statistic.size());
  for (std::size_t i = 0; i < statistic.size(); ++i) hits[i] = statistic[i] > theta ? 1.0 : 0.0;
  row.empirical_prob = pairwise_sum(hits) / n;
  const auto b = mean_and_stderr(bound_numerator);
  row.bound_rhs = b.mean / theta;
  const double var_p = row.empirical_prob * (1.0 - row.empirical_prob) / n;
  const double var_b = (b.stderr_ / theta) * (b.stderr_ / theta);
  row.mc_stderr = std::sqrt(var_p + var_b);
  row.satisfied = row.empirical_prob <= row.bound_rhs + 3.0 * row.mc_stderr;
  return row;
}

TailBoundReport run_tail_bound(const TailBoundExperiment& exp, const HarnessOptions& options) {
  exp.validate();
  const Rng root(exp.seed);
  std::vector<SampleOut> results(exp.samples);
  parallel_for(exp.samples, options.workers, [&](std::size_t i) {
    try {
      results[i] = run_sample(exp, root.stream(i));
    } catch (const Error& err) {
      results[i].ok = false;
      results[i].error = err.what();
    }
  });

  TailBoundReport rep;
  rep.theorem = exp.theorem;
  rep.seed = exp.seed;
  rep.samples = exp.samples;
  const auto names = expectation_names(exp);
  std::vector<double> stat, bound, fixed_stat, fixed_bound;
  std::vector<std::vector<double>> expect(names.size());
  for (const auto& r : results) {
    if (!r.ok) {
      ++rep.aborted;
      if (rep.abort_messages.size() < 5) rep.abort_messages.push_back(r.error);
      continue;
    }
    stat.push_back(r.statistic);
    bound.push_back(r.bound_numerator);
    for (std::size_t j = 0; j < names.size(); ++j) expect[j].push_back(r.expectations[j]);
    if (exp.theorem == TheoremId::higher_difference) {
      if (r.kappa < exp.kappa) {
        fixed_stat.push_back(r.statistic);
        fixed_bound.push_back(r.bound_numerator_fixed);
      } else {
        ++rep.kappa_excluded;
      }
    }
  }
  rep.completed = stat.size();
  rep.run_failed = static_cast<double>(rep.aborted) > kMaxAbortFraction * static_cast<double>(exp.samples);
  rep.statistic = mean_and_stderr(stat);
  for (std::size_t j = 0; j < names.size(); ++j) rep.expectations.push_back({names[j], mean_and_stderr(expect[j])});
  for (double theta : exp.theta_grid) rep.rows.push_back(tail_row(theta, stat, bound));

  switch (exp.theorem) {
    case TheoremId::moi_norm_schatten_b: {
      double inv = 0.0;
      for (double p : exp.schatten_p) inv += 1.0 / p;
      rep.constants["q"] = holder_q(exp.schatten_p);
      rep.constants["q_alternative"] = inv >= 1.0 ? kInfinity : 1.0 / (1.0 - inv);
      break;
    }
    case TheoremId::first_derivative:
      rep.constants["upsilon"] = exp.upsilon;
      break;
    case TheoremId::kth_derivative:
      rep.constants["norm_B"] = operator_norm(exp.fixed_inputs.front());
      break;
    case TheoremId::higher_difference: {
      rep.constants["kappa"] = exp.kappa;
      rep.constants["norm_B"] = operator_norm(exp.fixed_inputs.front());
      for (double theta : exp.theta_grid) rep.fixed_kappa_rows.push_back(tail_row(theta, fixed_stat, fixed_bound));
      break;
    }
    case TheoremId::sa_remainder:
      for (std::size_t j = 0; j < exp.fixed_inputs.size(); ++j)
        rep.constants["norm_H_" + std::to_string(j + 1)] = operator_norm(exp.fixed_inputs[j]);
      break;
    case TheoremId::unitary_remainder:
      for (std::size_t j = 0; j < exp.fixed_inputs.size(); ++j) {
        const double hn = operator_norm(exp.fixed_inputs[j]);
        for (int ell = 1; ell <= exp.order; ++ell)
          rep.constants["Theta_" + std::to_string(j + 1) + "_" + std::to_string(exp.order) + "_" +
                        std::to_string(ell)] = theta_sum(hn, exp.order, ell);
      }
      break;
    case TheoremId::moi_norm_a:
      break;
  }
  return rep;
}

MeanEstimate estimate_expectation(const StatisticGenerator& gen, std::size_t samples, std::uint64_t seed,
                                  const HarnessOptions& options) {
  require(samples >= 100, ErrorKind::parameter, "estimate_expectation needs N >= 100");
  const Rng root(seed);
  std::vector<double> values(samples);
  parallel_for(samples, options.workers, [&](std::size_t i) {
    Rng r = root.stream(i);
    values[i] = gen(r);
  });
  return mean_and_stderr(values);
}

void ConvergenceConfig::validate() const {
  model.validate();
  need(order >= 0, "order must be >= 0");
  if (r != 1 && r != 2) raise(ErrorKind::parameter, "r must be 1 or 2");
  if (steps < 1 || steps > 64) raise(ErrorKind::parameter, "steps M must lie in [1, 64]");
  if (!(eps0 >= 0.0)) raise(ErrorKind::parameter, "eps0 must be >= 0");
  if (!(perturbation_norm >= 0.0)) raise(ErrorKind::parameter, "perturbation_norm must be >= 0");
  need(samples >= 1, "samples must be >= 1");
}

ConvergenceReport convergence_in_mean_check(const ConvergenceConfig& c, const HarnessOptions& options) {
  c.validate();
  const auto steps = static_cast<std::size_t>(c.steps);
  const auto slots = static_cast<std::size_t>(c.order) + 1;
  const Rng root(c.seed);
  Rng arg_rng = root.stream(~std::uint64_t{0});
  std::vector<ComplexMatrix> args;
  for (int j = 0; j < c.order; ++j) args.push_back(sample_hermitian_direction(c.model.dim, 1.0, arg_rng).matrix());

  struct PerSample {
    bool ok = false;
    std::vector<double> diff, bound;
  };
  std::vector<PerSample> results(c.samples);
  parallel_for(c.samples, options.workers, [&](std::size_t i) {
    Rng rng = root.stream(i);
    PerSample& out = results[i];
    try {
      std::vector<HermitianOperator> base, dirs;
      for (std::size_t s = 0; s < slots; ++s) base.push_back(sample_random_hermitian(c.model, rng));
      for (std::size_t s = 0; s < slots; ++s)
        dirs.push_back(sample_hermitian_direction(c.model.dim, c.perturbation_norm, rng));
      for (std::size_t m = 1; m <= steps; ++m) {
        const double eps = c.eps0 / static_cast<double>(m);
        std::vector<HermitianOperator> moved;
        for (std::size_t s = 0; s < slots; ++s) moved.emplace_back(base[s].matrix() + eps * dirs[s].matrix());
        const auto rep = continuity_modulus(c.function, c.order, base, moved, args);
        out.diff.push_back(std::pow(rep.lhs, c.r));
        out.bound.push_back(std::pow(rep.bound, c.r));
      }
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
    }
  });

  ConvergenceReport rep;
  for (const auto& r : results) rep.aborted += r.ok ? 0 : 1;
  rep.run_failed = static_cast<double>(rep.aborted) > kMaxAbortFraction * static_cast<double>(c.samples);
  rep.dominated = true;
  rep.monotone_decreasing = true;
  for (std::size_t m = 0; m < steps; ++m) {
    std::vector<double> d, b;
    for (const auto& r : results) {
      if (!r.ok) continue;
      d.push_back(r.diff[m]);
      b.push_back(r.bound[m]);
    }
    ConvergenceRow row;
    row.m = static_cast<int>(m) + 1;
    row.eps = c.eps0 / static_cast<double>(m + 1);
    row.difference = mean_and_stderr(d);
    row.bound = mean_and_stderr(b);
    row.dominated = row.difference.mean <=
                    row.bound.mean + 3.0 * std::hypot(row.difference.stderr_, row.bound.stderr_) + 1e-12;
    rep.dominated = rep.dominated && row.dominated;
    if (!rep.rows.empty() && row.difference.mean > rep.rows.back().difference.mean) rep.monotone_decreasing = false;
    rep.rows.push_back(row);
  }
  const double first = rep.rows.front().difference.mean;
  const double last = rep.rows.back().difference.mean;
  rep.decay_ratio = first > 0.0 ? last / first : 0.0;
  rep.decay_target_met = first > 0.0 ? last <= 1e-3 * first : true;
  return rep;
}

}  // namespace moikit
