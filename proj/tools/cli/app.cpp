#include "app.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "moikit/calculus.hpp"
#include "moikit/harness.hpp"
#include "moikit/json_io.hpp"
#include "moikit/moi.hpp"
#include "moikit/norms.hpp"
#include "moikit/poly_approx.hpp"
#include "moikit/random_operator.hpp"
#include "moikit/tensor.hpp"

namespace moikit::cli {

namespace {

using io::Json;

struct Options {
  std::string input;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  int workers = 1;
  Index dim = 0;
  std::size_t count = 0;
};

struct Outcome {
  std::string text;
  int code = kOk;
};

std::shared_ptr<spdlog::logger> logger() {
  static const auto instance = [] {
    auto l = spdlog::get("moikit");
    if (!l) l = spdlog::stderr_color_mt("moikit");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("MOIKIT_LOG")) {
      const std::string v = env;
      if (v == "error") level = spdlog::level::err;
      if (v == "warn") level = spdlog::level::warn;
      if (v == "info") level = spdlog::level::info;
      if (v == "debug") level = spdlog::level::debug;
    }
    l->set_level(level);
    return l;
  }();
  return instance;
}

Json read_json(const std::string& path) {
  if (path.empty()) raise(ErrorKind::validation, "--input is required");
  std::ifstream in(path);
  if (!in) raise(ErrorKind::validation, "cannot open input file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    raise(ErrorKind::validation, "input is not valid JSON: " + std::string(e.what()));
  }
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) raise(ErrorKind::validation, "cannot write output file '" + path + "'");
    o << text;
    o.flush();
    if (!o) raise(ErrorKind::validation, "failed writing output file '" + path + "'");
  }
  fs::rename(tmp, target);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void require_json_format(const Options& o, const char* command) {
  if (o.format != "json")
    raise(ErrorKind::validation, std::string(command) + " produces matrices; only --format json is supported");
}

HermitianOperator hermitian_at(const Json& j, const char* key) {
  const std::string path = std::string("$.") + key;
  const auto m = io::matrix_from_json(io::field(j, key, "$"), path);
  try {
    return HermitianOperator(m);
  } catch (const Error& e) {
    raise(e.kind(), "at " + path + ": " + e.what());
  }
}

int integer_at(const Json& j, const char* key) {
  return static_cast<int>(io::integer_from_json(io::field(j, key, "$"), std::string("$.") + key));
}

Json matrix_result(const ComplexMatrix& m) { return io::document("matrix_result", {{"value", io::matrix_to_json(m)}}); }

Outcome cmd_moi_eval(const Options& o) {
  require_json_format(o, "moi-eval");
  const Json j = read_json(o.input);
  const MoiRequest req = io::moi_request_from_json(j);
  MoiOptions mo;
  mo.workers = o.workers;
  const MoiResult r = moi_evaluate(req, mo);
  logger()->info("moi-eval: m = {}, n = {}, tuples = {}", req.operators.size(), req.operators.front().dim(),
                 r.eigen_tuple_count);
  Json out = io::moi_result_to_json(r);
  if (const Json* nm = io::optional_field(j, "norm_mode", "$")) {
    if (!req.integrand.separable())
      raise(ErrorKind::capability, "norm bounds need a separable integrand representation");
    const Json& kind = io::field(*nm, "kind", "$.norm_mode");
    NormMode mode;
    if (kind == "schatten") {
      const Json& p = io::array_field(*nm, "p", "$.norm_mode");
      std::vector<double> ps;
      for (std::size_t i = 0; i < p.size(); ++i) ps.push_back(io::number_from_json(p[i], "$.norm_mode.p"));
      mode = NormMode::schatten(ps);
    } else if (kind != "operator") {
      raise(ErrorKind::validation, "at $.norm_mode.kind: expected \"operator\" or \"schatten\"");
    }
    std::vector<SpectralRef> refs(req.operators.begin(), req.operators.end());
    const auto nb = moi_norm_bound(refs, *req.integrand.separable(), req.arguments, mode);
    out["norm_bound"] = {{"bound", io::number(nb.bound)},
                         {"actual", io::number(nb.actual)},
                         {"q", io::number(nb.q)},
                         {"q_alternative", io::number(nb.q_alternative)},
                         {"projective_norm", io::number(nb.projective_norm)},
                         {"exponent_rule", "1/q = sum 1/p_i"},
                         {"alternative_rule", "1/q = 1 - sum 1/p_i"}};
  }
  return {dump(io::document("moi_result", out))};
}

Outcome cmd_frechet(const Options& o) {
  require_json_format(o, "frechet");
  const Json j = read_json(o.input);
  io::check_schema_version(j);
  const auto f = io::scalar_function_from_json(io::field(j, "f", "$"), "$.f");
  const auto x = hermitian_at(j, "X");
  const auto v = io::matrix_from_json(io::field(j, "V", "$"), "$.V");
  MoiOptions mo{o.workers};
  return {dump(matrix_result(frechet_derivative(f, x, v, mo)))};
}

Outcome cmd_kth(const Options& o) {
  require_json_format(o, "kth-deriv");
  const Json j = read_json(o.input);
  io::check_schema_version(j);
  const auto f = io::scalar_function_from_json(io::field(j, "f", "$"), "$.f");
  const auto a = hermitian_at(j, "A");
  const auto b = io::matrix_from_json(io::field(j, "B", "$"), "$.B");
  MoiOptions mo{o.workers};
  return {dump(matrix_result(kth_derivative(f, a, b, integer_at(j, "order"), mo)))};
}

Outcome cmd_higher_diff(const Options& o) {
  require_json_format(o, "higher-diff");
  const Json j = read_json(o.input);
  io::check_schema_version(j);
  const auto f = io::scalar_function_from_json(io::field(j, "f", "$"), "$.f");
  const auto a = hermitian_at(j, "A");
  const auto b = hermitian_at(j, "B");
  const int k = integer_at(j, "order");
  Json out = {{"value", io::matrix_to_json(higher_difference(f, a, b, k))}};
  const Json* diag = io::optional_field(j, "diagnostic", "$");
  if (diag && diag->is_boolean() && diag->get<bool>()) {
    const auto d = higher_difference_diagnostic(f, a, b, k);
    out["diagnostic"] = {{"moi_form", io::matrix_to_json(d.moi_form)},
                         {"residual", io::number(d.residual)},
                         {"scale", io::number(d.scale)},
                         {"agrees", d.residual <= 1e-9 * d.scale}};
  }
  return {dump(io::document("higher_difference_result", out))};
}

Outcome cmd_remainder(const Options& o) {
  require_json_format(o, "remainder");
  const Json j = read_json(o.input);
  const RemainderSpec spec = io::remainder_spec_from_json(j);
  std::string method = "both";
  if (const Json* m = io::optional_field(j, "method", "$")) method = m->is_string() ? m->get<std::string>() : "";
  if (method != "both" && method != "direct" && method != "moi")
    raise(ErrorKind::validation, "at $.method: expected \"direct\", \"moi\" or \"both\"");
  MoiOptions mo{o.workers};
  const auto eval = [&](RemainderMethod rm) {
    return spec.flavor == RemainderFlavor::self_adjoint ? taylor_remainder_sa(spec, rm, mo)
                                                        : taylor_remainder_unitary(spec, rm, mo);
  };
  Json out = Json::object();
  std::optional<ComplexMatrix> direct, moi;
  if (method != "moi") out["direct"] = io::matrix_to_json(*(direct = eval(RemainderMethod::direct)));
  if (method != "direct") out["moi"] = io::matrix_to_json(*(moi = eval(RemainderMethod::moi)));
  if (direct && moi) {
    const double scale = std::max({1.0, operator_norm(*direct), operator_norm(*moi)});
    out["agreement_residual"] = io::number(operator_norm(*direct - *moi));
    out["scale"] = io::number(scale);
  }
  return {dump(io::document("remainder_result", out))};
}

Outcome cmd_tailbound(const Options& o) {
  Json j = read_json(o.input);
  if (o.seed) j["seed"] = *o.seed;
  const auto exp = io::experiment_from_json(j);
  logger()->info("tailbound: theorem {}, N = {}, workers = {}", to_string(exp.theorem), exp.samples, o.workers);
  const auto rep = run_tail_bound(exp, HarnessOptions{o.workers});
  Outcome out;
  out.text = o.format == "csv" ? io::report_to_csv(rep) : dump(io::report_to_json(rep));
  if (rep.run_failed) {
    logger()->error("tailbound: {} of {} samples aborted", rep.aborted, rep.samples);
    out.code = kNumerical;
  } else if (!rep.all_satisfied()) {
    logger()->error("tailbound: bound violated for theorem {}", to_string(exp.theorem));
    out.code = kBoundViolation;
  }
  return out;
}

Outcome cmd_conv_mean(const Options& o) {
  Json j = read_json(o.input);
  if (o.seed) j["seed"] = *o.seed;
  const auto cfg = io::convergence_config_from_json(j);
  const auto rep = convergence_in_mean_check(cfg, HarnessOptions{o.workers});
  Outcome out;
  out.text = o.format == "csv" ? io::convergence_report_to_csv(rep) : dump(io::convergence_report_to_json(rep));
  if (rep.run_failed)
    out.code = kNumerical;
  else if (!rep.dominated)
    out.code = kBoundViolation;
  return out;
}

Outcome cmd_poly_decompose(const Options& o) {
  require_json_format(o, "poly-decompose");
  const Json j = read_json(o.input);
  io::check_schema_version(j);
  const bool wrapped = j.is_object() && j.contains("polynomial");
  const auto p = io::monomial_polynomial_from_json(wrapped ? j.at("polynomial") : j, wrapped ? "$.polynomial" : "$");
  std::uint64_t seed = 0;
  if (wrapped)
    if (const Json* s = io::optional_field(j, "seed", "$")) seed = io::unsigned_from_json(*s, "$.seed");
  if (o.seed) seed = *o.seed;
  Rng rng(seed);
  const auto ip = decompose_inner_powers(p, rng);
  const auto lp = to_linear_products(ip);
  const auto res = inner_power_residual(p, ip);
  Json counts = Json::array();
  for (int i = 0; i <= p.degree(); ++i) counts.push_back(ip.count_of_degree(i));
  return {dump(io::document("poly_decomposition", {{"polynomial", io::monomial_polynomial_to_json(p)},
                                                   {"inner_power_form", io::inner_power_to_json(ip)},
                                                   {"linear_product_form", io::linear_product_to_json(lp)},
                                                   {"grid_residual", io::number(res.residual)},
                                                   {"grid_norm", io::number(res.p_norm)},
                                                   {"terms_per_degree", counts},
                                                   {"seed", seed}}))};
}

Outcome cmd_haar(const Options& o) {
  require_json_format(o, "haar");
  Index dim = o.dim;
  std::size_t count = o.count;
  std::uint64_t seed = o.seed.value_or(0);
  if (!o.input.empty()) {
    const Json j = read_json(o.input);
    io::check_schema_version(j);
    if (dim == 0) dim = io::integer_from_json(io::field(j, "dim", "$"), "$.dim");
    if (count == 0) count = static_cast<std::size_t>(io::unsigned_from_json(io::field(j, "count", "$"), "$.count"));
    if (!o.seed)
      if (const Json* s = io::optional_field(j, "seed", "$")) seed = io::unsigned_from_json(*s, "$.seed");
  }
  if (dim < 1) raise(ErrorKind::validation, "haar: --dim must be a positive integer");
  if (count < 1) raise(ErrorKind::validation, "haar: --count must be a positive integer");
  const Rng root(seed);
  Json samples = Json::array();
  for (std::size_t i = 0; i < count; ++i) {
    Rng r = root.stream(i);
    samples.push_back(io::matrix_to_json(sample_haar_unitary(dim, r).matrix()));
  }
  return {dump(io::document("haar_samples", {{"dim", dim}, {"count", count}, {"seed", seed}, {"samples", samples}}))};
}

Outcome cmd_mti_eval(const Options& o) {
  require_json_format(o, "mti-eval");
  const Json j = read_json(o.input);
  io::check_schema_version(j);
  std::vector<HermitianTensor> tensors;
  const Json& tj = io::array_field(j, "tensors", "$");
  for (std::size_t i = 0; i < tj.size(); ++i) {
    const std::string p = "$.tensors[" + std::to_string(i) + "]";
    try {
      tensors.emplace_back(io::tensor_from_json(tj[i], p));
    } catch (const Error& e) {
      raise(e.kind(), "at " + p + ": " + e.what());
    }
  }
  std::vector<SquareTensor> args;
  const Json& aj = io::array_field(j, "arguments", "$");
  for (std::size_t i = 0; i < aj.size(); ++i)
    args.push_back(io::tensor_from_json(aj[i], "$.arguments[" + std::to_string(i) + "]"));
  const auto psi = io::integrand_from_json(io::field(j, "integrand", "$"), "$.integrand");
  MoiOptions mo{o.workers};
  const auto value = mti_evaluate(tensors, psi, args, mo);
  return {dump(io::document("mti_result", {{"value", io::tensor_to_json(value)}}))};
}

// ---- validate -------------------------------------------------------------

std::string detect_kind(const Json& j) {
  if (!j.is_object()) return "unknown";
  if (j.contains("kind") && j["kind"].is_string()) return j["kind"].get<std::string>();
  if (j.contains("theorem_id")) return "tailbound_experiment";
  if (j.contains("flavor")) return "remainder_spec";
  if (j.contains("tensors")) return "mti_request";
  if (j.contains("operators")) return "moi_request";
  if (j.contains("model") && j.contains("eps0")) return "convergence_config";
  if (j.contains("mode_dims")) return "tensor";
  if (j.contains("law")) return "random_operator_model";
  if (j.contains("coeffs")) return "polynomial";
  if (j.contains("polynomial")) return "poly_decompose_request";
  if (j.contains("arity") && j.contains("terms")) {
    const Json& t = j["terms"];
    if (t.is_array() && !t.empty() && t[0].is_object()) return "monomial_polynomial";
    return "separable_integrand";
  }
  if (j.contains("f") && j.contains("X") && j.contains("V")) return "frechet_request";
  if (j.contains("f") && j.contains("A") && j.contains("B")) return "derivative_request";
  if (j.contains("dim") && j.contains("entries")) return "matrix";
  if (j.contains("dim") && j.contains("count")) return "haar_request";
  return "unknown";
}

void check_report_rows(const Json& rows, const std::string& path) {
  if (!rows.is_array()) raise(ErrorKind::validation, "at " + path + ": expected an array");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const double prob = io::number_from_json(io::field(rows[i], "empirical_prob", p), p + ".empirical_prob");
    const double bound = io::number_from_json(io::field(rows[i], "bound_rhs", p), p + ".bound_rhs");
    const double se = io::number_from_json(io::field(rows[i], "mc_stderr", p), p + ".mc_stderr");
    io::number_from_json(io::field(rows[i], "theta", p), p + ".theta");
    const Json& sat = io::field(rows[i], "satisfied", p);
    if (!sat.is_boolean()) raise(ErrorKind::validation, "at " + p + ".satisfied: expected a boolean");
    if (prob < 0.0 || prob > 1.0) raise(ErrorKind::validation, "at " + p + ".empirical_prob: outside [0, 1]");
    if (sat.get<bool>() != (prob <= bound + 3.0 * se))
      raise(ErrorKind::validation, "at " + p + ".satisfied: inconsistent with p <= bound + 3 stderr");
  }
}

Json validate_document(const Json& j, const std::string& kind) {
  Json summary = Json::object();
  io::check_schema_version(j);
  if (kind == "matrix") {
    const auto m = io::matrix_from_json(j, "$");
    const auto asym = hermitian_asymmetry(m);
    summary = {{"dim", m.rows()}, {"hermitian", asym.value <= kHermitianTolerance * std::max(1.0, max_abs(m))},
               {"max_asymmetry", asym.value}, {"max_asymmetry_entry", {asym.row, asym.col}}};
  } else if (kind == "moi_request") {
    const auto r = io::moi_request_from_json(j);
    summary = {{"operators", r.operators.size()}, {"arguments", r.arguments.size()}, {"dim", r.operators.front().dim()}};
  } else if (kind == "mti_request") {
    const Json& tj = io::array_field(j, "tensors", "$");
    std::vector<HermitianTensor> tensors;
    for (std::size_t i = 0; i < tj.size(); ++i) {
      const std::string p = "$.tensors[" + std::to_string(i) + "]";
      try {
        tensors.emplace_back(io::tensor_from_json(tj[i], p));
      } catch (const Error& e) {
        raise(e.kind(), "at " + p + ": " + e.what());
      }
    }
    const Json& aj = io::array_field(j, "arguments", "$");
    const auto psi = io::integrand_from_json(io::field(j, "integrand", "$"), "$.integrand");
    if (psi.arity() != tensors.size())
      raise(ErrorKind::validation, "integrand arity " + std::to_string(psi.arity()) + " does not match tensor count " +
                                       std::to_string(tensors.size()));
    if (aj.size() + 1 != tensors.size()) raise(ErrorKind::validation, "expected one fewer argument than tensors");
    for (std::size_t i = 0; i < aj.size(); ++i) io::tensor_from_json(aj[i], "$.arguments[" + std::to_string(i) + "]");
    summary = {{"tensors", tensors.size()}, {"arguments", aj.size()}};
  } else if (kind == "tensor") {
    const auto t = io::tensor_from_json(j, "$");
    summary = {{"mode_dims", t.mode_dims}, {"entries", t.entries.size()}};
  } else if (kind == "random_operator_model") {
    const auto m = io::model_from_json(j, "$");
    summary = {{"dim", m.dim}};
  } else if (kind == "polynomial") {
    summary = {{"degree", io::polynomial_from_json(j, "$").degree()}};
  } else if (kind == "monomial_polynomial") {
    const auto p = io::monomial_polynomial_from_json(j, "$");
    summary = {{"arity", p.arity}, {"terms", p.terms.size()}, {"degree", p.degree()}};
  } else if (kind == "poly_decompose_request") {
    const auto p = io::monomial_polynomial_from_json(io::field(j, "polynomial", "$"), "$.polynomial");
    summary = {{"arity", p.arity}, {"terms", p.terms.size()}};
  } else if (kind == "separable_integrand") {
    const auto s = io::separable_from_json(j, "$");
    summary = {{"arity", s.arity}, {"terms", s.terms.size()}};
  } else if (kind == "tailbound_experiment") {
    const auto e = io::experiment_from_json(j);
    summary = {{"theorem_id", std::string(to_string(e.theorem))}, {"samples", e.samples}, {"thetas", e.theta_grid.size()}};
  } else if (kind == "convergence_config") {
    const auto c = io::convergence_config_from_json(j);
    summary = {{"steps", c.steps}, {"samples", c.samples}};
  } else if (kind == "remainder_spec") {
    const auto s = io::remainder_spec_from_json(j);
    summary = {{"order", s.order}, {"slots", s.base.size()}, {"terms", s.terms.size()}};
  } else if (kind == "frechet_request") {
    io::scalar_function_from_json(io::field(j, "f", "$"), "$.f");
    const auto x = hermitian_at(j, "X");
    const auto v = io::matrix_from_json(io::field(j, "V", "$"), "$.V");
    if (v.rows() != x.dim()) raise(ErrorKind::validation, "at $.V: dimension differs from $.X");
    summary = {{"dim", x.dim()}};
  } else if (kind == "derivative_request") {
    io::scalar_function_from_json(io::field(j, "f", "$"), "$.f");
    const auto a = hermitian_at(j, "A");
    const auto b = io::matrix_from_json(io::field(j, "B", "$"), "$.B");
    if (b.rows() != a.dim()) raise(ErrorKind::validation, "at $.B: dimension differs from $.A");
    summary = {{"dim", a.dim()}, {"order", integer_at(j, "order")}};
  } else if (kind == "haar_request") {
    summary = {{"dim", io::integer_from_json(io::field(j, "dim", "$"), "$.dim")},
               {"count", io::integer_from_json(io::field(j, "count", "$"), "$.count")}};
  } else if (kind == "moi_result") {
    const auto m = io::matrix_from_json(io::field(j, "value", "$"), "$.value");
    io::unsigned_from_json(io::field(j, "eigen_tuple_count", "$"), "$.eigen_tuple_count");
    summary = {{"dim", m.rows()}};
  } else if (kind == "matrix_result") {
    summary = {{"dim", io::matrix_from_json(io::field(j, "value", "$"), "$.value").rows()}};
  } else if (kind == "higher_difference_result") {
    summary = {{"dim", io::matrix_from_json(io::field(j, "value", "$"), "$.value").rows()}};
  } else if (kind == "remainder_result") {
    std::size_t parts = 0;
    for (const char* k : {"direct", "moi"})
      if (const Json* m = io::optional_field(j, k, "$")) {
        io::matrix_from_json(*m, std::string("$.") + k);
        ++parts;
      }
    if (parts == 0) raise(ErrorKind::validation, "remainder result holds neither direct nor moi value");
    summary = {{"representations", parts}};
  } else if (kind == "mti_result") {
    summary = {{"mode_dims", io::tensor_from_json(io::field(j, "value", "$"), "$.value").mode_dims}};
  } else if (kind == "haar_samples") {
    const auto ms = io::matrices_from_json(io::field(j, "samples", "$"), "$.samples");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      try {
        UnitaryOperator{ms[i]};
      } catch (const Error& e) {
        raise(e.kind(), "at $.samples[" + std::to_string(i) + "]: " + e.what());
      }
    }
    summary = {{"samples", ms.size()}};
  } else if (kind == "tailbound_report") {
    check_report_rows(io::array_field(j, "rows", "$"), "$.rows");
    if (const Json* f = io::optional_field(j, "fixed_kappa_rows", "$")) check_report_rows(*f, "$.fixed_kappa_rows");
    io::field(j, "metadata", "$");
    summary = {{"rows", j["rows"].size()}};
  } else if (kind == "convergence_report") {
    const Json& rows = io::array_field(j, "rows", "$");
    summary = {{"rows", rows.size()}};
  } else if (kind == "poly_decomposition") {
    io::monomial_polynomial_from_json(io::field(j, "polynomial", "$"), "$.polynomial");
    io::field(j, "inner_power_form", "$");
    io::field(j, "linear_product_form", "$");
    summary = {{"terms", j["inner_power_form"]["terms"].size()}};
  } else {
    raise(ErrorKind::validation, "cannot determine the document type");
  }
  return summary;
}

Outcome cmd_validate(const Options& o) {
  require_json_format(o, "validate");
  Json report = {{"input", o.input}};
  Json j;
  try {
    j = read_json(o.input);
    const std::string kind = detect_kind(j);
    report["detected"] = kind;
    report["summary"] = validate_document(j, kind);
    report["status"] = "ok";
    report["diagnostics"] = Json::array();
  } catch (const Error& e) {
    report["status"] = "invalid";
    report["diagnostics"] = Json::array({e.what()});
  }
  return {dump(io::document("validation_report", report))};
}

std::string usage(const CLI::App& app) { return app.help(); }

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::parameter:
    case ErrorKind::capability:
      return kValidation;
    case ErrorKind::domain:
    case ErrorKind::numerical:
      return kNumerical;
  }
  return kNumerical;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"moikit: finite-dimensional multiple operator integrals"};
  app.require_subcommand(1, 1);
  Options opt;

  using Handler = Outcome (*)(const Options&);
  struct Command {
    const char* name;
    const char* help;
    Handler handler;
  };
  const Command commands[] = {
      {"moi-eval", "evaluate a multiple operator integral", cmd_moi_eval},
      {"frechet", "Frechet derivative of f at X in direction V", cmd_frechet},
      {"kth-deriv", "k-th derivative of f(A + tB) at t = 0", cmd_kth},
      {"higher-diff", "k-th operator difference of f at A along B", cmd_higher_diff},
      {"remainder", "Taylor remainder, direct and MOI forms", cmd_remainder},
      {"tailbound", "Monte Carlo tail-bound experiment", cmd_tailbound},
      {"conv-mean", "r-th mean convergence check", cmd_conv_mean},
      {"poly-decompose", "inner-power and linear-product decompositions", cmd_poly_decompose},
      {"haar", "sample Haar unitaries", cmd_haar},
      {"mti-eval", "evaluate a multiple tensor integral", cmd_mti_eval},
      {"validate", "schema and invariant check without computation", cmd_validate},
  };
  std::vector<std::pair<CLI::App*, Handler>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("-i,--input", opt.input, "input JSON file");
    sub->add_option("-o,--output", opt.output, "output file (written atomically); stdout when omitted");
    sub->add_option("--seed", opt.seed, "seed override");
    sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
    if (std::string_view(c.name) == "haar") {
      sub->add_option("--dim", opt.dim, "dimension");
      sub->add_option("--count", opt.count, "number of samples");
    }
    subs.emplace_back(sub, c.handler);
  }

  std::vector<std::string> argv_store{"moikit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << usage(app);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << usage(app);
    return kValidation;
  }

  for (const auto& [sub, handler] : subs) {
    if (!sub->parsed()) continue;
    try {
      const Outcome result = handler(opt);
      if (opt.output.empty())
        out << result.text;
      else
        write_atomic(opt.output, result.text);
      return result.code;
    } catch (const Error& e) {
      logger()->debug("{} failed: {}", sub->get_name(), e.what());
      err << e.what() << "\n";
      return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
      err << "validation error: " << e.what() << "\n";
      return kValidation;
    }
  }
  err << usage(app);
  return kValidation;
}

}  // namespace moikit::cli
