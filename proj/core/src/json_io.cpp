#include "moikit/json_io.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "moikit/error.hpp"

namespace moikit::io {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  raise(ErrorKind::validation, "at " + path + ": " + msg);
}

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string key(const std::string& path, const char* k) { return path + "." + k; }

const Json& object(const Json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  return j;
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

Json estimate_to_json(const MeanEstimate& e) { return {{"mean", number(e.mean)}, {"stderr", number(e.stderr_)}}; }

Json row_to_json(const TailBoundRow& r) {
  return {{"theta", number(r.theta)},
          {"empirical_prob", number(r.empirical_prob)},
          {"mc_stderr", number(r.mc_stderr)},
          {"bound_rhs", number(r.bound_rhs)},
          {"satisfied", r.satisfied}};
}

std::vector<double> numbers_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_from_json(j[i], idx(path, i)));
  return out;
}

}  // namespace

const Json& field(const Json& j, const char* k, const std::string& path) {
  object(j, path);
  const auto it = j.find(k);
  if (it == j.end()) bad(path, std::string("missing field \"") + k + "\"");
  return *it;
}

const Json* optional_field(const Json& j, const char* k, const std::string& path) {
  object(j, path);
  const auto it = j.find(k);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

const Json& array_field(const Json& j, const char* k, const std::string& path) {
  const Json& a = field(j, k, path);
  if (!a.is_array()) bad(key(path, k), "expected an array");
  return a;
}

long long integer_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  bad(path, "expected an integer");
}

std::uint64_t unsigned_from_json(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const long long v = integer_from_json(j, path);
  if (v < 0) bad(path, "expected a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

void check_schema_version(const Json& j, const std::string& path) {
  if (!j.is_object()) return;
  const auto it = j.find("schema_version");
  if (it == j.end()) return;
  if (!it->is_number_integer() || it->get<long long>() != kSchemaVersion)
    bad(key(path, "schema_version"), "unsupported schema version (expected 1)");
}

Json document(std::string_view kind, Json body) {
  body["schema_version"] = kSchemaVersion;
  body["kind"] = std::string(kind);
  return body;
}

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::nan("");
  }
  bad(path, "expected a number");
}

Json complex_to_json(cplx z) { return Json::array({number(z.real()), number(z.imag())}); }

cplx complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad(path, "expected a [re, im] pair");
  const double re = number_from_json(j[0], idx(path, 0));
  const double im = number_from_json(j[1], idx(path, 1));
  if (!std::isfinite(re) || !std::isfinite(im)) bad(path, "complex entries must be finite");
  return {re, im};
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return {{"dim", m.rows()}, {"entries", std::move(rows)}};
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  const long long dim = integer_from_json(field(j, "dim", path), key(path, "dim"));
  if (dim < 1) bad(key(path, "dim"), "dim must be positive");
  const Json& rows = array_field(j, "entries", path);
  const std::string rp = key(path, "entries");
  if (static_cast<long long>(rows.size()) != dim)
    bad(rp, "expected " + std::to_string(dim) + " rows, got " + std::to_string(rows.size()));
  ComplexMatrix m(dim, dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Json& row = rows[r];
    if (!row.is_array() || static_cast<long long>(row.size()) != dim)
      bad(idx(rp, r), "expected a row of " + std::to_string(dim) + " entries");
    for (std::size_t c = 0; c < row.size(); ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = complex_from_json(row[c], idx(idx(rp, r), c));
  }
  return m;
}

std::vector<ComplexMatrix> matrices_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of matrices");
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(matrix_from_json(j[i], idx(path, i)));
  return out;
}

Json model_to_json(const RandomOperatorModel& m) {
  Json law;
  if (const auto* u = std::get_if<UniformLaw>(&m.law))
    law = {{"kind", "uniform"}, {"a", u->a}, {"b", u->b}};
  else if (const auto* g = std::get_if<GaussianLaw>(&m.law))
    law = {{"kind", "gaussian"}, {"mean", g->mean}, {"sd", g->sd}};
  else
    law = {{"kind", "fixed"}, {"values", std::get<FixedLaw>(m.law).values}};
  return {{"dim", m.dim}, {"law", law}, {"seed", m.seed}};
}

RandomOperatorModel model_from_json(const Json& j, const std::string& path) {
  RandomOperatorModel m;
  m.dim = integer_from_json(field(j, "dim", path), key(path, "dim"));
  const std::string lp = key(path, "law");
  const Json& law = object(field(j, "law", path), lp);
  const Json& kind = field(law, "kind", lp);
  if (!kind.is_string()) bad(key(lp, "kind"), "expected a string");
  const auto k = kind.get<std::string>();
  if (k == "uniform")
    m.law = UniformLaw{number_from_json(field(law, "a", lp), key(lp, "a")),
                       number_from_json(field(law, "b", lp), key(lp, "b"))};
  else if (k == "gaussian")
    m.law = GaussianLaw{number_from_json(field(law, "mean", lp), key(lp, "mean")),
                        number_from_json(field(law, "sd", lp), key(lp, "sd"))};
  else if (k == "fixed")
    m.law = FixedLaw{numbers_from_json(field(law, "values", lp), key(lp, "values"))};
  else
    bad(key(lp, "kind"), "unknown law '" + k + "' (expected uniform, gaussian or fixed)");
  if (const Json* s = optional_field(j, "seed", path)) m.seed = unsigned_from_json(*s, key(path, "seed"));
  try {
    m.validate();
  } catch (const Error& e) {
    bad(path, e.what());
  }
  return m;
}

Json polynomial_to_json(const Polynomial& p) {
  Json c = Json::array();
  for (const auto& z : p.coeffs()) c.push_back(z.imag() == 0.0 ? number(z.real()) : complex_to_json(z));
  return {{"coeffs", std::move(c)}};
}

Polynomial polynomial_from_json(const Json& j, const std::string& path) {
  const Json& c = array_field(j, "coeffs", path);
  if (c.empty()) bad(key(path, "coeffs"), "needs at least one coefficient");
  std::vector<cplx> coeffs;
  for (std::size_t i = 0; i < c.size(); ++i) coeffs.push_back(complex_from_json(c[i], idx(key(path, "coeffs"), i)));
  return Polynomial(std::move(coeffs));
}

Json scalar_function_to_json(const ScalarFunction& f) {
  if (!f.as_polynomial()) raise(ErrorKind::capability, "only polynomial scalar functions are serializable");
  return polynomial_to_json(*f.as_polynomial());
}

ScalarFunction scalar_function_from_json(const Json& j, const std::string& path) {
  return ScalarFunction::polynomial(polynomial_from_json(j, path));
}

Json separable_to_json(const SeparableIntegrand& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms) {
    Json row = Json::array();
    for (const auto& f : t) row.push_back(scalar_function_to_json(f));
    terms.push_back(std::move(row));
  }
  return {{"arity", s.arity}, {"terms", std::move(terms)}};
}

SeparableIntegrand separable_from_json(const Json& j, const std::string& path) {
  SeparableIntegrand s;
  const long long arity = integer_from_json(field(j, "arity", path), key(path, "arity"));
  if (arity < 1) bad(key(path, "arity"), "arity must be positive");
  s.arity = static_cast<std::size_t>(arity);
  const Json& terms = array_field(j, "terms", path);
  const std::string tp = key(path, "terms");
  if (terms.empty()) bad(tp, "needs at least one term");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const Json& row = terms[t];
    if (!row.is_array() || row.size() != s.arity)
      bad(idx(tp, t), "expected " + std::to_string(s.arity) + " factors (one per variable)");
    std::vector<ScalarFunction> fs;
    for (std::size_t i = 0; i < row.size(); ++i) fs.push_back(scalar_function_from_json(row[i], idx(idx(tp, t), i)));
    s.terms.push_back(std::move(fs));
  }
  return s;
}

MultivariateFunction integrand_from_json(const Json& j, const std::string& path) {
  if (const Json* dd = optional_field(j, "divided_difference", path)) {
    const std::string dp = key(path, "divided_difference");
    const auto f = scalar_function_from_json(field(*dd, "f", dp), key(dp, "f"));
    const long long order = integer_from_json(field(*dd, "order", dp), key(dp, "order"));
    if (order < 0) bad(key(dp, "order"), "order must be nonnegative");
    return integrand_from_divided_difference(f, static_cast<int>(order));
  }
  return MultivariateFunction::from_separable(separable_from_json(j, path));
}

Json tensor_to_json(const SquareTensor& t) {
  Json e = Json::array();
  for (const auto& z : t.entries) e.push_back(complex_to_json(z));
  return {{"mode_dims", t.mode_dims}, {"entries", std::move(e)}};
}

SquareTensor tensor_from_json(const Json& j, const std::string& path) {
  const Json& md = array_field(j, "mode_dims", path);
  std::vector<Index> dims;
  for (std::size_t i = 0; i < md.size(); ++i) {
    const long long d = integer_from_json(md[i], idx(key(path, "mode_dims"), i));
    if (d < 1) bad(idx(key(path, "mode_dims"), i), "mode dimension must be positive");
    dims.push_back(d);
  }
  const Json& e = array_field(j, "entries", path);
  std::vector<cplx> entries;
  for (std::size_t i = 0; i < e.size(); ++i) entries.push_back(complex_from_json(e[i], idx(key(path, "entries"), i)));
  try {
    return SquareTensor(std::move(dims), std::move(entries));
  } catch (const Error& err) {
    bad(path, err.what());
  }
}

Json moi_result_to_json(const MoiResult& r) {
  return {{"value", matrix_to_json(r.value)},
          {"eigen_tuple_count", r.eigen_tuple_count},
          {"wall_time_s", number(r.wall_time_s)}};
}

MoiRequest moi_request_from_json(const Json& j) {
  check_schema_version(j);
  std::vector<SpectralDecomposition> ops;
  const Json& oj = array_field(j, "operators", "$");
  for (std::size_t i = 0; i < oj.size(); ++i) {
    const std::string p = idx("$.operators", i);
    const auto m = matrix_from_json(oj[i], p);
    try {
      ops.push_back(HermitianOperator(m).spectral());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::validation) bad(p, e.what());
      throw;
    }
  }
  MoiRequest req{std::move(ops), integrand_from_json(field(j, "integrand", "$"), "$.integrand"),
                 matrices_from_json(field(j, "arguments", "$"), "$.arguments")};
  req.validate();
  return req;
}

Json monomial_polynomial_to_json(const MonomialPolynomial& p) {
  Json terms = Json::array();
  for (const auto& t : p.terms) terms.push_back({{"exp", t.exponent.components}, {"coef", number(t.coefficient)}});
  return {{"arity", p.arity}, {"terms", std::move(terms)}};
}

MonomialPolynomial monomial_polynomial_from_json(const Json& j, const std::string& path) {
  MonomialPolynomial p;
  p.arity = static_cast<int>(integer_from_json(field(j, "arity", path), key(path, "arity")));
  const Json& terms = array_field(j, "terms", path);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tp = idx(key(path, "terms"), t);
    const Json& e = array_field(terms[t], "exp", tp);
    MultiIndex mi;
    for (std::size_t i = 0; i < e.size(); ++i)
      mi.components.push_back(static_cast<int>(integer_from_json(e[i], idx(key(tp, "exp"), i))));
    p.terms.push_back({mi, number_from_json(field(terms[t], "coef", tp), key(tp, "coef"))});
  }
  try {
    p.validate();
  } catch (const Error& err) {
    bad(path, err.what());
  }
  return p;
}

Json inner_power_to_json(const InnerPowerForm& ip) {
  Json terms = Json::array();
  for (const auto& t : ip.terms)
    terms.push_back({{"degree", t.degree}, {"coef", number(t.coefficient)}, {"direction", t.direction}});
  return {{"arity", ip.arity}, {"terms", std::move(terms)}};
}

Json linear_product_to_json(const LinearProductForm& lp) {
  return {{"arity", lp.arity}, {"terms", lp.terms}};
}

Json remainder_spec_to_json(const RemainderSpec& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms) terms.push_back({{"slot", t.slot}, {"f", scalar_function_to_json(t.phi)}});
  Json base = Json::array(), pert = Json::array();
  for (const auto& m : s.base) base.push_back(matrix_to_json(m));
  for (const auto& m : s.perturbations) pert.push_back(matrix_to_json(m));
  return {{"order", s.order},
          {"flavor", s.flavor == RemainderFlavor::self_adjoint ? "self_adjoint" : "unitary"},
          {"terms", std::move(terms)},
          {"base", std::move(base)},
          {"perturbations", std::move(pert)}};
}

RemainderSpec remainder_spec_from_json(const Json& j) {
  check_schema_version(j);
  RemainderSpec s;
  s.order = static_cast<int>(integer_from_json(field(j, "order", "$"), "$.order"));
  const Json& fl = field(j, "flavor", "$");
  const std::string flavor = fl.is_string() ? fl.get<std::string>() : "";
  if (flavor == "self_adjoint")
    s.flavor = RemainderFlavor::self_adjoint;
  else if (flavor == "unitary")
    s.flavor = RemainderFlavor::unitary;
  else
    bad("$.flavor", "expected \"self_adjoint\" or \"unitary\"");
  const Json& terms = array_field(j, "terms", "$");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tp = idx("$.terms", t);
    const long long slot = integer_from_json(field(terms[t], "slot", tp), key(tp, "slot"));
    if (slot < 0) bad(key(tp, "slot"), "slot must be nonnegative");
    s.terms.push_back({static_cast<std::size_t>(slot), scalar_function_from_json(field(terms[t], "f", tp), key(tp, "f"))});
  }
  s.base = matrices_from_json(field(j, "base", "$"), "$.base");
  s.perturbations = matrices_from_json(field(j, "perturbations", "$"), "$.perturbations");
  s.validate();
  return s;
}

Json experiment_to_json(const TailBoundExperiment& e) {
  Json models = Json::array(), fixed = Json::array(), slots = Json::array();
  for (const auto& m : e.operator_models) models.push_back(model_to_json(m));
  for (const auto& x : e.fixed_inputs) fixed.push_back(matrix_to_json(x));
  for (const auto& f : e.slot_functions) slots.push_back(scalar_function_to_json(f));
  Json j = {{"theorem_id", std::string(to_string(e.theorem))},
            {"operator_models", std::move(models)},
            {"fixed_inputs", std::move(fixed)},
            {"order", e.order},
            {"theta_grid", e.theta_grid},
            {"samples", e.samples},
            {"seed", e.seed}};
  if (e.integrand) j["integrand"] = separable_to_json(*e.integrand);
  if (e.function) j["function"] = scalar_function_to_json(*e.function);
  if (!e.slot_functions.empty()) j["slot_functions"] = std::move(slots);
  if (!e.schatten_p.empty()) j["schatten_p"] = e.schatten_p;
  if (e.upsilon != 0.0) j["upsilon"] = e.upsilon;
  if (e.kappa != 0.0) j["kappa"] = e.kappa;
  return j;
}

TailBoundExperiment experiment_from_json(const Json& j) {
  check_schema_version(j);
  TailBoundExperiment e;
  const Json& id = field(j, "theorem_id", "$");
  if (!id.is_string()) bad("$.theorem_id", "expected a string");
  try {
    e.theorem = parse_theorem_id(id.get<std::string>());
  } catch (const Error& err) {
    bad("$.theorem_id", err.what());
  }
  const Json& models = array_field(j, "operator_models", "$");
  for (std::size_t i = 0; i < models.size(); ++i)
    e.operator_models.push_back(model_from_json(models[i], idx("$.operator_models", i)));
  if (const Json* f = optional_field(j, "fixed_inputs", "$")) e.fixed_inputs = matrices_from_json(*f, "$.fixed_inputs");
  if (const Json* f = optional_field(j, "integrand", "$")) e.integrand = separable_from_json(*f, "$.integrand");
  if (const Json* f = optional_field(j, "function", "$")) e.function = scalar_function_from_json(*f, "$.function");
  if (const Json* f = optional_field(j, "slot_functions", "$")) {
    if (!f->is_array()) bad("$.slot_functions", "expected an array");
    for (std::size_t i = 0; i < f->size(); ++i)
      e.slot_functions.push_back(scalar_function_from_json((*f)[i], idx("$.slot_functions", i)));
  }
  if (const Json* f = optional_field(j, "order", "$")) e.order = static_cast<int>(integer_from_json(*f, "$.order"));
  if (const Json* f = optional_field(j, "schatten_p", "$")) e.schatten_p = numbers_from_json(*f, "$.schatten_p");
  if (const Json* f = optional_field(j, "upsilon", "$")) e.upsilon = number_from_json(*f, "$.upsilon");
  if (const Json* f = optional_field(j, "kappa", "$")) e.kappa = number_from_json(*f, "$.kappa");
  e.theta_grid = numbers_from_json(field(j, "theta_grid", "$"), "$.theta_grid");
  e.samples = static_cast<std::size_t>(unsigned_from_json(field(j, "samples", "$"), "$.samples"));
  e.seed = unsigned_from_json(field(j, "seed", "$"), "$.seed");
  e.validate();
  return e;
}

Json report_to_json(const TailBoundReport& r) {
  Json rows = Json::array(), fixed = Json::array(), expect = Json::array(), constants = Json::object();
  for (const auto& row : r.rows) rows.push_back(row_to_json(row));
  for (const auto& row : r.fixed_kappa_rows) fixed.push_back(row_to_json(row));
  for (const auto& e : r.expectations) {
    Json x = estimate_to_json(e.estimate);
    x["name"] = e.name;
    expect.push_back(std::move(x));
  }
  for (const auto& [k, v] : r.constants) constants[k] = number(v);
  Json meta = {{"seed", r.seed},
               {"N", r.samples},
               {"theorem_id", std::string(to_string(r.theorem))},
               {"completed", r.completed},
               {"aborted", r.aborted},
               {"run_failed", r.run_failed},
               {"norm_surrogate", r.norm_surrogate},
               {"constants", std::move(constants)},
               {"abort_messages", r.abort_messages}};
  Json j = {{"rows", std::move(rows)},
            {"expectation_estimates", std::move(expect)},
            {"statistic", estimate_to_json(r.statistic)},
            {"all_satisfied", r.all_satisfied()},
            {"metadata", std::move(meta)}};
  if (r.theorem == TheoremId::higher_difference) {
    j["fixed_kappa_rows"] = std::move(fixed);
    j["kappa_excluded"] = r.kappa_excluded;
  }
  return document("tailbound_report", std::move(j));
}

std::string report_to_csv(const TailBoundReport& r) {
  std::ostringstream os;
  os << "theta,empirical_prob,mc_stderr,bound_rhs,satisfied\n";
  for (const auto& row : r.rows)
    os << csv_number(row.theta) << ',' << csv_number(row.empirical_prob) << ',' << csv_number(row.mc_stderr) << ','
       << csv_number(row.bound_rhs) << ',' << (row.satisfied ? "true" : "false") << '\n';
  return os.str();
}

Json convergence_config_to_json(const ConvergenceConfig& c) {
  return {{"model", model_to_json(c.model)},
          {"function", scalar_function_to_json(c.function)},
          {"order", c.order},
          {"r", c.r},
          {"eps0", c.eps0},
          {"steps", c.steps},
          {"samples", c.samples},
          {"perturbation_norm", c.perturbation_norm},
          {"seed", c.seed}};
}

ConvergenceConfig convergence_config_from_json(const Json& j) {
  check_schema_version(j);
  ConvergenceConfig c;
  c.model = model_from_json(field(j, "model", "$"), "$.model");
  c.function = scalar_function_from_json(field(j, "function", "$"), "$.function");
  c.order = static_cast<int>(integer_from_json(field(j, "order", "$"), "$.order"));
  c.r = static_cast<int>(integer_from_json(field(j, "r", "$"), "$.r"));
  c.eps0 = number_from_json(field(j, "eps0", "$"), "$.eps0");
  c.steps = static_cast<int>(integer_from_json(field(j, "steps", "$"), "$.steps"));
  c.samples = static_cast<std::size_t>(unsigned_from_json(field(j, "samples", "$"), "$.samples"));
  if (const Json* f = optional_field(j, "perturbation_norm", "$"))
    c.perturbation_norm = number_from_json(*f, "$.perturbation_norm");
  c.seed = unsigned_from_json(field(j, "seed", "$"), "$.seed");
  c.validate();
  return c;
}

Json convergence_report_to_json(const ConvergenceReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"m", row.m},
                    {"eps", number(row.eps)},
                    {"difference", estimate_to_json(row.difference)},
                    {"bound", estimate_to_json(row.bound)},
                    {"dominated", row.dominated}});
  return document("convergence_report", {{"rows", std::move(rows)},
                                         {"aborted", r.aborted},
                                         {"run_failed", r.run_failed},
                                         {"dominated", r.dominated},
                                         {"monotone_decreasing", r.monotone_decreasing},
                                         {"decay_ratio", number(r.decay_ratio)},
                                         {"decay_target_met", r.decay_target_met},
                                         {"norm_surrogate", r.norm_surrogate}});
}

std::string convergence_report_to_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "m,eps,difference_mean,difference_stderr,bound_mean,bound_stderr,dominated\n";
  for (const auto& row : r.rows)
    os << row.m << ',' << csv_number(row.eps) << ',' << csv_number(row.difference.mean) << ','
       << csv_number(row.difference.stderr_) << ',' << csv_number(row.bound.mean) << ','
       << csv_number(row.bound.stderr_) << ',' << (row.dominated ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace moikit::io
