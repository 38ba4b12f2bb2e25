#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "moikit/calculus.hpp"
#include "moikit/harness.hpp"
#include "moikit/integrand.hpp"
#include "moikit/moi.hpp"
#include "moikit/poly_approx.hpp"
#include "moikit/random_operator.hpp"
#include "moikit/tensor.hpp"

namespace moikit::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Checks "schema_version" when present; documents without it are accepted.
void check_schema_version(const Json& j, const std::string& path = "$");
/// Adds "schema_version" and "kind".
Json document(std::string_view kind, Json body);

/// Finite values as numbers; ±∞ and NaN as the strings "inf", "-inf", "nan".
Json number(double x);
double number_from_json(const Json& j, const std::string& path);

Json complex_to_json(cplx z);
cplx complex_from_json(const Json& j, const std::string& path);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& path);
std::vector<ComplexMatrix> matrices_from_json(const Json& j, const std::string& path);

Json model_to_json(const RandomOperatorModel& m);
RandomOperatorModel model_from_json(const Json& j, const std::string& path);

Json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j, const std::string& path);
/// Only polynomial scalar functions are serializable.
Json scalar_function_to_json(const ScalarFunction& f);
ScalarFunction scalar_function_from_json(const Json& j, const std::string& path);

Json separable_to_json(const SeparableIntegrand& s);
SeparableIntegrand separable_from_json(const Json& j, const std::string& path);

/// Separable form {"arity","terms"} or {"divided_difference": {"f": poly, "order": k}}.
MultivariateFunction integrand_from_json(const Json& j, const std::string& path);

Json tensor_to_json(const SquareTensor& t);
SquareTensor tensor_from_json(const Json& j, const std::string& path);

Json moi_result_to_json(const MoiResult& r);
MoiRequest moi_request_from_json(const Json& j);

Json monomial_polynomial_to_json(const MonomialPolynomial& p);
MonomialPolynomial monomial_polynomial_from_json(const Json& j, const std::string& path);
Json inner_power_to_json(const InnerPowerForm& ip);
Json linear_product_to_json(const LinearProductForm& lp);

Json remainder_spec_to_json(const RemainderSpec& s);
RemainderSpec remainder_spec_from_json(const Json& j);

Json experiment_to_json(const TailBoundExperiment& e);
TailBoundExperiment experiment_from_json(const Json& j);
Json report_to_json(const TailBoundReport& r);
std::string report_to_csv(const TailBoundReport& r);

Json convergence_config_to_json(const ConvergenceConfig& c);
ConvergenceConfig convergence_config_from_json(const Json& j);
Json convergence_report_to_json(const ConvergenceReport& r);
std::string convergence_report_to_csv(const ConvergenceReport& r);

/// Field access with path-qualified validation errors.
const Json& field(const Json& j, const char* key, const std::string& path);
const Json* optional_field(const Json& j, const char* key, const std::string& path);
const Json& array_field(const Json& j, const char* key, const std::string& path);
long long integer_from_json(const Json& j, const std::string& path);
std::uint64_t unsigned_from_json(const Json& j, const std::string& path);

}  // namespace moikit::io
