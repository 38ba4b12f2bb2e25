#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "moikit/rng.hpp"
#include "moikit/spectral.hpp"

namespace moikit {

struct UniformLaw {
  double a = 0.0;
  double b = 1.0;
};
struct GaussianLaw {
  double mean = 0.0;
  double sd = 1.0;
};
struct FixedLaw {
  std::vector<double> values;
};
using EigenvalueLaw = std::variant<UniformLaw, GaussianLaw, FixedLaw>;

/// Random Hermitian operator A = U·diag(λ)·U* with λ i.i.d. from the law and
/// U Haar-distributed, independent of λ.
struct RandomOperatorModel {
  Index dim = 1;
  EigenvalueLaw law = UniformLaw{};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Haar-distributed unitary: Ginibre matrix, QR, then the diagonal phase
/// correction Q·diag(r_kk/|r_kk|) that makes the map measure-correct.
UnitaryOperator sample_haar_unitary(Index dim, Rng& rng);

/// Eigenvalues drawn i.i.d. from the law (fixed laws are returned verbatim).
std::vector<double> sample_eigenvalues(const RandomOperatorModel& model, Rng& rng);

HermitianOperator sample_random_hermitian(const RandomOperatorModel& model, Rng& rng);

/// Ginibre-type Hermitian (G + G*)/2 scaled to the requested operator norm.
HermitianOperator sample_hermitian_direction(Index dim, double norm, Rng& rng);

}  // namespace moikit
