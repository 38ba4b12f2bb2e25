#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace moikit {

/// SplitMix64 finalizer over (seed, index). Used to derive independent
/// per-sample streams so results never depend on evaluation order.
std::uint64_t mix64(std::uint64_t seed, std::uint64_t index) noexcept;

/// Explicit random state. Distributions are implemented here rather than via
/// <random> distribution objects, whose output is implementation-defined;
/// reports must be byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  /// Child stream `index` of this seed; independent of how many draws were
  /// already taken from *this.
  Rng stream(std::uint64_t index) const { return Rng(mix64(seed_, index)); }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on (0, 1]; safe as a log argument.
  double uniform01_open_low();
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  /// Standard normal via Box-Muller (no cached second variate).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Standard complex normal: real and imaginary parts N(0, 1/2).
  std::complex<double> complex_normal();
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace moikit
