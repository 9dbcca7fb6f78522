#pragma once

#include <cstdint>

namespace patchnet {

/// SplitMix64 finalizer (Steele, Lea & Flood). Used both as the generator
/// step and as the seed-mixing function.
std::uint64_t mix64(std::uint64_t z);

/// Seed for stream `index` derived from `base`:
///   mix64(base + 0x9E3779B97F4A7C15 * (index + 1))
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Portable SplitMix64 generator. Same seed, same sequence on every platform.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform in [0, 1) with 53 random bits: k / 2^53.
  double uniform();
  /// Uniform in (0, 1): (k + 0.5) / 2^53. Never 0, never 1.
  double uniform_open();

 private:
  std::uint64_t state_;
};

/// Inverse-CDF exponential: -mean * ln(1 - u).
double exponential_from_uniform(double u, double mean);

/// Exponential variate with the given mean, u drawn from uniform_open(),
/// so the result is strictly positive.
double sample_exponential(SplitMix64& rng, double mean);

}  // namespace patchnet
