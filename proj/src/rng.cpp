#include "patchnet/rng.hpp"

#include <cmath>

#include "patchnet/error.hpp"

namespace patchnet {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPow53 = 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base + kGolden * (index + 1));
}

std::uint64_t SplitMix64::next() {
  state_ += kGolden;
  return mix64(state_);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) / kTwoPow53; }

double SplitMix64::uniform_open() {
  return (static_cast<double>(next() >> 11) + 0.5) / kTwoPow53;
}

double exponential_from_uniform(double u, double mean) {
  if (!(mean > 0)) throw PreconditionError("exponential mean must be positive");
  return -mean * std::log1p(-u);
}

double sample_exponential(SplitMix64& rng, double mean) {
  return exponential_from_uniform(rng.uniform_open(), mean);
}

}  // namespace patchnet
