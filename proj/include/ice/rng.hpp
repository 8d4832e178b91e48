#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace ice {

/// Seeded stream over std::mt19937_64 with hand-written distributions.
///
/// The engine output is fixed by the C++ standard, but the <random>
/// distribution objects are implementation-defined, so every draw here goes
/// through the functions below to keep runs byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via the Marsaglia polar method.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Knuth's multiplicative Poisson sampler; intended for small lambda.
  std::uint32_t poisson(double lambda);

  /// Index drawn proportionally to non-negative weights (at least one positive).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Deterministic stream-seed derivation: FNV-1a over (master, label, index)
/// followed by the SplitMix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index);

/// FNV-1a 64 over raw bytes; used for config and artifact hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace ice
