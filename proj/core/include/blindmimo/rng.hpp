#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace blindmimo {

/// Deterministic random source. All library randomness flows through an
/// explicit Rng handle so that a fixed seed reproduces a run bit for bit,
/// and so that Monte-Carlo workers can own independent streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Independent substream keyed by (master seed, realization, purpose).
  static Rng stream(std::uint64_t master, std::uint64_t realization, std::uint64_t purpose);

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos();
  /// Standard normal via Box-Muller (implementation-pinned, unlike
  /// std::normal_distribution).
  double gaussian();
  /// Circularly symmetric complex normal CN(0, 1).
  std::complex<double> cgaussian();

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer, used for seed mixing.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace blindmimo
