// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace splicedet {

/// Deterministic random generator, version "rng-v1": xoshiro256++ with
/// splitmix64 state expansion. The algorithm is fixed so that identical
/// seeds give identical draw sequences on every platform. Normal draws use
/// Box-Muller (one fresh uniform pair per draw); truncated draws reject and
/// redraw, so the consumed stream depends only on the drawn values.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1), 53-bit resolution.
  double next_double();
  /// Standard normal.
  double next_normal();
  /// Normal(0, sigma^2) conditioned on |z| <= clip_sigmas standard deviations.
  double truncated_normal(double sigma, double clip_sigmas = 2.0);
  /// Unbiased uniform draw from [0, n).
  std::uint64_t uniform_below(std::uint64_t n);
  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);
  double uniform(double lo, double hi);
  /// Independent derived stream; deterministic in (seed, stream).
  Rng fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace splicedet
