// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace arollout {

// xoshiro256** (Blackman & Vigna), state expanded from a 64-bit seed with
// splitmix64. All conversions to floating point are done here rather than
// through <random> distributions, whose output is implementation-defined, so
// generated series are identical across standard libraries.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  // [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller; the second variate is cached.
  double normal();
  // Uniform integer in [0, bound), rejection-sampled.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent stream seed (splitmix64 of seed ^ salt).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace arollout
