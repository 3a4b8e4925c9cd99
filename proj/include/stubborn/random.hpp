#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>

namespace stubborn {

/// Anything that hands out uniform reals in [0, 1).
template <class S>
concept UniformSource = requires(S& s) {
  { s.next_uniform() } -> std::convertible_to<double>;
};

namespace philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11), bit-compatible with Random123.
Counter philox4x32_10(Counter counter, Key key) noexcept;

}  // namespace philox

/// Reproducible uniform stream addressed by (seed, index).
///
/// Derivation, stable across versions:
///   key     = (seed & 0xffffffff, seed >> 32)
///   counter = (block & 0xffffffff, block >> 32, index & 0xffffffff, index >> 32)
/// for block = 0, 1, 2, ...  Each Philox block yields two 64-bit words
/// (w0 | w1 << 32) and (w2 | w3 << 32), consumed in that order; a word u maps
/// to the double (u >> 11) * 2^-53.
///
/// Simulators give every cycle its own stream index, so results do not depend
/// on which thread ran which cycle.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t index) noexcept;

  std::uint64_t next_u64() noexcept;
  double next_uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  philox::Key key_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned buffered_ = 0;
};

/// Child seed for sub-experiment `index` of `seed`: the first 64-bit word of
/// the Philox block with counter (0xffffffff, 0xffffffff, index lo, index hi).
/// That block number is never reached by an ordinary CounterStream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Exponential variate with the given rate; +inf when the rate is zero.
template <UniformSource S>
double exponential(S& stream, double rate) {
  const double u = stream.next_uniform();
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-u) / rate;
}

template <UniformSource S>
bool bernoulli(S& stream, double probability) {
  return stream.next_uniform() < probability;
}

}  // namespace stubborn
