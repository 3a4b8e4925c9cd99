#include "stubborn/random.hpp"

namespace stubborn {
namespace philox {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline Counter round(const Counter& c, const Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Counter philox4x32_10(Counter counter, Key key) noexcept {
  counter = round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    counter = round(counter, key);
  }
  return counter;
}

}  // namespace philox

namespace {

philox::Key key_from_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

}  // namespace

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t index) noexcept
    : key_(key_from_seed(seed)), index_(index) {}

std::uint64_t CounterStream::next_u64() noexcept {
  if (buffered_ == 0) {
    const philox::Counter out = philox::philox4x32_10(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
         static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)},
        key_);
    ++block_;
    buffer_[0] = out[0] | (static_cast<std::uint64_t>(out[1]) << 32);
    buffer_[1] = out[2] | (static_cast<std::uint64_t>(out[3]) << 32);
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  const philox::Counter out = philox::philox4x32_10(
      {0xffffffffu, 0xffffffffu, static_cast<std::uint32_t>(index),
       static_cast<std::uint32_t>(index >> 32)},
      key_from_seed(seed));
  return out[0] | (static_cast<std::uint64_t>(out[1]) << 32);
}

}  // namespace stubborn
