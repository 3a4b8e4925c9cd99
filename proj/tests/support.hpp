#pragma once

// Test-only helpers: a scripted uniform stream and brute-force oracles that
// share no code path with the library routines they check.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace stubborn::testing {

/// Replays a fixed list of uniforms; running dry is a test bug.
class ScriptedStream {
 public:
  ScriptedStream(std::initializer_list<double> values) : values_(values) {}

  double next_uniform() {
    if (next_ >= values_.size()) throw std::logic_error("scripted stream exhausted");
    return values_[next_++];
  }
  std::size_t consumed() const { return next_; }
  std::size_t remaining() const { return values_.size() - next_; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

/// The time an exponential clock of `rate` reports for uniform u.
inline double clock_time(double u, double rate) { return -std::log1p(-u) / rate; }

/// E[last success index] over all 2^n outcomes, summed in extended precision
/// so that 2^15 terms stay well inside 1e-12.
inline double biased_coin_enumeration(unsigned n, double gamma) {
  const long double g = gamma;
  long double expectation = 0.0L;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    long double weight = 1.0L;
    unsigned last = 0;
    for (unsigned i = 0; i < n; ++i) {
      const bool heads = (mask >> i) & 1U;
      weight *= heads ? g : 1.0L - g;
      if (heads) last = i + 1;
    }
    expectation += weight * last;
  }
  return static_cast<double>(expectation);
}

/// sum_{n <= terms} C_n x^n, terms built by the ratio C_n / C_{n-1}.
inline double truncated_catalan_series(double x, unsigned terms) {
  double term = 1.0;
  double sum = 1.0;
  for (unsigned n = 1; n <= terms; ++n) {
    term *= x * 2.0 * (2.0 * n - 1.0) / (n + 1.0);
    sum += term;
  }
  return sum;
}

}  // namespace stubborn::testing
