#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stubborn/errors.hpp"
#include "stubborn/random.hpp"

namespace stubborn {

using BigInt = boost::multiprecision::cpp_int;

/// C_n = (2n)! / (n! (n+1)!), exact.
BigInt catalan_number(std::uint64_t n);

/// Generating series C(x) = sum C_n x^n = 2 / (1 + sqrt(1 - 4x)) on [0, 1/4].
double catalan_series(double x);

/// Number of up/right lattice paths from (0,0) to (n+1, n+1) that stay
/// strictly below the diagonal between the endpoints. Enumerates every such
/// path one by one; it is a ground-truth check for catalan_number, not a
/// counting routine. Limited to n <= 14.
std::uint64_t count_strict_paths_oracle(unsigned n);

inline constexpr unsigned kMaxPathOracleSize = 14;

enum class CatalanKind { FirstType, SecondType };

/// (p,q)-Catalan laws on the non-negative integers, 1/2 < p < 1, q = 1 - p.
///
///   first type:  P[X = n] = C_n p (pq)^n
///   second type: P[X = 0] = p,  P[X = n] = C_{n-1} (pq)^n  for n >= 1
///
/// The first type is the law of the attacker's block count when the honest
/// chain first leads by one; the second is the law of the attacker's count at
/// the lead-stubborn catch-up time.
class CatalanDistribution {
 public:
  CatalanDistribution(double p, CatalanKind kind);

  double p() const { return p_; }
  double q() const { return 1.0 - p_; }
  CatalanKind kind() const { return kind_; }

  double pmf(std::uint64_t n) const;
  /// pmf(0..n_max) inclusive.
  std::vector<double> pmf_table(std::uint64_t n_max) const;
  double mean() const;

  /// Inverse-CDF draw: walks the cumulative pmf until it exceeds one uniform.
  template <UniformSource S>
  std::uint64_t sample(S& stream) const;

  static constexpr std::uint64_t kSampleWalkCap = 1'000'000;

 private:
  /// pmf(n) / pmf(n-1), n >= 1.
  double step_ratio(std::uint64_t n) const;

  double p_;
  CatalanKind kind_;
};

template <UniformSource S>
std::uint64_t CatalanDistribution::sample(S& stream) const {
  const double u = stream.next_uniform();
  double term = p_;
  double cumulative = term;
  std::uint64_t n = 0;
  while (u >= cumulative) {
    if (++n >= kSampleWalkCap) {
      throw InternalError("Catalan inverse-CDF walk exceeded its cap");
    }
    term *= step_ratio(n);
    cumulative += term;
  }
  return n;
}

}  // namespace stubborn
