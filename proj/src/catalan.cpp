#include "stubborn/catalan.hpp"

#include <cmath>

#include <fmt/core.h>

namespace stubborn {

BigInt catalan_number(std::uint64_t n) {
  // C_{k+1} = C_k * 2(2k+1) / (k+2); the division is exact at every step.
  BigInt c = 1;
  for (std::uint64_t k = 0; k < n; ++k) {
    c *= 2 * (2 * k + 1);
    c /= (k + 2);
  }
  return c;
}

double catalan_series(double x) {
  if (!(x >= 0.0 && x <= 0.25)) {
    throw DomainError(fmt::format("Catalan series is defined on [0, 1/4], got {}", x));
  }
  return 2.0 / (1.0 + std::sqrt(1.0 - 4.0 * x));
}

namespace {

// Walks paths below the diagonal: x > y at every interior point.
std::uint64_t walk(unsigned x, unsigned y, unsigned end) {
  if (x == end && y == end) return 1;
  std::uint64_t count = 0;
  if (x < end) count += walk(x + 1, y, end);
  if (y < end && (y + 1 < x || (x == end && y + 1 == end))) count += walk(x, y + 1, end);
  return count;
}

}  // namespace

std::uint64_t count_strict_paths_oracle(unsigned n) {
  if (n > kMaxPathOracleSize) {
    throw CapacityError(fmt::format("path enumeration is limited to n <= {}, got {}",
                                    kMaxPathOracleSize, n));
  }
  // First step must go right; the second branch of walk() lets the last step
  // land on the diagonal endpoint.
  return walk(1, 0, n + 1);
}

CatalanDistribution::CatalanDistribution(double p, CatalanKind kind) : p_(p), kind_(kind) {
  if (!(p > 0.5 && p < 1.0)) {
    throw DomainError(fmt::format("Catalan distribution needs 1/2 < p < 1, got p = {}", p));
  }
}

double CatalanDistribution::step_ratio(std::uint64_t n) const {
  const double pq = p_ * q();
  const auto m = static_cast<double>(n);
  if (kind_ == CatalanKind::FirstType) {
    return pq * 2.0 * (2.0 * m - 1.0) / (m + 1.0);
  }
  // pmf(1) / pmf(0) = pq / p = q.
  if (n == 1) return q();
  return pq * 2.0 * (2.0 * m - 3.0) / m;
}

double CatalanDistribution::pmf(std::uint64_t n) const {
  double term = p_;
  for (std::uint64_t k = 1; k <= n && term > 0.0; ++k) term *= step_ratio(k);
  return term;
}

std::vector<double> CatalanDistribution::pmf_table(std::uint64_t n_max) const {
  std::vector<double> table;
  table.reserve(n_max + 1);
  double term = p_;
  table.push_back(term);
  for (std::uint64_t k = 1; k <= n_max; ++k) {
    term *= step_ratio(k);
    table.push_back(term);
  }
  return table;
}

double CatalanDistribution::mean() const {
  const double q = this->q();
  return kind_ == CatalanKind::FirstType ? q / (p_ - q) : p_ * q / (p_ - q);
}

}  // namespace stubborn
