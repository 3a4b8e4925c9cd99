#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace stubborn {

/// A Monte Carlo mean with its standard error.
struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;

  /// (mean - expected) / std_error; 0 when both the error and the gap vanish.
  double z_score(double expected) const;
};

/// Running means and co-moments of K jointly observed variables.
///
/// merge() uses the pairwise update of Chan, Golub & LeVeque, so partial
/// accumulators built on separate chunks combine into the same numbers for
/// any fixed combination order.
template <std::size_t K>
class MomentAccumulator {
 public:
  void add(const std::array<double, K>& x) {
    ++count_;
    const double n = static_cast<double>(count_);
    std::array<double, K> delta{};
    for (std::size_t i = 0; i < K; ++i) {
      delta[i] = x[i] - mean_[i];
      mean_[i] += delta[i] / n;
    }
    for (std::size_t i = 0; i < K; ++i) {
      const double after = x[i] - mean_[i];
      for (std::size_t j = 0; j < K; ++j) comoment_[i][j] += after * delta[j];
    }
  }

  void merge(const MomentAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    std::array<double, K> delta{};
    for (std::size_t i = 0; i < K; ++i) delta[i] = other.mean_[i] - mean_[i];
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j < K; ++j) {
        comoment_[i][j] += other.comoment_[i][j] + delta[i] * delta[j] * na * nb / n;
      }
    }
    for (std::size_t i = 0; i < K; ++i) mean_[i] += delta[i] * nb / n;
    count_ += other.count_;
  }

  std::uint64_t count() const { return count_; }
  double mean(std::size_t i) const { return mean_[i]; }
  /// Unbiased sample covariance.
  double covariance(std::size_t i, std::size_t j) const {
    return count_ < 2 ? 0.0 : comoment_[i][j] / static_cast<double>(count_ - 1);
  }

  /// Mean of variable i, scaled.
  MonteCarloEstimate estimate(std::size_t i, double scale = 1.0) const {
    const double n = static_cast<double>(count_);
    const double se = count_ < 2 ? 0.0 : std::sqrt(std::max(covariance(i, i), 0.0) / n);
    return {.mean = scale * mean_[i], .std_error = std::abs(scale) * se, .n_samples = count_};
  }

  /// scale * mean(num) / mean(den), with the delta-method standard error
  /// sqrt(Var(X - r Y) / n) / |mean(Y)|.
  MonteCarloEstimate ratio_estimate(std::size_t num, std::size_t den, double scale = 1.0) const {
    const double y = mean_[den];
    const double r = mean_[num] / y;
    const double n = static_cast<double>(count_);
    const double var = covariance(num, num) - 2.0 * r * covariance(num, den) +
                       r * r * covariance(den, den);
    const double se = count_ < 2 ? 0.0 : std::sqrt(std::max(var, 0.0) / n) / std::abs(y);
    return {.mean = scale * r, .std_error = std::abs(scale) * se, .n_samples = count_};
  }

 private:
  std::uint64_t count_ = 0;
  std::array<double, K> mean_{};
  std::array<std::array<double, K>, K> comoment_{};
};

}  // namespace stubborn

