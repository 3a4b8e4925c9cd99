#pragma once

#include <cstdint>
#include <optional>

#include "stubborn/mining_params.hpp"

namespace stubborn {

/// How the stubborn-mining formulas treat gamma = 0, where their
/// (1 - gamma) / gamma factor is a removable 0/0.
enum class GammaZero {
  Reject,  ///< throw DomainError (default; no silent extrapolation)
  Limit,   ///< substitute the gamma -> 0+ limit
};

/// Per-strategy figures of merit. Units: revenue_ratio in reward per unit
/// time, expected_cycle_duration in time, expected_cycle_revenue in reward;
/// delta and apparent_hashrate are dimensionless.
struct StrategyMetrics {
  double revenue_ratio = 0.0;
  double delta = 1.0;
  double apparent_hashrate = 0.0;
  double expected_cycle_duration = 0.0;
  double expected_cycle_revenue = 0.0;
};

// Honest mining: one block per cycle.
StrategyMetrics revenue_ratio_hm(const MiningParams& params);

// Lead-stubborn mining.

/// Mean time until the honest chain catches up (before the final round):
/// p / (p - q) * tau0.
double expected_catch_up_time_lsm(const MiningParams& params);
/// (p + pq - q^2) / (p - q) * tau0.
double expected_cycle_duration_lsm(const MiningParams& params);
/// (p / (p - q) + q) q b - f(gamma) b.
double expected_revenue_lsm(const MiningParams& params, GammaZero mode = GammaZero::Reject);
/// (p + pq - q^2) / (p + pq - q).
double delta_lsm(const MiningParams& params);
/// Mean attacker block count at the catch-up time: pq / (p - q).
double expected_nprime_lsm(const MiningParams& params);
/// Mean official-chain blocks per cycle: E[tau_LSM] / (2 tau0) + 1/2.
double expected_official_blocks_lsm(const MiningParams& params);
StrategyMetrics revenue_ratio_lsm(const MiningParams& params, GammaZero mode = GammaZero::Reject);

// Equal-fork stubborn mining.

/// tau0 / (p - q).
double expected_cycle_duration_efsm(const MiningParams& params);
/// q / (p - q) b - g(gamma) b.
double expected_revenue_efsm(const MiningParams& params, GammaZero mode = GammaZero::Reject);
/// 1 / p.
double delta_efsm(const MiningParams& params);
/// q / (p - q).
double expected_nprime_efsm(const MiningParams& params);
/// Every honest block of the race lands in the official chain: p / (p - q).
double expected_official_blocks_efsm(const MiningParams& params);
StrategyMetrics revenue_ratio_efsm(const MiningParams& params,
                                   GammaZero mode = GammaZero::Reject);

/// Closed-form metrics for any strategy that has them; nullopt for selfish
/// mining, which is only available by simulation.
std::optional<StrategyMetrics> analytic_metrics(StrategyKind kind, const MiningParams& params,
                                                GammaZero mode = GammaZero::Reject);

/// E[Z] for Z the index of the last success in n Bernoulli(gamma) tosses
/// (0 if none): n + 1 - (1 - (1 - gamma)^(n+1)) / gamma. Returns exactly 0 at
/// gamma = 0, where Z vanishes almost surely.
double biased_coin_expected_max_index(std::uint64_t n, double gamma);

struct PoissonGameExpectations {
  double duration;       ///< E[tau] = 1 / (alpha - alpha')
  double honest_blocks;  ///< E[N(tau)] = alpha / (alpha - alpha')
};

/// Race of two Poisson processes with rates alpha > alpha' >= 0, stopped the
/// first time N = N' + 1.
PoissonGameExpectations poisson_game_expectations(double alpha, double alpha_prime);

}  // namespace stubborn
