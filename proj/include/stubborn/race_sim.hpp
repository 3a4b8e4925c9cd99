#pragma once

#include <cstdint>
#include <vector>

#include <fmt/core.h>

#include "stubborn/errors.hpp"
#include "stubborn/mining_params.hpp"
#include "stubborn/random.hpp"
#include "stubborn/statistics.hpp"

namespace stubborn {

/// One simulated attack cycle.
struct CycleOutcome {
  double duration = 0.0;
  double attacker_revenue = 0.0;
  /// Blocks the cycle adds to the official chain (N v N' for the stubborn
  /// strategies).
  std::uint64_t official_blocks = 0;
  /// Attacker blocks among them; attacker_revenue = this * block_reward.
  std::uint64_t attacker_blocks_official = 0;
  /// Attacker block count at the strategy's catch-up stopping time.
  std::uint64_t n_prime_at_tau = 0;
  /// Block counts N and N' of both processes when the cycle ends.
  std::uint64_t honest_blocks_mined = 0;
  std::uint64_t attacker_blocks_mined = 0;
  /// Block arrivals simulated.
  std::uint64_t events = 0;
};

inline constexpr std::uint64_t kMaxEventsPerCycle = 10'000'000;

/// Two independent Poisson block processes, simulated literally: each keeps
/// its own next-arrival clock with exponential inter-arrival times and the
/// earlier clock fires. The constructor draws the honest clock, then the
/// attacker clock; every step redraws the clock that fired. Ties (a
/// probability-zero event) go to the attacker.
template <UniformSource S>
class BlockRace {
 public:
  enum class Arrival { Honest, Attacker };

  BlockRace(double honest_rate, double attacker_rate, S& stream)
      : stream_(stream), honest_rate_(honest_rate), attacker_rate_(attacker_rate) {
    next_honest_ = exponential(stream_, honest_rate_);
    next_attacker_ = exponential(stream_, attacker_rate_);
  }

  Arrival step() {
    if (++events_ > kMaxEventsPerCycle) {
      throw InternalError(
          fmt::format("block race exceeded {} arrivals in one cycle", kMaxEventsPerCycle));
    }
    if (next_honest_ < next_attacker_) {
      now_ = next_honest_;
      ++honest_;
      next_honest_ = now_ + exponential(stream_, honest_rate_);
      return Arrival::Honest;
    }
    now_ = next_attacker_;
    ++attacker_;
    next_attacker_ = now_ + exponential(stream_, attacker_rate_);
    return Arrival::Attacker;
  }

  double now() const { return now_; }
  std::uint64_t honest_blocks() const { return honest_; }
  std::uint64_t attacker_blocks() const { return attacker_; }
  std::uint64_t events() const { return events_; }

 private:
  S& stream_;
  double honest_rate_;
  double attacker_rate_;
  double next_honest_ = 0.0;
  double next_attacker_ = 0.0;
  double now_ = 0.0;
  std::uint64_t honest_ = 0;
  std::uint64_t attacker_ = 0;
  std::uint64_t events_ = 0;
};

/// Index (1-based) of the last success among `draws` Bernoulli(gamma) trials,
/// 0 if none. Consumes exactly `draws` uniforms.
template <UniformSource S>
std::uint64_t last_success_index(std::uint64_t draws, double gamma, S& stream) {
  std::uint64_t last = 0;
  for (std::uint64_t i = 1; i <= draws; ++i) {
    if (bernoulli(stream, gamma)) last = i;
  }
  return last;
}

namespace detail {

template <UniformSource S>
CycleOutcome finish(const BlockRace<S>& race, std::uint64_t revenue_blocks,
                    std::uint64_t official, std::uint64_t n_prime) {
  CycleOutcome out;
  out.duration = race.now();
  out.attacker_blocks_official = revenue_blocks;
  out.attacker_revenue = static_cast<double>(revenue_blocks);
  out.official_blocks = official;
  out.n_prime_at_tau = n_prime;
  out.honest_blocks_mined = race.honest_blocks();
  out.attacker_blocks_mined = race.attacker_blocks();
  out.events = race.events();
  return out;
}

template <UniformSource S>
CycleOutcome honest_cycle(BlockRace<S>& race) {
  using A = typename BlockRace<S>::Arrival;
  const bool mine = race.step() == A::Attacker;
  return finish(race, mine ? 1 : 0, 1, mine ? 1 : 0);
}

// Selfish mining: publish on a one-block tie, override as soon as the lead
// drops back to one.
template <UniformSource S>
CycleOutcome selfish_cycle(BlockRace<S>& race, double gamma, S& stream) {
  using A = typename BlockRace<S>::Arrival;
  if (race.step() == A::Honest) return finish(race, 0, 1, 0);
  if (race.step() == A::Honest) {
    // Lead 1 lost: tie between two published branches, one more block decides.
    std::uint64_t revenue = 0;
    if (race.step() == A::Attacker) {
      revenue = 2;
    } else if (bernoulli(stream, gamma)) {
      revenue = 1;
    }
    return finish(race, revenue, 2, race.attacker_blocks());
  }
  while (race.attacker_blocks() - race.honest_blocks() != 1) race.step();
  const std::uint64_t fork = race.attacker_blocks();
  return finish(race, fork, fork, fork);
}

// Lead-stubborn mining: withhold until the honest chain draws level, then one
// final round decides the fork.
template <UniformSource S>
CycleOutcome lead_stubborn_cycle(BlockRace<S>& race, double gamma, S& stream) {
  using A = typename BlockRace<S>::Arrival;
  if (race.step() == A::Honest) return finish(race, 0, 1, 0);
  while (race.honest_blocks() < race.attacker_blocks()) race.step();
  const std::uint64_t n = race.attacker_blocks();
  std::uint64_t revenue = 0;
  if (race.step() == A::Attacker) {
    revenue = n + 1;
  } else if (bernoulli(stream, gamma)) {
    revenue = n;
  } else {
    // Honest branch wins; attacker keeps the prefix up to the last honest
    // block that was mined on top of it. At most n - 1 such blocks.
    revenue = last_success_index(n - 1, gamma, stream);
  }
  return finish(race, revenue, n + 1, n);
}

// Equal-fork stubborn mining: never overrides, gives up once the honest chain
// leads by one. Revenue comes from honest blocks mined on the attacker's
// branch; with N' = n, n adoption draws, revenue = last adopted index.
template <UniformSource S>
CycleOutcome equal_fork_cycle(BlockRace<S>& race, double gamma, S& stream) {
  while (race.honest_blocks() != race.attacker_blocks() + 1) race.step();
  const std::uint64_t n = race.attacker_blocks();
  return finish(race, last_success_index(n, gamma, stream), n + 1, n);
}

}  // namespace detail

/// Simulates one attack cycle. Time runs in units of tau0 internally (rates p
/// and q); duration and revenue are rescaled by tau0 and block_reward on the
/// way out. Tie-adoption draws are taken after the race, conditioned on its
/// outcome.
template <UniformSource S>
CycleOutcome simulate_cycle(StrategyKind kind, const MiningParams& params, S& stream) {
  BlockRace<S> race(params.p(), params.q(), stream);
  CycleOutcome out;
  switch (kind) {
    case StrategyKind::Honest: out = detail::honest_cycle(race); break;
    case StrategyKind::Selfish: out = detail::selfish_cycle(race, params.gamma(), stream); break;
    case StrategyKind::LeadStubborn:
      out = detail::lead_stubborn_cycle(race, params.gamma(), stream);
      break;
    case StrategyKind::EqualForkStubborn:
      out = detail::equal_fork_cycle(race, params.gamma(), stream);
      break;
  }
  out.duration *= params.tau0();
  out.attacker_revenue *= params.block_reward();
  return out;
}

/// Ratio-of-means estimates over many cycles. Derived figures come from the
/// component means (Gamma = mean R / mean tau), never from per-cycle ratios.
struct SimulatedMetrics {
  StrategyKind kind = StrategyKind::Honest;
  std::uint64_t n_cycles = 0;
  MonteCarloEstimate duration;
  MonteCarloEstimate revenue;
  MonteCarloEstimate official_blocks;
  MonteCarloEstimate n_prime;
  MonteCarloEstimate revenue_ratio;      ///< mean R / mean tau
  MonteCarloEstimate delta;              ///< mean tau / (tau0 mean official)
  MonteCarloEstimate apparent_hashrate;  ///< revenue_ratio * delta * tau0 / b
  std::uint64_t max_events = 0;
};

inline constexpr std::uint64_t kMinMonteCarloCycles = 1000;

/// Runs n_cycles independent cycles; cycle i draws from CounterStream(seed, i).
/// Bit-identical for fixed arguments regardless of `workers` (0 = all cores).
SimulatedMetrics run_monte_carlo(StrategyKind kind, const MiningParams& params,
                                 std::uint64_t n_cycles, std::uint64_t seed,
                                 unsigned workers = 0);

inline constexpr std::uint64_t kMaxPmfBins = 20;

/// Empirical frequencies of N' at the catch-up time for LeadStubborn or
/// EqualForkStubborn: entries 0..n_max, then one overflow bin.
std::vector<double> empirical_nprime_pmf(StrategyKind kind, const MiningParams& params,
                                         std::uint64_t n_cycles, std::uint64_t seed,
                                         std::uint64_t n_max, unsigned workers = 0);

/// E[R / b | N' = n] for n = 0..n_max, estimated from the same cycles that
/// run_monte_carlo would simulate. Bins with fewer than two cycles report
/// n_samples < 2 and a zero error.
std::vector<MonteCarloEstimate> conditional_revenue_by_nprime(StrategyKind kind,
                                                              const MiningParams& params,
                                                              std::uint64_t n_cycles,
                                                              std::uint64_t seed,
                                                              std::uint64_t n_max,
                                                              unsigned workers = 0);

struct PoissonGameEstimate {
  MonteCarloEstimate duration;
  MonteCarloEstimate honest_blocks;
};

/// Races Poisson(alpha) against Poisson(alpha') until N = N' + 1, n_runs times.
PoissonGameEstimate simulate_poisson_game(double alpha, double alpha_prime, std::uint64_t n_runs,
                                          std::uint64_t seed, unsigned workers = 0);

}  // namespace stubborn
