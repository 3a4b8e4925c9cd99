#include "stubborn/race_sim.hpp"

#include <algorithm>
#include <array>

#include "stubborn/parallel.hpp"

namespace stubborn {
namespace {

enum Column : std::size_t { kDuration, kRevenue, kOfficial, kNPrime, kColumns };

struct CycleAccumulator {
  MomentAccumulator<kColumns> moments;
  std::uint64_t max_events = 0;

  void merge(const CycleAccumulator& other) {
    moments.merge(other.moments);
    max_events = std::max(max_events, other.max_events);
  }
};

struct Histogram {
  std::vector<std::uint64_t> counts;

  void merge(const Histogram& other) {
    if (counts.empty()) counts.assign(other.counts.size(), 0);
    for (std::size_t i = 0; i < other.counts.size(); ++i) counts[i] += other.counts[i];
  }
};

struct ConditionalAccumulator {
  std::vector<MomentAccumulator<1>> bins;

  void merge(const ConditionalAccumulator& other) {
    if (bins.empty()) bins.resize(other.bins.size());
    for (std::size_t i = 0; i < other.bins.size(); ++i) bins[i].merge(other.bins[i]);
  }
};

void require_cycles(std::uint64_t n_cycles) {
  if (n_cycles < kMinMonteCarloCycles) {
    throw DomainError(fmt::format("Monte Carlo runs need at least {} cycles, got {}",
                                  kMinMonteCarloCycles, n_cycles));
  }
}

void require_catch_up_strategy(StrategyKind kind) {
  if (kind != StrategyKind::LeadStubborn && kind != StrategyKind::EqualForkStubborn) {
    throw DomainError("N' laws are defined for the lead-stubborn and equal-fork races only");
  }
}

}  // namespace

SimulatedMetrics run_monte_carlo(StrategyKind kind, const MiningParams& params,
                                 std::uint64_t n_cycles, std::uint64_t seed, unsigned workers) {
  require_cycles(n_cycles);
  const auto acc = chunked_reduce<CycleAccumulator>(
      n_cycles, workers, [&](CycleAccumulator& a, std::uint64_t i) {
        CounterStream stream(seed, i);
        const CycleOutcome c = simulate_cycle(kind, params, stream);
        a.moments.add({c.duration, c.attacker_revenue, static_cast<double>(c.official_blocks),
                       static_cast<double>(c.n_prime_at_tau)});
        a.max_events = std::max(a.max_events, c.events);
      });

  const double b = params.block_reward();
  const double tau0 = params.tau0();
  SimulatedMetrics m;
  m.kind = kind;
  m.n_cycles = n_cycles;
  m.duration = acc.moments.estimate(kDuration);
  m.revenue = acc.moments.estimate(kRevenue);
  m.official_blocks = acc.moments.estimate(kOfficial);
  m.n_prime = acc.moments.estimate(kNPrime);
  m.revenue_ratio = acc.moments.ratio_estimate(kRevenue, kDuration);
  m.delta = acc.moments.ratio_estimate(kDuration, kOfficial, 1.0 / tau0);
  // Gamma * delta * tau0 / b collapses to mean R / (b mean official).
  m.apparent_hashrate = acc.moments.ratio_estimate(kRevenue, kOfficial, 1.0 / b);
  m.max_events = acc.max_events;
  return m;
}

std::vector<double> empirical_nprime_pmf(StrategyKind kind, const MiningParams& params,
                                         std::uint64_t n_cycles, std::uint64_t seed,
                                         std::uint64_t n_max, unsigned workers) {
  require_catch_up_strategy(kind);
  require_cycles(n_cycles);
  if (n_max > kMaxPmfBins) {
    throw CapacityError(fmt::format("at most {} pmf bins, got {}", kMaxPmfBins, n_max));
  }
  const std::size_t bins = n_max + 2;
  const auto hist = chunked_reduce<Histogram>(n_cycles, workers, [&](Histogram& h,
                                                                      std::uint64_t i) {
    if (h.counts.empty()) h.counts.assign(bins, 0);
    CounterStream stream(seed, i);
    const CycleOutcome c = simulate_cycle(kind, params, stream);
    ++h.counts[std::min<std::uint64_t>(c.n_prime_at_tau, n_max + 1)];
  });
  std::vector<double> freq(bins, 0.0);
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    freq[i] = static_cast<double>(hist.counts[i]) / static_cast<double>(n_cycles);
  }
  return freq;
}

std::vector<MonteCarloEstimate> conditional_revenue_by_nprime(StrategyKind kind,
                                                              const MiningParams& params,
                                                              std::uint64_t n_cycles,
                                                              std::uint64_t seed,
                                                              std::uint64_t n_max,
                                                              unsigned workers) {
  require_catch_up_strategy(kind);
  require_cycles(n_cycles);
  if (n_max > kMaxPmfBins) {
    throw CapacityError(fmt::format("at most {} bins, got {}", kMaxPmfBins, n_max));
  }
  const auto acc = chunked_reduce<ConditionalAccumulator>(
      n_cycles, workers, [&](ConditionalAccumulator& a, std::uint64_t i) {
        if (a.bins.empty()) a.bins.resize(n_max + 1);
        CounterStream stream(seed, i);
        const CycleOutcome c = simulate_cycle(kind, params, stream);
        if (c.n_prime_at_tau <= n_max) {
          a.bins[c.n_prime_at_tau].add({static_cast<double>(c.attacker_blocks_official)});
        }
      });
  std::vector<MonteCarloEstimate> out(n_max + 1);
  for (std::size_t n = 0; n < acc.bins.size(); ++n) out[n] = acc.bins[n].estimate(0);
  return out;
}

PoissonGameEstimate simulate_poisson_game(double alpha, double alpha_prime, std::uint64_t n_runs,
                                          std::uint64_t seed, unsigned workers) {
  if (!(alpha_prime >= 0.0) || !(alpha > alpha_prime)) {
    throw DomainError(fmt::format("Poisson game needs alpha > alpha' >= 0 (got {}, {})", alpha,
                                  alpha_prime));
  }
  require_cycles(n_runs);
  const auto acc = chunked_reduce<MomentAccumulator<2>>(
      n_runs, workers, [&](MomentAccumulator<2>& a, std::uint64_t i) {
        CounterStream stream(seed, i);
        BlockRace<CounterStream> race(alpha, alpha_prime, stream);
        while (race.honest_blocks() != race.attacker_blocks() + 1) race.step();
        a.add({race.now(), static_cast<double>(race.honest_blocks())});
      });
  return {.duration = acc.estimate(0), .honest_blocks = acc.estimate(1)};
}

}  // namespace stubborn
