#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace stubborn {

enum class StrategyKind { Honest, Selfish, LeadStubborn, EqualForkStubborn };

/// Every strategy, in tie-break preference order (least deviant first).
inline constexpr std::array<StrategyKind, 4> kAllStrategies{
    StrategyKind::Honest, StrategyKind::Selfish, StrategyKind::LeadStubborn,
    StrategyKind::EqualForkStubborn};

constexpr std::size_t index_of(StrategyKind kind) { return static_cast<std::size_t>(kind); }

/// "hm", "sm", "lsm", "efsm".
std::string_view short_name(StrategyKind kind);
/// "HM", "SM", "LSM", "EFSM".
std::string_view label(StrategyKind kind);
/// Accepts short names or labels.
std::optional<StrategyKind> parse_strategy(std::string_view text);

/// The attacker's environment.
///
/// q is the attacker's share of total hashrate, gamma the fraction of honest
/// hashrate that mines on the attacker's branch during a tie, block_reward the
/// reward b per block and tau0 the mean network inter-block time. The honest
/// share is p = 1 - q. Attack strategies need 0 < q < 1/2; the honest
/// baseline also accepts q = 0.
class MiningParams {
 public:
  MiningParams(double q, double gamma, double block_reward = 1.0, double tau0 = 1.0);

  static MiningParams honest_baseline(double q, double gamma = 0.0, double block_reward = 1.0,
                                      double tau0 = 1.0);

  double q() const { return q_; }
  double p() const { return 1.0 - q_; }
  double gamma() const { return gamma_; }
  double block_reward() const { return block_reward_; }
  double tau0() const { return tau0_; }

  /// Honest block rate p / tau0.
  double honest_rate() const { return p() / tau0_; }
  /// Attacker block rate q / tau0.
  double attacker_rate() const { return q_ / tau0_; }

  MiningParams with_gamma(double gamma) const;

 private:
  struct Unchecked {};
  MiningParams(Unchecked, double q, double gamma, double block_reward, double tau0);

  double q_;
  double gamma_;
  double block_reward_;
  double tau0_;
};

}  // namespace stubborn
