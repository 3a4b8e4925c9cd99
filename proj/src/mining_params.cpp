#include "stubborn/mining_params.hpp"

#include <cmath>

#include <fmt/core.h>

#include "stubborn/errors.hpp"

namespace stubborn {

std::string_view short_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Honest: return "hm";
    case StrategyKind::Selfish: return "sm";
    case StrategyKind::LeadStubborn: return "lsm";
    case StrategyKind::EqualForkStubborn: return "efsm";
  }
  return "?";
}

std::string_view label(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Honest: return "HM";
    case StrategyKind::Selfish: return "SM";
    case StrategyKind::LeadStubborn: return "LSM";
    case StrategyKind::EqualForkStubborn: return "EFSM";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view text) {
  for (StrategyKind kind : kAllStrategies) {
    if (text == short_name(kind) || text == label(kind)) return kind;
  }
  return std::nullopt;
}

namespace {

void check_common(double gamma, double block_reward, double tau0) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw DomainError(fmt::format("gamma must lie in [0, 1], got {}", gamma));
  }
  if (!(block_reward > 0.0) || !std::isfinite(block_reward)) {
    throw DomainError(fmt::format("block reward must be positive, got {}", block_reward));
  }
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) {
    throw DomainError(fmt::format("tau0 must be positive, got {}", tau0));
  }
}

}  // namespace

MiningParams::MiningParams(double q, double gamma, double block_reward, double tau0)
    : MiningParams(Unchecked{}, q, gamma, block_reward, tau0) {
  if (!(q > 0.0 && q < 0.5)) {
    throw DomainError(fmt::format("attacker share q must lie in (0, 1/2), got {}", q));
  }
  check_common(gamma, block_reward, tau0);
}

MiningParams::MiningParams(Unchecked, double q, double gamma, double block_reward, double tau0)
    : q_(q), gamma_(gamma), block_reward_(block_reward), tau0_(tau0) {}

MiningParams MiningParams::honest_baseline(double q, double gamma, double block_reward,
                                           double tau0) {
  if (!(q >= 0.0 && q < 0.5)) {
    throw DomainError(fmt::format("attacker share q must lie in [0, 1/2), got {}", q));
  }
  check_common(gamma, block_reward, tau0);
  return MiningParams(Unchecked{}, q, gamma, block_reward, tau0);
}

MiningParams MiningParams::with_gamma(double gamma) const {
  check_common(gamma, block_reward_, tau0_);
  return MiningParams(Unchecked{}, q_, gamma, block_reward_, tau0_);
}

}  // namespace stubborn
