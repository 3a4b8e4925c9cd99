#include "stubborn/closed_form.hpp"

#include <cmath>

#include <fmt/core.h>

#include "stubborn/catalan.hpp"
#include "stubborn/errors.hpp"

namespace stubborn {
namespace {

void require_attacker(const MiningParams& params) {
  if (!(params.q() > 0.0)) {
    throw DomainError("stubborn strategies need an attacker share q > 0");
  }
}

void check_gamma_zero(const MiningParams& params, GammaZero mode, const char* strategy) {
  if (params.gamma() == 0.0 && mode == GammaZero::Reject) {
    throw DomainError(fmt::format(
        "{} revenue is singular at gamma = 0; use the gamma -> 0 limit mode", strategy));
  }
}

// With s = sqrt(1 - 4x), x = (1 - gamma) pq, so that C(x) = 2 / (1 + s):
//   1 - p C(x) = 4 gamma pq / ((s + p - q)(1 + s))
//   1 - p (1 - gamma) C(x) = gamma (4pq / (s + p - q) + 2p) / (1 + s)
// The gamma factors cancel against the 1 / gamma in front, which keeps small
// gamma accurate and gives the gamma -> 0 limit for free.
double root_term(const MiningParams& params) {
  const double x = (1.0 - params.gamma()) * params.p() * params.q();
  catalan_series(x);  // domain check
  return std::sqrt(1.0 - 4.0 * x);
}

// (1 - gamma) / gamma * (1 - p (1 - gamma) C((1 - gamma) pq)); the LSM loss
// factor, f(gamma) = pq times this. Tends to p / (p - q) as gamma -> 0.
double lsm_loss_factor(const MiningParams& params, GammaZero mode) {
  check_gamma_zero(params, mode, "lead-stubborn");
  const double p = params.p();
  const double q = params.q();
  const double s = root_term(params);
  return (1.0 - params.gamma()) * (4.0 * p * q / (s + p - q) + 2.0 * p) / (1.0 + s);
}

// g(gamma) = (1 - gamma) / gamma * (1 - p C((1 - gamma) pq)); tends to
// q / (p - q) as gamma -> 0.
double efsm_loss_factor(const MiningParams& params, GammaZero mode) {
  check_gamma_zero(params, mode, "equal-fork stubborn");
  const double p = params.p();
  const double q = params.q();
  const double s = root_term(params);
  return (1.0 - params.gamma()) * 4.0 * p * q / ((s + p - q) * (1.0 + s));
}

}  // namespace

StrategyMetrics revenue_ratio_hm(const MiningParams& params) {
  const double q = params.q();
  const double b = params.block_reward();
  const double tau0 = params.tau0();
  return {.revenue_ratio = q * b / tau0,
          .delta = 1.0,
          .apparent_hashrate = q,
          .expected_cycle_duration = tau0,
          .expected_cycle_revenue = q * b};
}

double expected_catch_up_time_lsm(const MiningParams& params) {
  require_attacker(params);
  const double p = params.p();
  const double q = params.q();
  return p / (p - q) * params.tau0();
}

double expected_cycle_duration_lsm(const MiningParams& params) {
  require_attacker(params);
  const double p = params.p();
  const double q = params.q();
  return (p + p * q - q * q) / (p - q) * params.tau0();
}

double expected_revenue_lsm(const MiningParams& params, GammaZero mode) {
  require_attacker(params);
  const double p = params.p();
  const double q = params.q();
  const double b = params.block_reward();
  const double f = p * q * lsm_loss_factor(params, mode);
  return (p / (p - q) + q) * q * b - f * b;
}

double delta_lsm(const MiningParams& params) {
  require_attacker(params);
  const double p = params.p();
  const double q = params.q();
  return (p + p * q - q * q) / (p + p * q - q);
}

double expected_nprime_lsm(const MiningParams& params) {
  require_attacker(params);
  const double p = params.p();
  const double q = params.q();
  return p * q / (p - q);
}

double expected_official_blocks_lsm(const MiningParams& params) {
  return expected_cycle_duration_lsm(params) / (2.0 * params.tau0()) + 0.5;
}

StrategyMetrics revenue_ratio_lsm(const MiningParams& params, GammaZero mode) {
  require_attacker(params);
  const double p = params.p();
  const double q = params.q();
  const double b = params.block_reward();
  const double tau0 = params.tau0();
  const double loss = lsm_loss_factor(params, mode);
  const double delta = delta_lsm(params);

  StrategyMetrics m;
  m.revenue_ratio = (q - p * q * (p - q) * loss / (p + q * (p - q))) * b / tau0;
  m.delta = delta;
  m.apparent_hashrate = q * delta - p * q * (p - q) * loss / (p + p * q - q);
  m.expected_cycle_duration = expected_cycle_duration_lsm(params);
  m.expected_cycle_revenue = expected_revenue_lsm(params, mode);
  return m;
}

double expected_cycle_duration_efsm(const MiningParams& params) {
  require_attacker(params);
  return params.tau0() / (params.p() - params.q());
}

double expected_revenue_efsm(const MiningParams& params, GammaZero mode) {
  require_attacker(params);
  const double p = params.p();
  const double q = params.q();
  const double b = params.block_reward();
  return q / (p - q) * b - efsm_loss_factor(params, mode) * b;
}

double delta_efsm(const MiningParams& params) {
  require_attacker(params);
  return 1.0 / params.p();
}

double expected_nprime_efsm(const MiningParams& params) {
  require_attacker(params);
  return params.q() / (params.p() - params.q());
}

double expected_official_blocks_efsm(const MiningParams& params) {
  require_attacker(params);
  return params.p() / (params.p() - params.q());
}

StrategyMetrics revenue_ratio_efsm(const MiningParams& params, GammaZero mode) {
  require_attacker(params);
  const double p = params.p();
  const double q = params.q();
  const double b = params.block_reward();
  const double tau0 = params.tau0();
  const double g = efsm_loss_factor(params, mode);

  StrategyMetrics m;
  m.revenue_ratio = (q - (p - q) * g) * b / tau0;
  m.delta = delta_efsm(params);
  m.apparent_hashrate = q / p - (p - q) * g / p;
  m.expected_cycle_duration = expected_cycle_duration_efsm(params);
  m.expected_cycle_revenue = expected_revenue_efsm(params, mode);
  return m;
}

std::optional<StrategyMetrics> analytic_metrics(StrategyKind kind, const MiningParams& params,
                                                GammaZero mode) {
  switch (kind) {
    case StrategyKind::Honest: return revenue_ratio_hm(params);
    case StrategyKind::Selfish: return std::nullopt;
    case StrategyKind::LeadStubborn: return revenue_ratio_lsm(params, mode);
    case StrategyKind::EqualForkStubborn: return revenue_ratio_efsm(params, mode);
  }
  return std::nullopt;
}

double biased_coin_expected_max_index(std::uint64_t n, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw DomainError(fmt::format("coin bias must lie in [0, 1], got {}", gamma));
  }
  if (gamma == 0.0) return 0.0;
  const double tosses = static_cast<double>(n) + 1.0;
  return tosses - (1.0 - std::pow(1.0 - gamma, tosses)) / gamma;
}

PoissonGameExpectations poisson_game_expectations(double alpha, double alpha_prime) {
  if (!(alpha_prime >= 0.0) || !(alpha > alpha_prime) || !std::isfinite(alpha)) {
    throw DomainError(fmt::format(
        "Poisson game needs alpha > alpha' >= 0 (got alpha = {}, alpha' = {})", alpha,
        alpha_prime));
  }
  return {.duration = 1.0 / (alpha - alpha_prime),
          .honest_blocks = alpha / (alpha - alpha_prime)};
}

}  // namespace stubborn
