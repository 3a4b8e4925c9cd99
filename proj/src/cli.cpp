#include "stubborn/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "stubborn/errors.hpp"
#include "stubborn/race_sim.hpp"
#include "stubborn/random.hpp"

namespace stubborn::cli {
namespace {

constexpr const char* kGlossary = R"(Parameters:
  q      (--q)             attacker's share of total hashrate, 0 < q < 1/2
  gamma  (--gamma)         fraction of honest hashrate mining on the attacker's
                           branch during a tie, 0 <= gamma <= 1
  b      (--block-reward)  reward per block (default 1)
  tau0   (--tau0)          mean network inter-block time (default 1)

With b = tau0 = 1, revenue ratios read directly as apparent hashrates.
Exit codes: 0 ok, 2 invalid arguments, 3 validation failed, 4 I/O error.
Environment: STUBBORN_LAB_THREADS caps worker threads (0 = all cores).)";

std::string num(double x) { return fmt::format("{:.9g}", x); }

struct StrategyArgs {
  std::string strategy;
  double q = 0.0;
  std::optional<double> gamma;
  double block_reward = 1.0;
  double tau0 = 1.0;
  bool gamma_limit = false;
};

void add_strategy_options(CLI::App* cmd, StrategyArgs& a) {
  cmd->add_option("--strategy", a.strategy, "hm, sm, lsm or efsm")
      ->required()
      ->check(CLI::IsMember({"hm", "sm", "lsm", "efsm"}, CLI::ignore_case));
  cmd->add_option("--q", a.q, "attacker hashrate share q")->required();
  cmd->add_option("--gamma", a.gamma, "tie connectivity gamma (required except for hm)");
  cmd->add_option("--block-reward", a.block_reward, "block reward b")->capture_default_str();
  cmd->add_option("--tau0", a.tau0, "mean inter-block time tau0")->capture_default_str();
}

void add_limit_flag(CLI::App* cmd, StrategyArgs& a) {
  cmd->add_flag("--gamma-limit", a.gamma_limit,
                "at gamma = 0 use the gamma -> 0 limit of the stubborn formulas instead of "
                "rejecting the singular point");
}

std::pair<StrategyKind, MiningParams> build_params(const StrategyArgs& a) {
  const StrategyKind kind = *parse_strategy(a.strategy);
  if (kind == StrategyKind::Honest) {
    return {kind, MiningParams::honest_baseline(a.q, a.gamma.value_or(0.0), a.block_reward,
                                                a.tau0)};
  }
  if (!a.gamma) {
    throw DomainError(fmt::format("--gamma is required for strategy {}", a.strategy));
  }
  return {kind, MiningParams(a.q, *a.gamma, a.block_reward, a.tau0)};
}

void print_params(std::ostream& out, StrategyKind kind, const MiningParams& params) {
  out << "strategy=" << short_name(kind) << '\n'
      << "q=" << num(params.q()) << '\n'
      << "gamma=" << num(params.gamma()) << '\n'
      << "block_reward=" << num(params.block_reward()) << '\n'
      << "tau0=" << num(params.tau0()) << '\n';
}

void print_estimate(std::ostream& out, std::string_view name, const MonteCarloEstimate& e) {
  out << name << '=' << num(e.mean) << " std_error=" << num(e.std_error) << '\n';
}

int run_eval(const EvalCommand& cmd, std::ostream& out) {
  const auto metrics = analytic_metrics(cmd.kind, cmd.params, cmd.gamma_zero);
  if (!metrics) {
    throw DomainError("selfish mining has no closed form here; use `simulate --strategy sm`");
  }
  print_params(out, cmd.kind, cmd.params);
  out << "revenue_ratio=" << num(metrics->revenue_ratio) << '\n'
      << "delta=" << num(metrics->delta) << '\n'
      << "q_tilde=" << num(metrics->apparent_hashrate) << '\n'
      << "expected_cycle_duration=" << num(metrics->expected_cycle_duration) << '\n'
      << "expected_cycle_revenue=" << num(metrics->expected_cycle_revenue) << '\n';
  return kExitOk;
}

int run_simulate(const SimulateCommand& cmd, std::ostream& out, const RunOptions& options) {
  const SimulatedMetrics m =
      run_monte_carlo(cmd.kind, cmd.params, cmd.n_cycles, cmd.seed, options.workers);
  print_params(out, cmd.kind, cmd.params);
  out << "cycles=" << cmd.n_cycles << '\n' << "seed=" << cmd.seed << '\n';
  print_estimate(out, "expected_cycle_duration", m.duration);
  print_estimate(out, "expected_cycle_revenue", m.revenue);
  print_estimate(out, "expected_official_blocks", m.official_blocks);
  print_estimate(out, "expected_n_prime", m.n_prime);
  print_estimate(out, "revenue_ratio", m.revenue_ratio);
  print_estimate(out, "delta", m.delta);
  print_estimate(out, "q_tilde", m.apparent_hashrate);
  out << "max_events_per_cycle=" << m.max_events << '\n';
  return kExitOk;
}

struct Expectations {
  double duration;
  double revenue;
  double official;
  double n_prime;
  StrategyMetrics metrics;
};

std::optional<Expectations> expectations_for(StrategyKind kind, const MiningParams& params,
                                             GammaZero mode) {
  switch (kind) {
    case StrategyKind::Honest: {
      const StrategyMetrics m = revenue_ratio_hm(params);
      return Expectations{m.expected_cycle_duration, m.expected_cycle_revenue, 1.0, params.q(),
                          m};
    }
    case StrategyKind::Selfish: return std::nullopt;
    case StrategyKind::LeadStubborn: {
      const StrategyMetrics m = revenue_ratio_lsm(params, mode);
      return Expectations{m.expected_cycle_duration, m.expected_cycle_revenue,
                          expected_official_blocks_lsm(params), expected_nprime_lsm(params), m};
    }
    case StrategyKind::EqualForkStubborn: {
      const StrategyMetrics m = revenue_ratio_efsm(params, mode);
      return Expectations{m.expected_cycle_duration, m.expected_cycle_revenue,
                          expected_official_blocks_efsm(params), expected_nprime_efsm(params),
                          m};
    }
  }
  return std::nullopt;
}

int run_validate(const ValidateCommand& cmd, std::ostream& out, const RunOptions& options) {
  // Closed forms first, so a domain error surfaces before the simulation runs.
  const auto expected = expectations_for(cmd.kind, cmd.params, cmd.gamma_zero);
  const SimulatedMetrics m =
      run_monte_carlo(cmd.kind, cmd.params, cmd.n_cycles, cmd.seed, options.workers);
  print_params(out, cmd.kind, cmd.params);
  out << "cycles=" << cmd.n_cycles << '\n'
      << "seed=" << cmd.seed << '\n'
      << "sigmas=" << num(cmd.sigmas) << '\n';

  const std::vector<std::pair<std::string_view, const MonteCarloEstimate*>> rows{
      {"expected_cycle_duration", &m.duration},  {"expected_cycle_revenue", &m.revenue},
      {"expected_official_blocks", &m.official_blocks}, {"expected_n_prime", &m.n_prime},
      {"revenue_ratio", &m.revenue_ratio},       {"delta", &m.delta},
      {"q_tilde", &m.apparent_hashrate}};

  if (!expected) {
    for (const auto& [name, est] : rows) {
      out << "check " << name << " simulated=" << num(est->mean)
          << " std_error=" << num(est->std_error) << " expected=n/a skipped\n";
    }
    out << "result=reported (no closed form for " << short_name(cmd.kind) << ")\n";
    return kExitOk;
  }

  const std::array<double, 7> targets{expected->duration,
                                      expected->revenue,
                                      expected->official,
                                      expected->n_prime,
                                      expected->metrics.revenue_ratio,
                                      expected->metrics.delta,
                                      expected->metrics.apparent_hashrate};
  bool all_ok = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const MonteCarloEstimate& est = *rows[k].second;
    const double z = est.z_score(targets[k]);
    bool ok = std::abs(z) <= cmd.sigmas;
    if (est.std_error == 0.0) {
      ok = std::abs(est.mean - targets[k]) <= 1e-12 * std::max(1.0, std::abs(targets[k]));
    }
    all_ok = all_ok && ok;
    out << "check " << rows[k].first << " simulated=" << num(est.mean)
        << " std_error=" << num(est.std_error) << " expected=" << num(targets[k])
        << " z=" << fmt::format("{:.3f}", std::isfinite(z) ? z : 0.0) << (ok ? " ok" : " FAIL")
        << '\n';
  }
  out << "result=" << (all_ok ? "pass" : "fail") << '\n';
  return all_ok ? kExitOk : kExitValidationFailed;
}

int run_dist(const DistCommand& cmd, std::ostream& out, const RunOptions& options) {
  const CatalanDistribution dist(cmd.p, cmd.kind);
  const bool first = cmd.kind == CatalanKind::FirstType;
  const StrategyKind race = first ? StrategyKind::EqualForkStubborn : StrategyKind::LeadStubborn;
  const MiningParams params(1.0 - cmd.p, 1.0);
  const std::vector<double> race_freq =
      empirical_nprime_pmf(race, params, cmd.n_cycles, cmd.seed, cmd.n_max, options.workers);

  std::vector<std::uint64_t> sampled(cmd.n_max + 2, 0);
  const std::uint64_t sample_seed = derive_seed(cmd.seed, 1);
  for (std::uint64_t i = 0; i < cmd.n_cycles; ++i) {
    CounterStream stream(sample_seed, i);
    ++sampled[std::min(dist.sample(stream), cmd.n_max + 1)];
  }

  const std::vector<double> pmf = dist.pmf_table(cmd.n_max);
  double tail = 1.0;
  for (double v : pmf) tail -= v;
  const double n = static_cast<double>(cmd.n_cycles);
  auto se = [n](double f) { return std::sqrt(f * (1.0 - f) / n); };

  out << "kind=" << (first ? "first" : "second") << '\n'
      << "p=" << num(cmd.p) << '\n'
      << "race=" << short_name(race) << '\n'
      << "cycles=" << cmd.n_cycles << '\n'
      << "seed=" << cmd.seed << '\n'
      << "mean=" << num(dist.mean()) << '\n'
      << "n,pmf,race_freq,race_std_error,sampled_freq\n";
  for (std::uint64_t k = 0; k <= cmd.n_max + 1; ++k) {
    const double f_race = race_freq[k];
    const double f_sampled = static_cast<double>(sampled[k]) / n;
    const std::string bin = k <= cmd.n_max ? std::to_string(k) : ">" + std::to_string(cmd.n_max);
    const double p_k = k <= cmd.n_max ? pmf[k] : std::max(tail, 0.0);
    out << bin << ',' << num(p_k) << ',' << num(f_race) << ',' << num(se(f_race)) << ','
        << num(f_sampled) << '\n';
  }
  return kExitOk;
}

int run_map(const MapCommand& cmd, std::ostream& out, const RunOptions& options) {
  const RegionMap map = compute_map(cmd.grid, cmd.sm, options.workers);
  std::ofstream file(cmd.output, std::ios::binary);
  if (!file) throw IoError("cannot open " + cmd.output + " for writing");
  emit_map(map, cmd.format, file);
  file.close();
  if (!file) throw IoError("failed to write " + cmd.output);

  const auto counts = map.region_counts();
  out << "output=" << cmd.output << '\n'
      << "format=" << (cmd.format == MapFormat::Csv ? "csv" : "ppm") << '\n'
      << "grid=" << cmd.grid.q_steps << 'x' << cmd.grid.gamma_steps << '\n'
      << map.sm_source << '\n'
      << "cells=" << map.cells.size() << '\n';
  for (StrategyKind kind : kAllStrategies) {
    out << "region_" << short_name(kind) << '=' << counts[index_of(kind)] << '\n';
  }
  const auto violations = monotone_frontier_violations(map);
  out << "frontier_violations=" << violations.size() << '\n';
  for (const auto& v : violations) {
    out << "frontier_violation gamma=" << num(map.grid.gamma_at(v.gamma_index))
        << " q=" << num(map.grid.q_at(v.q_index)) << '\n';
  }
  return kExitOk;
}

SmTable load_sm_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open SM table " + path);
  const RegionMap prior = read_map_csv(in);
  SmTable table;
  table.scores.reserve(prior.cells.size());
  for (const auto& cell : prior.cells) {
    table.scores.push_back(cell.scores[index_of(StrategyKind::Selfish)]);
  }
  return table;
}

}  // namespace

ParseOutcome parse(const std::vector<std::string>& args) {
  CLI::App app{"Profitability laboratory for selfish and stubborn Bitcoin mining strategies",
               "stubborn_lab"};
  app.footer(kGlossary);
  app.require_subcommand(1);

  StrategyArgs eval_args;
  auto* eval = app.add_subcommand("eval", "closed-form revenue ratio, delta and apparent hashrate");
  add_strategy_options(eval, eval_args);
  add_limit_flag(eval, eval_args);

  StrategyArgs sim_args;
  std::uint64_t sim_cycles = 1'000'000;
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates of cycle statistics");
  add_strategy_options(simulate, sim_args);
  simulate->add_option("--cycles", sim_cycles, "attack cycles to simulate")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "64-bit seed")->capture_default_str();

  StrategyArgs val_args;
  std::uint64_t val_cycles = 1'000'000;
  std::uint64_t val_seed = 1;
  double sigmas = 4.0;
  auto* validate =
      app.add_subcommand("validate", "compare Monte Carlo estimates with the closed forms");
  add_strategy_options(validate, val_args);
  add_limit_flag(validate, val_args);
  validate->add_option("--cycles", val_cycles, "attack cycles to simulate")->capture_default_str();
  validate->add_option("--seed", val_seed, "64-bit seed")->capture_default_str();
  validate->add_option("--sigmas", sigmas, "tolerance in standard errors")->capture_default_str();

  std::string dist_kind;
  double dist_p = 0.0;
  std::uint64_t dist_n_max = 10;
  std::uint64_t dist_cycles = 1'000'000;
  std::uint64_t dist_seed = 1;
  auto* dist = app.add_subcommand(
      "dist", "(p,q)-Catalan pmf next to empirical race and inverse-CDF frequencies");
  dist->add_option("--kind", dist_kind, "first or second")
      ->required()
      ->check(CLI::IsMember({"first", "second"}));
  dist->add_option("--p", dist_p, "honest share p, 1/2 < p < 1")->required();
  dist->add_option("--n-max", dist_n_max, "last tabulated bin (at most 20)")
      ->capture_default_str();
  dist->add_option("--cycles", dist_cycles, "races and samples to draw")->capture_default_str();
  dist->add_option("--seed", dist_seed, "64-bit seed")->capture_default_str();

  GridSpec grid;
  std::string sm_mode = "skip";
  std::uint64_t sm_cycles = 100'000;
  std::uint64_t map_seed = 1;
  std::string sm_table;
  std::string format = "csv";
  std::string output;
  auto* map = app.add_subcommand("map", "best strategy over the (q, gamma) plane");
  map->add_option("--q-min", grid.q_min, "smallest q (clamped to 1e-6)")->capture_default_str();
  map->add_option("--q-max", grid.q_max, "largest q (clamped to 0.5 - 1e-6)")
      ->capture_default_str();
  map->add_option("--q-steps", grid.q_steps, "grid columns")->capture_default_str();
  map->add_option("--gamma-min", grid.gamma_min, "smallest gamma")->capture_default_str();
  map->add_option("--gamma-max", grid.gamma_max, "largest gamma")->capture_default_str();
  map->add_option("--gamma-steps", grid.gamma_steps, "grid rows")->capture_default_str();
  map->add_option("--sm", sm_mode, "skip (SM scored 0) or simulate")
      ->check(CLI::IsMember({"skip", "simulate"}))
      ->capture_default_str();
  map->add_option("--sm-cycles", sm_cycles, "SM cycles per cell")->capture_default_str();
  map->add_option("--sm-table", sm_table,
                  "reuse SM scores from a CSV map written earlier on the same grid");
  map->add_option("--seed", map_seed, "64-bit seed")->capture_default_str();
  map->add_option("--format", format, "csv or ppm")
      ->check(CLI::IsMember({"csv", "ppm"}))
      ->capture_default_str();
  map->add_option("--output", output, "output file")->required();

  ParseOutcome outcome;
  std::vector<const char*> argv{"stubborn_lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    std::ostringstream error;
    const int code = app.exit(e, help, error);
    outcome.help = help.str();
    outcome.error = error.str();
    outcome.exit_code = code == 0 ? kExitOk : kExitUsage;
    return outcome;
  }
  try {
    if (eval->parsed()) {
      auto [kind, params] = build_params(eval_args);
      outcome.command = EvalCommand{kind, params,
                                    eval_args.gamma_limit ? GammaZero::Limit : GammaZero::Reject};
    } else if (simulate->parsed()) {
      auto [kind, params] = build_params(sim_args);
      if (sim_cycles < kMinMonteCarloCycles) {
        throw DomainError(fmt::format("--cycles must be at least {}", kMinMonteCarloCycles));
      }
      outcome.command = SimulateCommand{kind, params, sim_cycles, sim_seed};
    } else if (validate->parsed()) {
      auto [kind, params] = build_params(val_args);
      if (val_cycles < kMinMonteCarloCycles) {
        throw DomainError(fmt::format("--cycles must be at least {}", kMinMonteCarloCycles));
      }
      if (!(sigmas > 0.0)) throw DomainError("--sigmas must be positive");
      outcome.command =
          ValidateCommand{kind,       params, val_cycles, val_seed, sigmas,
                          val_args.gamma_limit ? GammaZero::Limit : GammaZero::Reject};
    } else if (dist->parsed()) {
      const CatalanKind kind = dist_kind == "first" ? CatalanKind::FirstType
                                                    : CatalanKind::SecondType;
      CatalanDistribution check(dist_p, kind);
      if (dist_n_max > kMaxPmfBins) {
        throw DomainError(fmt::format("--n-max must be at most {}", kMaxPmfBins));
      }
      if (dist_cycles < kMinMonteCarloCycles) {
        throw DomainError(fmt::format("--cycles must be at least {}", kMinMonteCarloCycles));
      }
      outcome.command = DistCommand{kind, dist_p, dist_n_max, dist_cycles, dist_seed};
    } else if (map->parsed()) {
      grid.validate();
      SmMode mode = SmSkip{};
      if (!sm_table.empty()) {
        if (sm_mode == "simulate") {
          throw DomainError("--sm simulate and --sm-table are mutually exclusive");
        }
        mode = SmTable{};
      } else if (sm_mode == "simulate") {
        if (sm_cycles < kMinMonteCarloCycles) {
          throw DomainError(fmt::format("--sm-cycles must be at least {}", kMinMonteCarloCycles));
        }
        mode = SmSimulate{sm_cycles, map_seed};
      }
      MapCommand command{grid, mode, format == "csv" ? MapFormat::Csv : MapFormat::Ppm, output};
      if (!sm_table.empty()) {
        try {
          command.sm = load_sm_table(sm_table);
        } catch (const IoError& e) {
          outcome.exit_code = kExitIo;
          outcome.error = fmt::format("error: {}\n", e.what());
          return outcome;
        }
      }
      outcome.command = std::move(command);
    }
  } catch (const std::exception& e) {
    outcome.command.reset();
    outcome.exit_code = kExitUsage;
    outcome.error = fmt::format("error: {}\n", e.what());
  }
  return outcome;
}

int run(const Command& command, std::ostream& out, const RunOptions& options) {
  return std::visit(
      [&](const auto& cmd) -> int {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, EvalCommand>) {
          return run_eval(cmd, out);
        } else if constexpr (std::is_same_v<T, SimulateCommand>) {
          return run_simulate(cmd, out, options);
        } else if constexpr (std::is_same_v<T, ValidateCommand>) {
          return run_validate(cmd, out, options);
        } else if constexpr (std::is_same_v<T, DistCommand>) {
          return run_dist(cmd, out, options);
        } else {
          return run_map(cmd, out, options);
        }
      },
      command);
}

unsigned workers_from_environment() {
  const char* value = std::getenv("STUBBORN_LAB_THREADS");
  if (value == nullptr || *value == '\0') return 0;
  char* end = nullptr;
  const unsigned long n = std::strtoul(value, &end, 10);
  if (*end != '\0') return 0;
  return static_cast<unsigned>(n);
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const ParseOutcome parsed = parse(args);
  if (!parsed.command) {
    if (!parsed.help.empty()) out << parsed.help;
    if (!parsed.error.empty()) err << parsed.error;
    return parsed.exit_code;
  }
  try {
    return run(*parsed.command, out, RunOptions{workers_from_environment()});
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace stubborn::cli
