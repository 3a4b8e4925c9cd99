#include "stubborn/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <limits>

#include <fmt/core.h>

#include "stubborn/closed_form.hpp"
#include "stubborn/errors.hpp"
#include "stubborn/parallel.hpp"
#include "stubborn/race_sim.hpp"
#include "stubborn/random.hpp"

namespace stubborn {
namespace {

constexpr const char* kCsvHeader = "q,gamma,best,score_hm,score_sm,score_lsm,score_efsm";

double axis_value(double lo, double hi, std::size_t steps, std::size_t k) {
  if (steps == 1) return lo;
  if (k + 1 == steps) return hi;
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

void check_axis(const char* name, double lo, double hi, std::size_t steps) {
  if (steps == 0) throw DomainError(fmt::format("{} axis needs at least one step", name));
  if (steps == 1 ? lo != hi : !(lo < hi)) {
    throw DomainError(fmt::format(
        "{} axis bounds must be increasing (or equal for a single step), got [{}, {}]", name,
        lo, hi));
  }
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DomainError(fmt::format("malformed number '{}' in map CSV", text));
  }
  return value;
}

std::size_t parse_size(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DomainError(fmt::format("malformed integer '{}' in map CSV", text));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void check_stream(const std::ostream& out) {
  if (!out) throw IoError("failed to write region map");
}

}  // namespace

void GridSpec::validate() const {
  check_axis("q", q_min, q_max, q_steps);
  check_axis("gamma", gamma_min, gamma_max, gamma_steps);
  if (q_min < 0.0 || q_max > 0.5) {
    throw DomainError(fmt::format("q range must lie in [0, 1/2], got [{}, {}]", q_min, q_max));
  }
  if (gamma_min < 0.0 || gamma_max > 1.0) {
    throw DomainError(
        fmt::format("gamma range must lie in [0, 1], got [{}, {}]", gamma_min, gamma_max));
  }
}

double GridSpec::q_at(std::size_t i) const {
  return std::clamp(axis_value(q_min, q_max, q_steps, i), kGridQFloor, kGridQCeiling);
}

double GridSpec::gamma_at(std::size_t j) const {
  return axis_value(gamma_min, gamma_max, gamma_steps, j);
}

CellClassification classify_cell(const MiningParams& params, double sm_score) {
  CellClassification cell;
  cell.scores[index_of(StrategyKind::Honest)] = params.q();
  cell.scores[index_of(StrategyKind::Selfish)] = sm_score;
  cell.scores[index_of(StrategyKind::LeadStubborn)] =
      revenue_ratio_lsm(params, GammaZero::Limit).apparent_hashrate;
  cell.scores[index_of(StrategyKind::EqualForkStubborn)] =
      revenue_ratio_efsm(params, GammaZero::Limit).apparent_hashrate;
  cell.best = StrategyKind::Honest;
  for (StrategyKind kind : kAllStrategies) {
    if (cell.scores[index_of(kind)] > cell.scores[index_of(cell.best)]) cell.best = kind;
  }
  return cell;
}

std::array<std::size_t, 4> RegionMap::region_counts() const {
  std::array<std::size_t, 4> counts{};
  for (const auto& cell : cells) ++counts[index_of(cell.best)];
  return counts;
}

RegionMap compute_map(const GridSpec& grid, const SmMode& sm_mode, unsigned workers) {
  grid.validate();
  RegionMap map;
  map.grid = grid;
  map.cells.resize(grid.cell_count());

  if (const auto* table = std::get_if<SmTable>(&sm_mode)) {
    if (table->scores.size() != grid.cell_count() ||
        (!table->std_errors.empty() && table->std_errors.size() != grid.cell_count())) {
      throw DomainError(fmt::format("SM table has {} entries for a grid of {} cells",
                                    table->scores.size(), grid.cell_count()));
    }
  }
  map.sm_source = std::visit(
      [](const auto& mode) -> std::string {
        using T = std::decay_t<decltype(mode)>;
        if constexpr (std::is_same_v<T, SmSkip>) {
          return "sm=skip";
        } else if constexpr (std::is_same_v<T, SmSimulate>) {
          return fmt::format("sm=simulate cycles={} seed={}", mode.n_cycles, mode.seed);
        } else {
          return "sm=table";
        }
      },
      sm_mode);

  parallel_for(grid.cell_count(), workers, [&](std::uint64_t c) {
    const std::size_t i = c % grid.q_steps;
    const std::size_t j = c / grid.q_steps;
    const MiningParams params(grid.q_at(i), grid.gamma_at(j));
    double sm_score = 0.0;
    double sm_error = 0.0;
    if (const auto* sim = std::get_if<SmSimulate>(&sm_mode)) {
      if (params.p() - params.q() < kSmMinSimulatedGap) {
        map.cells[c] = classify_cell(params, std::numeric_limits<double>::quiet_NaN());
        return;
      }
      const SimulatedMetrics m = run_monte_carlo(StrategyKind::Selfish, params, sim->n_cycles,
                                                 derive_seed(sim->seed, c), 1);
      sm_score = m.apparent_hashrate.mean;
      sm_error = m.apparent_hashrate.std_error;
    } else if (const auto* table = std::get_if<SmTable>(&sm_mode)) {
      sm_score = table->scores[c];
      sm_error = table->std_errors.empty() ? 0.0 : table->std_errors[c];
    }
    map.cells[c] = classify_cell(params, sm_score);
    map.cells[c].sm_std_error = sm_error;
  });
  return map;
}

void write_csv(const RegionMap& map, std::ostream& out) {
  const GridSpec& g = map.grid;
  out << "# stubborn-lab region map\n";
  out << fmt::format("# grid q_min={:.17g} q_max={:.17g} q_steps={} gamma_min={:.17g} "
                     "gamma_max={:.17g} gamma_steps={}\n",
                     g.q_min, g.q_max, g.q_steps, g.gamma_min, g.gamma_max, g.gamma_steps);
  out << fmt::format("# q_clamp={:.9g},{:.9g}\n", kGridQFloor, kGridQCeiling);
  out << "# " << map.sm_source << '\n';
  double max_err = 0.0;
  double sum_err = 0.0;
  std::size_t unavailable = 0;
  for (const auto& cell : map.cells) {
    if (std::isnan(cell.scores[index_of(StrategyKind::Selfish)])) ++unavailable;
    max_err = std::max(max_err, cell.sm_std_error);
    sum_err += cell.sm_std_error;
  }
  const double mean_err = map.cells.empty() ? 0.0 : sum_err / static_cast<double>(map.cells.size());
  out << fmt::format("# sm_std_error_max={:.9g} sm_std_error_mean={:.9g}\n", max_err, mean_err);
  if (unavailable > 0) out << fmt::format("# sm_unavailable_cells={}\n", unavailable);
  out << kCsvHeader << '\n';
  for (std::size_t j = 0; j < g.gamma_steps; ++j) {
    for (std::size_t i = 0; i < g.q_steps; ++i) {
      const CellClassification& cell = map.at(i, j);
      out << fmt::format("{:.9g},{:.9g},{},{:.9g},{:.9g},{:.9g},{:.9g}\n", g.q_at(i),
                         g.gamma_at(j), label(cell.best), cell.scores[0], cell.scores[1],
                         cell.scores[2], cell.scores[3]);
    }
  }
  check_stream(out);
}

std::array<unsigned char, 3> region_color(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Honest: return {255, 255, 255};
    case StrategyKind::Selfish: return {0, 0, 255};
    case StrategyKind::LeadStubborn: return {0, 255, 0};
    case StrategyKind::EqualForkStubborn: return {255, 0, 0};
  }
  return {0, 0, 0};
}

void write_ppm(const RegionMap& map, std::ostream& out) {
  const GridSpec& g = map.grid;
  out << "P6\n" << g.q_steps << ' ' << g.gamma_steps << "\n255\n";
  std::string row(3 * g.q_steps, '\0');
  for (std::size_t r = 0; r < g.gamma_steps; ++r) {
    const std::size_t j = g.gamma_steps - 1 - r;
    for (std::size_t i = 0; i < g.q_steps; ++i) {
      const auto rgb = region_color(map.at(i, j).best);
      for (std::size_t k = 0; k < 3; ++k) row[3 * i + k] = static_cast<char>(rgb[k]);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  check_stream(out);
}

void emit_map(const RegionMap& map, MapFormat format, std::ostream& out) {
  if (format == MapFormat::Csv) {
    write_csv(map, out);
  } else {
    write_ppm(map, out);
  }
}

RegionMap read_map_csv(std::istream& in) {
  RegionMap map;
  bool have_grid = false;
  bool have_header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string_view body = std::string_view(line).substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      if (body.starts_with("grid ")) {
        for (std::string_view kv : split(body.substr(5), ' ')) {
          const auto eq = kv.find('=');
          if (eq == std::string_view::npos) continue;
          const std::string_view key = kv.substr(0, eq);
          const std::string_view value = kv.substr(eq + 1);
          if (key == "q_min") map.grid.q_min = parse_double(value);
          else if (key == "q_max") map.grid.q_max = parse_double(value);
          else if (key == "q_steps") map.grid.q_steps = parse_size(value);
          else if (key == "gamma_min") map.grid.gamma_min = parse_double(value);
          else if (key == "gamma_max") map.grid.gamma_max = parse_double(value);
          else if (key == "gamma_steps") map.grid.gamma_steps = parse_size(value);
        }
        map.grid.validate();
        have_grid = true;
      } else if (body.starts_with("sm=")) {
        map.sm_source = std::string(body);
      }
      continue;
    }
    if (!have_header) {
      if (line != kCsvHeader) throw DomainError("map CSV header mismatch: " + line);
      have_header = true;
      continue;
    }
    if (!have_grid) throw DomainError("map CSV is missing its '# grid' metadata line");
    const auto fields = split(line, ',');
    if (fields.size() != 7) throw DomainError("map CSV row needs 7 fields: " + line);
    CellClassification cell;
    const auto best = parse_strategy(fields[2]);
    if (!best) throw DomainError(fmt::format("unknown strategy '{}' in map CSV", fields[2]));
    cell.best = *best;
    for (std::size_t k = 0; k < 4; ++k) cell.scores[k] = parse_double(fields[3 + k]);
    map.cells.push_back(cell);
  }
  if (!have_grid || !have_header) throw DomainError("map CSV is incomplete");
  if (map.cells.size() != map.grid.cell_count()) {
    throw DomainError(fmt::format("map CSV has {} rows for a grid of {} cells", map.cells.size(),
                                  map.grid.cell_count()));
  }
  return map;
}

std::vector<FrontierViolation> monotone_frontier_violations(const RegionMap& map) {
  std::vector<FrontierViolation> found;
  for (std::size_t j = 0; j < map.grid.gamma_steps; ++j) {
    bool deviant_seen = false;
    for (std::size_t i = 0; i < map.grid.q_steps; ++i) {
      const bool honest = map.at(i, j).best == StrategyKind::Honest;
      if (!honest) {
        deviant_seen = true;
      } else if (deviant_seen) {
        found.push_back({j, i});
      }
    }
  }
  return found;
}

bool row_follows_strategy_order(const RegionMap& map, std::size_t gamma_index) {
  std::size_t rank = 0;
  for (std::size_t i = 0; i < map.grid.q_steps; ++i) {
    const std::size_t r = index_of(map.at(i, gamma_index).best);
    if (r < rank) return false;
    rank = r;
  }
  return true;
}

unsigned plausible_winners(const CellClassification& cell, double sigmas) {
  const std::size_t sm = index_of(StrategyKind::Selfish);
  const std::size_t best = index_of(cell.best);
  const double slack = sigmas * cell.sm_std_error;
  unsigned mask = 1u << best;
  for (std::size_t k = 0; k < cell.scores.size(); ++k) {
    if (k == best || std::isnan(cell.scores[k])) continue;
    // Gaps between two closed-form scores are exact; only gaps involving SM
    // carry noise.
    if ((k == sm || best == sm) && cell.scores[k] >= cell.scores[best] - slack) mask |= 1u << k;
  }
  return mask;
}

bool row_admits_strategy_order(const RegionMap& map, std::size_t gamma_index, double sigmas) {
  std::size_t rank = 0;
  for (std::size_t i = 0; i < map.grid.q_steps; ++i) {
    const unsigned mask = plausible_winners(map.at(i, gamma_index), sigmas);
    // Taking the lowest admissible rank leaves the most room further right.
    std::size_t r = rank;
    while (r < kAllStrategies.size() && !(mask & (1u << r))) ++r;
    if (r == kAllStrategies.size()) return false;
    rank = r;
  }
  return true;
}

std::size_t nearest_gamma_index(const GridSpec& grid, double gamma) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < grid.gamma_steps; ++j) {
    if (std::abs(grid.gamma_at(j) - gamma) < std::abs(grid.gamma_at(best) - gamma)) best = j;
  }
  return best;
}

}  // namespace stubborn
