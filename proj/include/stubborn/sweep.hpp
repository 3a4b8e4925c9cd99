#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "stubborn/mining_params.hpp"

namespace stubborn {

/// Grid q values are clamped into [kGridQFloor, kGridQCeiling] so every cell
/// is a valid attack parameter set.
inline constexpr double kGridQFloor = 1e-6;
inline constexpr double kGridQCeiling = 0.5 - 1e-6;

/// Rectangular grid over (q, gamma). Axis values are evenly spaced and
/// include both endpoints; an axis with one step must have min == max.
struct GridSpec {
  double q_min = 0.0;
  double q_max = 0.5;
  double gamma_min = 0.0;
  double gamma_max = 1.0;
  std::size_t q_steps = 101;
  std::size_t gamma_steps = 101;

  void validate() const;
  std::size_t cell_count() const { return q_steps * gamma_steps; }
  /// Clamped q of column i.
  double q_at(std::size_t i) const;
  double gamma_at(std::size_t j) const;
  /// Cells are stored row-major with gamma as the outer index.
  std::size_t cell_index(std::size_t i, std::size_t j) const { return j * q_steps + i; }
};

using StrategyScores = std::array<double, 4>;

struct CellClassification {
  StrategyKind best = StrategyKind::Honest;
  /// Apparent hashrate per strategy, indexed by index_of(StrategyKind).
  StrategyScores scores{};
  double sm_std_error = 0.0;
};

/// Scores HM by q, SM by the supplied score, LSM and EFSM by their closed-form
/// apparent hashrates (gamma -> 0 limit at gamma = 0), and picks the argmax.
/// Ties go to the less deviant strategy (HM, then SM, LSM, EFSM).
CellClassification classify_cell(const MiningParams& params, double sm_score);

inline constexpr double kSmMinSimulatedGap = 0.005;

/// SM scored 0: a three-strategy map.
struct SmSkip {};
/// SM scored by run_monte_carlo in every cell, cell c seeded with
/// derive_seed(seed, c). Cells with p - q below kSmMinSimulatedGap are not
/// simulated (cycle lengths blow up near q = 1/2): their SM score is NaN and
/// SM cannot win there.
struct SmSimulate {
  std::uint64_t n_cycles = 100'000;
  std::uint64_t seed = 0;
};
/// SM scores taken from a table indexed like the map's cells.
struct SmTable {
  std::vector<double> scores;
  std::vector<double> std_errors;
};
using SmMode = std::variant<SmSkip, SmSimulate, SmTable>;

struct RegionMap {
  GridSpec grid;
  std::vector<CellClassification> cells;
  /// One-line provenance of the SM column, written as CSV metadata.
  std::string sm_source;

  const CellClassification& at(std::size_t i, std::size_t j) const {
    return cells[grid.cell_index(i, j)];
  }
  /// Cell count per winning strategy, indexed by index_of(StrategyKind).
  std::array<std::size_t, 4> region_counts() const;
};

/// Classifies every cell. Deterministic for a fixed grid and SM mode,
/// regardless of `workers` (0 = all cores).
RegionMap compute_map(const GridSpec& grid, const SmMode& sm_mode, unsigned workers = 0);

enum class MapFormat { Csv, Ppm };

/// CSV: `#` metadata lines, header
/// `q,gamma,best,score_hm,score_sm,score_lsm,score_efsm`, one row per cell in
/// storage order, numbers with 9 significant digits.
void write_csv(const RegionMap& map, std::ostream& out);
/// Binary P6, one pixel per cell: HM white, SM blue, LSM green, EFSM red;
/// q grows rightward and gamma upward.
void write_ppm(const RegionMap& map, std::ostream& out);
void emit_map(const RegionMap& map, MapFormat format, std::ostream& out);

/// Parses what write_csv produced (grid metadata line required).
RegionMap read_map_csv(std::istream& in);

std::array<unsigned char, 3> region_color(StrategyKind kind);

/// A cell where HM wins again after some deviant strategy already won at a
/// smaller q on the same gamma row.
struct FrontierViolation {
  std::size_t gamma_index;
  std::size_t q_index;
};
std::vector<FrontierViolation> monotone_frontier_violations(const RegionMap& map);

/// True when the winners along row j never step back in the order
/// HM -> SM -> LSM -> EFSM as q grows (regions may be skipped).
bool row_follows_strategy_order(const RegionMap& map, std::size_t gamma_index);

/// Strategies the cell's data cannot rule out as winner: the argmax plus
/// every strategy whose gap to it lies within `sigmas` SM standard errors
/// (only the SM score is noisy). A bitmask over index_of(StrategyKind).
unsigned plausible_winners(const CellClassification& cell, double sigmas);

/// Like row_follows_strategy_order, but each cell may take any of its
/// plausible winners: false only for a reversal that survives SM noise.
bool row_admits_strategy_order(const RegionMap& map, std::size_t gamma_index, double sigmas);

/// Row whose gamma is closest to `gamma`.
std::size_t nearest_gamma_index(const GridSpec& grid, double gamma);

}  // namespace stubborn
