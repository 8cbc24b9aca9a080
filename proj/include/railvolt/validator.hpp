#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "railvolt/domain.hpp"

namespace railvolt {

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Tolerance {
  double soc = 0.05;
  double time = 0.02;

  /// Accepts solver output whose SOC comes from the rectangle approximation
  /// and published schedules rounded to two decimals.
  static Tolerance pla_aware() { return {0.05, 0.02}; }
  static Tolerance strict() { return {1e-4, 1e-4}; }
};

struct Violation {
  std::string kind;
  int station = -1;
  int train = -1;
  int consist = -1;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  std::vector<Violation> warnings;
  Metrics metrics;
  double objective = 0.0;
  Grid3<double> sim_soc_arrive;  // independently simulated trajectory
  Grid3<double> sim_soc_depart;
};

/// Re-simulates the schedule from instance data alone: sequential drain of
/// consists in index order, swaps to 1, charging along the exact curve.
/// Throws ValidationError when the solution's shape does not match.
ValidationReport simulate_schedule(const Instance& instance, const Solution& solution,
                                   const Tolerance& tolerance = Tolerance::pla_aware(),
                                   const SolveConfig& config = {});

/// Dwell-based delays: max(depart - arrive, wait) - wait.
Metrics recompute_metrics(const Instance& instance, const Solution& solution,
                          const SolveConfig& config = {});

class SearchTooLarge : public std::runtime_error {
 public:
  SearchTooLarge(const std::string& what, double estimate)
      : std::runtime_error(what), estimate(estimate) {}
  double estimate;
};

struct BruteForceGrid {
  double time_step = 0.25;  // charge durations step, t in {step, 2 step, ..., t_max}
  double t_max = 10.0;
  double max_states = 1e7;
};

struct BruteForceResult {
  bool feasible = false;
  double objective = 0.0;
  Solution schedule;
  std::uint64_t states = 0;
};

/// Exhaustive optimum over deployment sets and per-station actions (none,
/// swap subset, charge subset for a gridded duration), trains loaded with
/// their first max_batteries consists. Arrival states must follow the
/// sequential pattern [0..0, x, 1..1]. Throws SearchTooLarge beyond
/// grid.max_states.
BruteForceResult brute_force_best(const Instance& instance, const BruteForceGrid& grid = {},
                                  const SolveConfig& config = {});

}  // namespace railvolt
