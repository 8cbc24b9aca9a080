#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace railvolt {

using Matrix = std::vector<std::vector<double>>;

/// Thrown when an argument lies outside the domain of a physics or
/// derivation helper.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Train {
  std::string name;
  int consists = 0;       // number of consist slots on the train
  int max_batteries = 0;  // upper bound on battery-carrying consists
};

// A rail corridor with an ordered list of stations. Index 0 is the origin,
// the last index the destination; everything in between is a candidate
// charge/swap site. Energies are in fully-charged-battery equivalents,
// times in hours.
struct Instance {
  std::vector<std::string> stations;
  std::vector<Train> trains;
  std::vector<double> fixed_cost;    // per station
  std::vector<int> chargers;         // per station
  std::vector<int> full_batteries;   // per station
  std::vector<Matrix> energy;        // [train][station][station]
  std::vector<Matrix> travel_time;   // [train][station][station]
  Matrix wait_time;                  // [station][train]
  double r0 = 0.4;                   // charge rate of an empty battery (1/h)
  double swap_hours = 2.0;
  nlohmann::json meta = nlohmann::json::object();

  std::size_t num_stations() const { return stations.size(); }
  std::size_t num_trains() const { return trains.size(); }
  std::size_t origin() const { return 0; }
  std::size_t destination() const { return stations.size() - 1; }
  bool is_interior(std::size_t station) const {
    return station > 0 && station + 1 < stations.size();
  }
  int max_consists() const;
  double leg_energy(std::size_t train, std::size_t from) const {
    return energy[train][from][from + 1];
  }
  double leg_time(std::size_t train, std::size_t from) const {
    return travel_time[train][from][from + 1];
  }
};

struct SolveConfig {
  double alpha_fixed = 1.0;
  double alpha_delay = 3.0;
  double big_M = 1000.0;
  double soc_big_M = 2.0;  // big-M of the SOC constraint family
  double epsilon = 1e-6;
  int soc_breakpoints = 10;   // n
  int time_breakpoints = 10;  // m
  double max_charge_hours = 10.0;
  double mip_gap = 0.01;
  double time_limit_seconds = 1800.0;
  double benders_gap = 0.05;
  double rmp_gap = 0.005;
  double rmp_time_limit_seconds = 300.0;
  int max_benders_iterations = 10000;
  unsigned seed = 1;

  /// Throws DomainError naming the first violated invariant.
  void validate() const;
};

enum class SolveStatus { optimal, feasible_limit, infeasible, error };

std::string to_string(SolveStatus status);
SolveStatus solve_status_from_string(const std::string& text);

// Per-(station, train, consist) arrays are stored as [station][train][consist]
// with consist extent max_consists(); unused trailing consists stay zero.
template <class T>
using Grid3 = std::vector<std::vector<std::vector<T>>>;

template <class T>
Grid3<T> make_grid3(std::size_t a, std::size_t b, std::size_t c, T value = T{}) {
  return Grid3<T>(a, std::vector<std::vector<T>>(b, std::vector<T>(c, value)));
}

struct Solution {
  std::vector<bool> deployed;                 // [station]
  std::vector<std::vector<bool>> has_battery; // [train][consist]
  Grid3<bool> charge_flag;
  Grid3<bool> swap_flag;
  Grid3<double> charge_hours;
  Matrix arrive_time;  // [station][train]
  Matrix depart_time;  // [station][train]
  Grid3<double> soc_arrive;
  Grid3<double> soc_depart;
  Matrix delay;        // [station][train], the D variable (dwell bound)
  Grid3<bool> battery_nonempty;

  double objective_value = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  SolveStatus status = SolveStatus::error;
  double wall_seconds = 0.0;
  std::string algorithm;
  nlohmann::json log = nlohmann::json::object();

  /// Empty solution with every array sized for `instance`.
  static Solution empty_for(const Instance& instance);
};

struct Metrics {
  double objective = 0.0;
  int n_deployed = 0;
  double setup_cost = 0.0;
  double avg_delay_per_train = 0.0;
  double avg_charge_hours_per_train = 0.0;
  double avg_swap_hours_per_train = 0.0;
  double avg_charge_hours_per_station = 0.0;
  double avg_swap_hours_per_station = 0.0;
};

// Charging physics. The charge rate falls linearly with SOC, r(s) = r0(1-s),
// which integrates to s(t) = 1 - (1-s0)(1-r0)^t for real t >= 0.

double charge_rate_at_soc(double soc, double r0);
double soc_after_charging(double soc_start, double hours, double r0);
/// Inverse of soc_after_charging. Throws DomainError when the target is
/// unreachable (target >= 1) or below the start.
double charge_time_for_target(double soc_start, double soc_target, double r0);

struct InstanceViolation {
  std::string kind;  // e.g. "wait_time", "energy_additivity"
  int station = -1;
  int train = -1;
  std::string message;
};

/// Every invariant violation of `instance`; empty means valid. Leg
/// additivity is checked with a tolerance of `additivity_tol_per_leg`
/// per rounded entry involved, which absorbs two-decimal table rounding.
/// Pass 0 for an exact (1e-6) check.
std::vector<InstanceViolation> validate_instance(
    const Instance& instance, double additivity_tol_per_leg = 0.005);

}  // namespace railvolt
