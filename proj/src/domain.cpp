#include "railvolt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace railvolt {

int Instance::max_consists() const {
  int k = 0;
  for (const auto& t : trains) k = std::max(k, t.consists);
  return k;
}

void SolveConfig::validate() const {
  if (!(alpha_fixed > 0)) throw DomainError("alpha_fixed must be positive");
  if (!(alpha_delay > 0)) throw DomainError("alpha_delay must be positive");
  if (soc_breakpoints < 2) throw DomainError("soc_breakpoints must be >= 2");
  if (time_breakpoints < 2) throw DomainError("time_breakpoints must be >= 2");
  if (!(mip_gap > 0 && mip_gap < 1)) throw DomainError("mip_gap must lie in (0,1)");
  if (!(benders_gap > 0 && benders_gap < 1))
    throw DomainError("benders_gap must lie in (0,1)");
  if (!(epsilon > 0)) throw DomainError("epsilon must be positive");
  if (!(big_M >= 2)) throw DomainError("big_M must be >= 2");
  if (!(soc_big_M >= 1)) throw DomainError("soc_big_M must be >= 1");
  if (!(max_charge_hours > 0)) throw DomainError("max_charge_hours must be positive");
  if (!(time_limit_seconds > 0)) throw DomainError("time_limit_seconds must be positive");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible_limit: return "feasible_limit";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::error: return "error";
  }
  return "error";
}

SolveStatus solve_status_from_string(const std::string& text) {
  if (text == "optimal") return SolveStatus::optimal;
  if (text == "feasible_limit") return SolveStatus::feasible_limit;
  if (text == "infeasible") return SolveStatus::infeasible;
  if (text == "error") return SolveStatus::error;
  throw std::invalid_argument("unknown solve status: " + text);
}

Solution Solution::empty_for(const Instance& inst) {
  const auto ni = inst.num_stations();
  const auto nj = inst.num_trains();
  const auto nk = static_cast<std::size_t>(inst.max_consists());
  Solution s;
  s.deployed.assign(ni, false);
  s.has_battery.assign(nj, std::vector<bool>(nk, false));
  s.charge_flag = make_grid3<bool>(ni, nj, nk, false);
  s.swap_flag = make_grid3<bool>(ni, nj, nk, false);
  s.battery_nonempty = make_grid3<bool>(ni, nj, nk, false);
  s.charge_hours = make_grid3<double>(ni, nj, nk, 0.0);
  s.soc_arrive = make_grid3<double>(ni, nj, nk, 0.0);
  s.soc_depart = make_grid3<double>(ni, nj, nk, 0.0);
  s.arrive_time.assign(ni, std::vector<double>(nj, 0.0));
  s.depart_time.assign(ni, std::vector<double>(nj, 0.0));
  s.delay.assign(ni, std::vector<double>(nj, 0.0));
  return s;
}

namespace {

void check_r0(double r0) {
  if (!(r0 > 0 && r0 < 1)) throw DomainError(fmt::format("r0 = {} outside (0,1)", r0));
}

void check_soc(double s, const char* name) {
  if (!(s >= 0 && s <= 1)) throw DomainError(fmt::format("{} = {} outside [0,1]", name, s));
}

}  // namespace

double charge_rate_at_soc(double soc, double r0) {
  check_soc(soc, "soc");
  check_r0(r0);
  return r0 * (1.0 - soc);
}

double soc_after_charging(double soc_start, double hours, double r0) {
  check_soc(soc_start, "soc_start");
  check_r0(r0);
  if (!(hours >= 0)) throw DomainError(fmt::format("negative charge duration {}", hours));
  return 1.0 - (1.0 - soc_start) * std::pow(1.0 - r0, hours);
}

double charge_time_for_target(double soc_start, double soc_target, double r0) {
  check_soc(soc_start, "soc_start");
  check_r0(r0);
  if (soc_target >= 1.0)
    throw DomainError("target SOC of 1 is reached only asymptotically");
  if (soc_target < soc_start)
    throw DomainError(fmt::format("target {} below start {}", soc_target, soc_start));
  if (soc_target == soc_start) return 0.0;
  return std::log((1.0 - soc_target) / (1.0 - soc_start)) / std::log(1.0 - r0);
}

std::vector<InstanceViolation> validate_instance(const Instance& inst,
                                                 double additivity_tol_per_leg) {
  std::vector<InstanceViolation> out;
  auto add = [&](std::string kind, int i, int j, std::string msg) {
    out.push_back({std::move(kind), i, j, std::move(msg)});
  };
  const int ni = static_cast<int>(inst.num_stations());
  const int nj = static_cast<int>(inst.num_trains());
  if (ni < 2) {
    add("stations", -1, -1, "need at least an origin and a destination");
    return out;
  }
  if (nj < 1) add("trains", -1, -1, "no trains");

  auto sized = [&](std::size_t n, const char* what) {
    if (n != static_cast<std::size_t>(ni)) {
      add("shape", -1, -1, fmt::format("{} has {} entries, expected {}", what, n, ni));
      return false;
    }
    return true;
  };
  bool ok = sized(inst.fixed_cost.size(), "fixed_cost") &
            sized(inst.chargers.size(), "chargers") &
            sized(inst.full_batteries.size(), "full_batteries") &
            sized(inst.wait_time.size(), "wait_time");
  if (inst.energy.size() != static_cast<std::size_t>(nj) ||
      inst.travel_time.size() != static_cast<std::size_t>(nj)) {
    add("shape", -1, -1, "energy/travel_time need one matrix per train");
    ok = false;
  }
  for (int j = 0; ok && j < nj; ++j) {
    for (const Matrix* m : {&inst.energy[j], &inst.travel_time[j]}) {
      if (m->size() != static_cast<std::size_t>(ni)) ok = false;
      for (const auto& row : *m)
        if (row.size() != static_cast<std::size_t>(ni)) ok = false;
    }
    if (!ok) add("shape", -1, j, "matrix is not stations x stations");
  }
  for (int i = 0; ok && i < ni; ++i)
    if (inst.wait_time[i].size() != static_cast<std::size_t>(nj)) {
      add("shape", i, -1, "wait_time row has wrong train count");
      ok = false;
    }
  if (!ok) return out;

  if (!(inst.r0 > 0 && inst.r0 < 1)) add("r0", -1, -1, "r0 must lie in (0,1)");
  if (!(inst.swap_hours > 0)) add("swap_hours", -1, -1, "swap_hours must be positive");

  for (int j = 0; j < nj; ++j) {
    const auto& t = inst.trains[j];
    if (t.consists < 1) add("consists", -1, j, "train has no consists");
    if (t.max_batteries < 0) add("max_batteries", -1, j, "negative battery limit");
  }

  for (int i = 0; i < ni; ++i) {
    if (inst.fixed_cost[i] < 0) add("fixed_cost", i, -1, "negative fixed cost");
    if (inst.is_interior(i)) {
      if (inst.chargers[i] < 1) add("chargers", i, -1, "interior station without chargers");
      if (inst.full_batteries[i] < 1)
        add("full_batteries", i, -1, "interior station without batteries");
    }
    for (int j = 0; j < nj; ++j) {
      double w = inst.wait_time[i][j];
      if (!(w >= 0)) {
        add("wait_time", i, j, fmt::format("negative wait time {}", w));
      } else if (!inst.is_interior(i) && w != 0) {
        add("wait_time", i, j, "origin/destination wait must be zero");
      }
    }
  }

  for (int j = 0; j < nj; ++j) {
    const std::pair<const Matrix*, const char*> mats[] = {
        {&inst.energy[j], "energy"}, {&inst.travel_time[j], "travel_time"}};
    for (auto [m, name] : mats) {
      for (int a = 0; a < ni; ++a) {
        if ((*m)[a][a] != 0) add(name, a, j, fmt::format("{} diagonal nonzero", name));
        for (int b = 0; b < ni; ++b)
          if (!((*m)[a][b] >= 0)) add(name, a, j, fmt::format("{} entry negative", name));
      }
      // Leg sums along the corridor must reproduce the end-to-end entries.
      for (int a = 0; a < ni; ++a) {
        double acc = 0.0;
        for (int b = a + 1; b < ni; ++b) {
          acc += (*m)[b - 1][b];
          double tol = additivity_tol_per_leg * (b - a + 1) + 1e-6;
          if (std::abs(acc - (*m)[a][b]) > tol)
            add(std::string(name) + "_additivity", a, j,
                fmt::format("{} legs {}..{} sum to {:.4f}, entry is {:.4f}", name, a, b,
                            acc, (*m)[a][b]));
        }
      }
    }
  }
  return out;
}

}  // namespace railvolt
