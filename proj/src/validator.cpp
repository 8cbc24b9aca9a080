#include "railvolt/validator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

namespace railvolt {

namespace {

void check_shape(const Instance& inst, const Solution& s) {
  const auto ni = inst.num_stations();
  const auto nj = inst.num_trains();
  const auto nk = static_cast<std::size_t>(inst.max_consists());
  auto bad = [](const char* what) {
    throw ValidationError(fmt::format("solution field '{}' does not match the instance", what));
  };
  if (s.deployed.size() != ni) bad("deployed");
  if (s.has_battery.size() != nj) bad("has_battery");
  for (const auto& row : s.has_battery)
    if (row.size() < nk) bad("has_battery");
  for (const auto* m : {&s.arrive_time, &s.depart_time, &s.delay}) {
    if (m->size() != ni) bad("times");
    for (const auto& row : *m)
      if (row.size() != nj) bad("times");
  }
  auto g3 = [&](const auto& g, const char* what) {
    if (g.size() != ni) bad(what);
    for (const auto& a : g) {
      if (a.size() != nj) bad(what);
      for (const auto& b : a)
        if (b.size() < nk) bad(what);
    }
  };
  g3(s.charge_flag, "charge_flag");
  g3(s.swap_flag, "swap_flag");
  g3(s.charge_hours, "charge_hours");
  g3(s.soc_arrive, "soc_arrive");
  g3(s.soc_depart, "soc_depart");
}

// Drains `need` from consists in index order. Returns the unmet remainder.
double drain(std::vector<double>& soc, double need) {
  for (auto& x : soc) {
    double take = std::min(x, need);
    x -= take;
    need -= take;
    if (need <= 0) break;
  }
  return std::max(need, 0.0);
}

// Arrival states must look like [0, ..., 0, x, 1, ..., 1].
bool sequential(const std::vector<double>& soc, double tol) {
  for (std::size_t k = 0; k + 1 < soc.size(); ++k)
    if (soc[k] > tol && soc[k + 1] < 1 - tol) return false;
  return true;
}

}  // namespace

Metrics recompute_metrics(const Instance& inst, const Solution& s, const SolveConfig& cfg) {
  check_shape(inst, s);
  Metrics m;
  const auto nj = inst.num_trains();
  double delay = 0.0, charge = 0.0, swap = 0.0;
  for (std::size_t i = 0; i < inst.num_stations(); ++i) {
    if (s.deployed[i]) {
      ++m.n_deployed;
      m.setup_cost += inst.fixed_cost[i];
    }
    for (std::size_t j = 0; j < nj; ++j) {
      double w = inst.wait_time[i][j];
      double dwell = s.depart_time[i][j] - s.arrive_time[i][j];
      delay += std::max(dwell, w) - w;
      for (int k = 0; k < inst.trains[j].consists; ++k) {
        if (s.charge_flag[i][j][k]) charge += s.charge_hours[i][j][k];
        if (s.swap_flag[i][j][k]) swap += inst.swap_hours;
      }
    }
  }
  const double trains = static_cast<double>(std::max<std::size_t>(nj, 1));
  m.avg_delay_per_train = delay / trains;
  m.avg_charge_hours_per_train = charge / trains;
  m.avg_swap_hours_per_train = swap / trains;
  if (m.n_deployed > 0) {
    m.avg_charge_hours_per_station = charge / m.n_deployed;
    m.avg_swap_hours_per_station = swap / m.n_deployed;
  }
  m.objective = cfg.alpha_fixed * m.setup_cost + cfg.alpha_delay * delay;
  return m;
}

ValidationReport simulate_schedule(const Instance& inst, const Solution& s, const Tolerance& tol,
                                   const SolveConfig& cfg) {
  check_shape(inst, s);
  ValidationReport rep;
  const int ni = static_cast<int>(inst.num_stations());
  const int nj = static_cast<int>(inst.num_trains());
  const int nk = inst.max_consists();
  rep.sim_soc_arrive = make_grid3<double>(ni, nj, nk, 0.0);
  rep.sim_soc_depart = make_grid3<double>(ni, nj, nk, 0.0);
  auto flag = [&](std::string kind, int i, int j, int k, std::string msg) {
    rep.violations.push_back({std::move(kind), i, j, k, std::move(msg)});
  };
  auto warn = [&](std::string kind, int i, int j, int k, std::string msg) {
    rep.warnings.push_back({std::move(kind), i, j, k, std::move(msg)});
  };

  for (int i = 0; i < ni; ++i)
    if (s.deployed[i] && !inst.is_interior(i))
      flag("deployment", i, -1, -1, "origin/destination cannot host a station");

  for (int j = 0; j < nj; ++j) {
    const int K = inst.trains[j].consists;
    int count = 0;
    for (int k = 0; k < K; ++k) {
      if (s.has_battery[j][k]) ++count;
      if (k > 0 && s.has_battery[j][k] && !s.has_battery[j][k - 1])
        flag("battery_prefix", -1, j, k, "batteries must occupy the leading consists");
    }
    if (count > inst.trains[j].max_batteries)
      flag("battery_count", -1, j, -1,
           fmt::format("{} batteries exceed the limit {}", count, inst.trains[j].max_batteries));
  }

  for (int i = 0; i < ni; ++i) {
    bool any_op = false;
    for (int j = 0; j < nj; ++j) {
      const int K = inst.trains[j].consists;
      int n_swap = 0, n_charge = 0;
      double max_tc = 0.0;
      for (int k = 0; k < K; ++k) {
        bool c = s.charge_flag[i][j][k], w = s.swap_flag[i][j][k];
        double tc = s.charge_hours[i][j][k];
        n_swap += w;
        n_charge += c;
        if ((c || w) && !s.has_battery[j][k])
          flag("dummy_consist", i, j, k, "operation on a consist without a battery");
        if (c && tc <= 0)
          warn("zero_charge", i, j, k, "charge declared with zero duration");
        if (!c && tc > tol.time)
          flag("charge_hours", i, j, k, "charge duration without a charge flag");
        if (c) max_tc = std::max(max_tc, tc);
      }
      any_op = any_op || n_swap > 0 || n_charge > 0;
      if ((n_swap || n_charge) && !s.deployed[i])
        flag("undeployed_op", i, j, -1, "operation at a station that is not deployed");
      if (n_swap && n_charge)
        flag("exclusivity", i, j, -1, "train both swaps and charges at one station");
      if (n_swap > inst.full_batteries[i])
        flag("swap_capacity", i, j, -1,
             fmt::format("{} swaps exceed {} batteries", n_swap, inst.full_batteries[i]));
      if (n_charge > inst.chargers[i])
        flag("charger_capacity", i, j, -1,
             fmt::format("{} charges exceed {} chargers", n_charge, inst.chargers[i]));

      double arr = s.arrive_time[i][j], dep = s.depart_time[i][j];
      double dwell = dep - arr;
      if (i == 0) {
        if (std::abs(arr) > tol.time || std::abs(dep) > tol.time)
          flag("origin_time", i, j, -1, "train must arrive and depart the origin at 0");
      } else {
        double expect = s.depart_time[i - 1][j] + inst.leg_time(j, i - 1);
        if (std::abs(arr - expect) > tol.time)
          flag("travel_time", i, j, -1,
               fmt::format("arrival {:.4f} but previous departure plus travel is {:.4f}", arr,
                           expect));
      }
      if (dwell < inst.wait_time[i][j] - tol.time)
        flag("wait", i, j, -1,
             fmt::format("dwell {:.4f} below planned wait {:.4f}", dwell, inst.wait_time[i][j]));
      if (n_swap && dwell < inst.swap_hours - tol.time)
        flag("swap_time", i, j, -1, fmt::format("dwell {:.4f} shorter than a swap", dwell));
      if (max_tc > dwell + tol.time)
        flag("charge_time", i, j, -1,
             fmt::format("charging {:.4f} h exceeds dwell {:.4f}", max_tc, dwell));
      if (s.delay[i][j] < dwell - tol.time)
        flag("delay", i, j, -1, "reported delay is below the dwell time");
    }
    if (s.deployed[i] && !any_op)
      flag("idle_station", i, -1, -1, "deployed station performs no operation");
  }

  // SOC trajectory, independent of the claimed values.
  for (int j = 0; j < nj; ++j) {
    const int K = inst.trains[j].consists;
    std::vector<double> soc(K);
    for (int k = 0; k < K; ++k) soc[k] = s.has_battery[j][k] ? 1.0 : 0.0;
    for (int i = 0; i < ni; ++i) {
      std::vector<double> claimed_arr(K);
      for (int k = 0; k < K; ++k) {
        rep.sim_soc_arrive[i][j][k] = soc[k];
        double sa = s.soc_arrive[i][j][k], sd = s.soc_depart[i][j][k];
        claimed_arr[k] = sa;
        if (sa < -tol.soc || sd > 1 + tol.soc || sd < sa - tol.soc)
          flag("soc_bounds", i, j, k,
               fmt::format("claimed SOC ({:.4f}, {:.4f}) breaks 0 <= arrive <= depart <= 1", sa,
                           sd));
        if (!s.has_battery[j][k] && (sa > tol.soc || sd > tol.soc))
          flag("dummy_soc", i, j, k, "consist without a battery shows charge");
        if (std::abs(sa - soc[k]) > tol.soc)
          flag("soc_mismatch", i, j, k,
               fmt::format("arrival SOC {:.4f}, simulation gives {:.4f}", sa, soc[k]));

        if (s.swap_flag[i][j][k]) {
          soc[k] = 1.0;
        } else if (s.charge_flag[i][j][k]) {
          soc[k] = soc_after_charging(std::clamp(soc[k], 0.0, 1.0),
                                      std::max(0.0, s.charge_hours[i][j][k]), inst.r0);
          double reach = soc_after_charging(std::clamp(sa, 0.0, 1.0),
                                            std::max(0.0, s.charge_hours[i][j][k]), inst.r0);
          if (sd > reach + tol.soc)
            flag("charge_curve", i, j, k,
                 fmt::format("departure SOC {:.4f} exceeds reachable {:.4f} after {:.4f} h", sd,
                             reach, s.charge_hours[i][j][k]));
        } else if (std::abs(sd - sa) > tol.soc) {
          flag("idle_soc", i, j, k, "SOC changes without charging or swapping");
        }
        rep.sim_soc_depart[i][j][k] = soc[k];
        if (std::abs(sd - soc[k]) > tol.soc)
          flag("soc_mismatch", i, j, k,
               fmt::format("departure SOC {:.4f}, simulation gives {:.4f}", sd, soc[k]));
      }
      if (!sequential(claimed_arr, tol.soc))
        flag("sequential", i, j, -1, "arrival SOCs do not follow the sequential drain pattern");
      if (i + 1 < ni) {
        double need = inst.leg_energy(j, i);
        double claimed = 0.0;
        for (int k = 0; k < K; ++k)
          claimed += s.soc_depart[i][j][k] - s.soc_arrive[i + 1][j][k];
        if (std::abs(claimed - need) > tol.soc)
          flag("energy_balance", i, j, -1,
               fmt::format("claimed use {:.4f} on a leg needing {:.4f}", claimed, need));
        double short_by = drain(soc, need);
        if (short_by > tol.soc)
          flag("energy_shortfall", i, j, -1,
               fmt::format("leg to station {} short by {:.4f} batteries", i + 1, short_by));
      }
    }
  }

  rep.metrics = recompute_metrics(inst, s, cfg);
  rep.objective = rep.metrics.objective;
  rep.ok = rep.violations.empty();
  return rep;
}

namespace {

struct Action {
  enum Kind { none, swap, charge } kind = none;
  unsigned mask = 0;   // consists touched
  double hours = 0.0;  // charge duration
};

struct TrainBest {
  double delay = std::numeric_limits<double>::infinity();
  std::vector<Action> plan;  // per station
};

}  // namespace

BruteForceResult brute_force_best(const Instance& inst, const BruteForceGrid& grid,
                                  const SolveConfig& cfg) {
  if (auto v = validate_instance(inst); !v.empty())
    throw DomainError("invalid instance: " + v.front().message);
  const int ni = static_cast<int>(inst.num_stations());
  const int nj = static_cast<int>(inst.num_trains());
  std::vector<int> interior;
  for (int i = 1; i + 1 < ni; ++i) interior.push_back(i);
  const int nint = static_cast<int>(interior.size());
  if (nint > 16) throw SearchTooLarge("too many stations", std::pow(2.0, nint));
  const int steps = static_cast<int>(std::floor(grid.t_max / grid.time_step + 1e-9));

  // Size estimate: per train, product over stations of the action count.
  double estimate = 0.0;
  for (int j = 0; j < nj; ++j) {
    double per = 1.0;
    const int K = inst.trains[j].consists;
    for (int i : interior) {
      double subsets_s = 0, subsets_c = 0;
      for (unsigned m = 1; m < (1u << K); ++m) {
        int pc = __builtin_popcount(m);
        if (pc <= inst.full_batteries[i]) ++subsets_s;
        if (pc <= inst.chargers[i]) ++subsets_c;
      }
      per *= 1 + subsets_s + subsets_c * steps;
    }
    estimate += per;
  }
  if (estimate > grid.max_states)
    throw SearchTooLarge(
        fmt::format("brute force would explore about {:.3g} states (limit {:.3g})", estimate,
                    grid.max_states),
        estimate);

  BruteForceResult res;
  // best[j][mask]: least delay for train j operating exactly at the
  // interior stations in mask.
  std::vector<std::vector<TrainBest>> best(nj, std::vector<TrainBest>(1u << nint));
  for (int j = 0; j < nj; ++j) {
    const int K = inst.trains[j].consists;
    std::vector<double> start(K, 0.0);
    for (int k = 0; k < std::min(K, inst.trains[j].max_batteries); ++k) start[k] = 1.0;
    std::vector<Action> plan(ni);
    std::function<void(int, std::vector<double>, double, unsigned)> dfs =
        [&](int i, std::vector<double> soc, double delay, unsigned used) {
          ++res.states;
          if (i == ni - 1) {
            auto& b = best[j][used];
            if (delay < b.delay - 1e-12) b = {delay, plan};
            return;
          }
          const double w = inst.wait_time[i][j];
          auto advance = [&](std::vector<double> dep, double dwell, unsigned u) {
            if (drain(dep, inst.leg_energy(j, i)) > 1e-9) return;
            if (!sequential(dep, 1e-9)) return;
            dfs(i + 1, std::move(dep), delay + std::max(dwell, w) - w, u);
          };
          plan[i] = {};
          if (i == 0 || i == ni - 1) {
            advance(soc, w, used);
            return;
          }
          advance(soc, w, used);
          const unsigned bit = 1u << (i - 1);
          for (unsigned m = 1; m < (1u << K); ++m) {
            bool ok = true;
            for (int k = 0; k < K; ++k)
              if ((m >> k & 1) && start[k] == 0.0) ok = false;
            if (!ok) continue;
            int pc = __builtin_popcount(m);
            if (pc <= inst.full_batteries[i]) {
              auto dep = soc;
              for (int k = 0; k < K; ++k)
                if (m >> k & 1) dep[k] = 1.0;
              plan[i] = {Action::swap, m, 0.0};
              advance(dep, inst.swap_hours, used | bit);
            }
            if (pc <= inst.chargers[i]) {
              for (int st = 1; st <= steps; ++st) {
                double h = st * grid.time_step;
                auto dep = soc;
                for (int k = 0; k < K; ++k)
                  if (m >> k & 1) dep[k] = soc_after_charging(dep[k], h, inst.r0);
                plan[i] = {Action::charge, m, h};
                advance(dep, h, used | bit);
              }
            }
            plan[i] = {};
          }
        };
    if (!sequential(start, 1e-9)) continue;
    dfs(0, start, 0.0, 0u);
  }

  // Combine trains: every deployed station must serve at least one train.
  double best_obj = std::numeric_limits<double>::infinity();
  unsigned best_dep = 0;
  std::vector<unsigned> best_masks;
  const unsigned full = 1u << nint;
  for (unsigned dep = 0; dep < full; ++dep) {
    double setup = 0.0;
    for (int b = 0; b < nint; ++b)
      if (dep >> b & 1) setup += inst.fixed_cost[interior[b]];
    // DP over trains on the covered subset of dep.
    std::vector<double> cost(full, std::numeric_limits<double>::infinity());
    std::vector<std::vector<unsigned>> pick(full);
    cost[0] = 0.0;
    for (int j = 0; j < nj; ++j) {
      std::vector<double> next(full, std::numeric_limits<double>::infinity());
      std::vector<std::vector<unsigned>> next_pick(full);
      for (unsigned cov = 0; cov < full; ++cov) {
        if (!std::isfinite(cost[cov])) continue;
        for (unsigned m = dep;; m = (m - 1) & dep) {
          if (std::isfinite(best[j][m].delay)) {
            double c = cost[cov] + best[j][m].delay;
            unsigned nc = cov | m;
            if (c < next[nc] - 1e-12) {
              next[nc] = c;
              next_pick[nc] = pick[cov];
              next_pick[nc].push_back(m);
            }
          }
          if (m == 0) break;
        }
      }
      cost.swap(next);
      pick.swap(next_pick);
    }
    if (!std::isfinite(cost[dep])) continue;
    double obj = cfg.alpha_fixed * setup + cfg.alpha_delay * cost[dep];
    // Ties go to the lexicographically smallest deployment set.
    if (obj < best_obj - 1e-9) {
      best_obj = obj;
      best_dep = dep;
      best_masks = pick[dep];
    }
  }
  if (!std::isfinite(best_obj)) return res;

  res.feasible = true;
  res.objective = best_obj;
  Solution& s = res.schedule;
  s = Solution::empty_for(inst);
  s.algorithm = "brute_force";
  s.status = SolveStatus::optimal;
  for (int b = 0; b < nint; ++b) s.deployed[interior[b]] = best_dep >> b & 1;
  for (int j = 0; j < nj; ++j) {
    const int K = inst.trains[j].consists;
    const auto& plan = best[j][best_masks[j]].plan;
    std::vector<double> soc(K, 0.0);
    for (int k = 0; k < std::min(K, inst.trains[j].max_batteries); ++k) {
      soc[k] = 1.0;
      s.has_battery[j][k] = true;
    }
    double clock = 0.0;
    for (int i = 0; i < ni; ++i) {
      if (i > 0) clock += inst.leg_time(j, i - 1);
      const Action& a = plan[i];
      double w = inst.wait_time[i][j];
      double dwell = w;
      for (int k = 0; k < K; ++k) {
        s.soc_arrive[i][j][k] = soc[k];
        bool hit = a.mask >> k & 1;
        if (hit && a.kind == Action::swap) {
          s.swap_flag[i][j][k] = true;
          soc[k] = 1.0;
        } else if (hit && a.kind == Action::charge) {
          s.charge_flag[i][j][k] = true;
          s.charge_hours[i][j][k] = a.hours;
          soc[k] = soc_after_charging(soc[k], a.hours, inst.r0);
        }
        s.soc_depart[i][j][k] = soc[k];
        s.battery_nonempty[i][j][k] = s.soc_arrive[i][j][k] > 0;
      }
      if (a.kind == Action::swap) dwell = std::max(w, inst.swap_hours);
      if (a.kind == Action::charge) dwell = std::max(w, a.hours);
      s.arrive_time[i][j] = clock;
      clock += dwell;
      s.depart_time[i][j] = clock;
      s.delay[i][j] = dwell;
      if (i + 1 < ni) drain(soc, inst.leg_energy(j, i));
    }
  }
  s.objective_value = best_obj;
  s.bound = best_obj;
  return res;
}

}  // namespace railvolt
