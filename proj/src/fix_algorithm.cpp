#include "railvolt/fix_algorithm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "railvolt/instance_gen.hpp"
#include "railvolt/pla_model.hpp"

namespace railvolt {

SupplyDemand compute_supply_demand(const Instance& inst) {
  SupplyDemand sd;
  const std::size_t ni = inst.num_stations();
  for (std::size_t j = 0; j < inst.num_trains(); ++j) {
    for (std::size_t i = 0; i + 1 < ni; ++i) sd.demand += inst.leg_energy(j, i);
    sd.initial += std::min(inst.trains[j].consists, inst.trains[j].max_batteries);
  }
  sd.delta = std::max(0.0, sd.demand - sd.initial);
  return sd;
}

Benefit compute_benefit(int station, const std::vector<bool>& deployed, const Instance& inst,
                        const SolveConfig& cfg) {
  if (!inst.is_interior(station))
    throw DomainError(fmt::format("station {} is not a candidate", station));
  const int ni = static_cast<int>(inst.num_stations());
  int up = 0, down = ni - 1;
  for (int a = station - 1; a > 0; --a)
    if (deployed[a]) { up = a; break; }
  for (int b = station + 1; b < ni - 1; ++b)
    if (deployed[b]) { down = b; break; }

  Benefit ben;
  const double nj = static_cast<double>(inst.num_trains());
  ben.max_supply = inst.full_batteries[station] + nj * inst.chargers[station];
  double waits = 0.0;
  for (std::size_t j = 0; j < inst.num_trains(); ++j) {
    ben.e_up += inst.energy[j][up][station];
    ben.e_down += inst.energy[j][station][down];
    waits += inst.wait_time[station][j];
  }
  ben.value = ben.max_supply + ben.e_down + ben.e_up - cfg.alpha_fixed * inst.fixed_cost[station] +
              cfg.alpha_delay * waits;
  return ben;
}

namespace {

int pick_best(const FixState& st, const Instance& inst, const SolveConfig& cfg,
              Benefit& picked) {
  std::vector<int> best;
  double best_value = -kInf;
  std::vector<Benefit> all(inst.num_stations());
  for (std::size_t i = 1; i + 1 < inst.num_stations(); ++i) {
    if (st.deployed[i]) continue;
    all[i] = compute_benefit(static_cast<int>(i), st.deployed, inst, cfg);
    if (all[i].value > best_value + 1e-9) {
      best_value = all[i].value;
      best = {static_cast<int>(i)};
    } else if (all[i].value >= best_value - 1e-9) {
      best.push_back(static_cast<int>(i));
    }
  }
  if (best.empty()) return -1;
  int chosen = best.front();
  if (best.size() > 1) {
    Sampler rng(cfg.seed + 7919ULL * st.order.size());
    chosen = best[std::min(best.size() - 1,
                           static_cast<std::size_t>(rng.uniform() * best.size()))];
  }
  picked = all[chosen];
  return chosen;
}

}  // namespace

bool deploy_next(FixState& st, const Instance& inst, const SolveConfig& cfg,
                 const char* reason) {
  Benefit b;
  int i = pick_best(st, inst, cfg, b);
  if (i < 0) return false;
  st.deployed[i] = true;
  st.order.push_back(i);
  st.supplied += b.max_supply;
  st.trace.push_back({{"event", "deploy"},
                      {"station", i},
                      {"reason", reason},
                      {"benefit", b.value},
                      {"max_supply", b.max_supply},
                      {"e_up", b.e_up},
                      {"e_down", b.e_down},
                      {"supplied", st.supplied}});
  return true;
}

FixState initialize_deployment(const Instance& inst, const SolveConfig& cfg) {
  FixState st;
  st.deployed.assign(inst.num_stations(), false);
  st.need = compute_supply_demand(inst);
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < inst.num_stations(); ++i)
    total += inst.full_batteries[i] + static_cast<double>(inst.num_trains()) * inst.chargers[i];
  if (total < st.need.delta)
    throw IrrecoverableInfeasibility(fmt::format(
        "all stations together supply {:.4f} batteries, the deficit is {:.4f}", total,
        st.need.delta));
  while (st.supplied < st.need.delta)
    if (!deploy_next(st, inst, cfg, "initial")) break;
  return st;
}

Solution run_fix_algorithm(const Instance& inst, const SolveConfig& cfg, SolverBackend& backend) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  FixState st = initialize_deployment(inst, cfg);
  PlaModel pla = build_model(inst, cfg);
  for (std::size_t j = 0; j < inst.num_trains(); ++j)
    for (int k = 0; k < inst.trains[j].consists; ++k)
      pla.model.fix(pla.index.Y[j][k], k < inst.trains[j].max_batteries ? 1.0 : 0.0);

  Solution sol = Solution::empty_for(inst);
  sol.status = SolveStatus::infeasible;
  int rounds = 0;
  while (true) {
    for (std::size_t i = 1; i + 1 < inst.num_stations(); ++i)
      pla.model.fix(pla.index.X[i], st.deployed[i] ? 1.0 : 0.0);
    int undeployed = 0;
    for (std::size_t i = 1; i + 1 < inst.num_stations(); ++i)
      if (!st.deployed[i]) ++undeployed;
    double remaining = cfg.time_limit_seconds - elapsed();
    if (remaining <= 0) {
      sol.status = SolveStatus::error;
      sol.log["note"] = "time limit reached before a feasible round";
      break;
    }
    PlaSolveOptions opt;
    opt.limits.gap = cfg.mip_gap;
    opt.limits.seed = cfg.seed;
    opt.limits.seconds = undeployed > 0 ? remaining / undeployed : remaining;
    Solution round = solve_built(pla, inst, cfg, backend, opt);
    ++rounds;
    std::vector<int> set;
    for (std::size_t i = 0; i < st.deployed.size(); ++i)
      if (st.deployed[i]) set.push_back(static_cast<int>(i));
    st.trace.push_back({{"event", "solve"},
                        {"deployed", set},
                        {"status", to_string(round.status)},
                        {"objective", round.objective_value},
                        {"seconds", round.wall_seconds}});
    if (round.status == SolveStatus::optimal || round.status == SolveStatus::feasible_limit) {
      sol = std::move(round);
      break;
    }
    if (!deploy_next(st, inst, cfg, "restricted model had no incumbent")) {
      sol.status = SolveStatus::infeasible;
      break;
    }
  }
  sol.algorithm = "fa";
  sol.log["rounds"] = rounds;
  sol.log["deficit"] = st.need.delta;
  sol.log["demand"] = st.need.demand;
  sol.log["initial_supply"] = st.need.initial;
  sol.log["trace"] = st.trace;
  sol.wall_seconds = elapsed();
  return sol;
}

}  // namespace railvolt
