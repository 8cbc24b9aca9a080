#pragma once

#include <stdexcept>
#include <vector>

#include "railvolt/domain.hpp"
#include "railvolt/solver_backend.hpp"

namespace railvolt {

/// Even deploying every station cannot supply the corridor's demand.
class IrrecoverableInfeasibility : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SupplyDemand {
  double demand = 0.0;   // sum over trains of consecutive-leg energies
  double initial = 0.0;  // batteries carried out of the origin
  double delta = 0.0;    // max(0, demand - initial)
};

SupplyDemand compute_supply_demand(const Instance& instance);

struct Benefit {
  double max_supply = 0.0;  // batteries held plus one charge per charger per train
  double e_up = 0.0;
  double e_down = 0.0;
  double value = 0.0;
};

/// Benefit of deploying `station` given the deployed set. The nearest
/// deployed neighbours default to the origin and destination.
Benefit compute_benefit(int station, const std::vector<bool>& deployed,
                        const Instance& instance, const SolveConfig& config);

struct FixState {
  std::vector<bool> deployed;  // [station]
  std::vector<int> order;      // stations in deployment order
  double supplied = 0.0;       // running sum of max_supply
  SupplyDemand need;
  nlohmann::json trace = nlohmann::json::array();
};

/// Greedy initial set: deploy the best remaining station until the summed
/// supply covers the deficit. Ties within 1e-9 are broken by config.seed.
/// Throws IrrecoverableInfeasibility when all stations together fall short.
FixState initialize_deployment(const Instance& instance, const SolveConfig& config);

/// Adds the best remaining station; returns false when none is left.
bool deploy_next(FixState& state, const Instance& instance, const SolveConfig& config,
                 const char* reason);

/// Greedy deployment followed by restricted solves with deployments and
/// battery-carrying consists fixed. Each round gets the remaining time
/// divided by the number of undeployed stations; a round without an
/// incumbent triggers the next deployment.
Solution run_fix_algorithm(const Instance& instance, const SolveConfig& config,
                           SolverBackend& backend);

}  // namespace railvolt
