#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "railvolt/domain.hpp"
#include "railvolt/pla_model.hpp"
#include "railvolt/solver_backend.hpp"

namespace railvolt {

class SplitError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// One model row with both sides expressed as ">=" (or "="): u_terms index
// the u block, v_terms the v block.
struct SplitRow {
  std::vector<Term> u_terms;
  std::vector<Term> v_terms;
  bool equality = false;
  double rhs = 0.0;
  int source_row = -1;  // -1 for rows made from u upper bounds
};

// min f.v + c.u + offset  s.t.  A u + Dm v (>= or =) b,  u >= 0, v binary.
struct SplitModel {
  std::vector<int> v_cols;   // model column of each v position
  std::vector<int> u_cols;   // model column of each u position
  std::vector<int> position; // model column -> its v or u position
  std::vector<double> f, c;
  double offset = 0.0;
  std::vector<SplitRow> rows;        // one per model row, same order
  std::vector<SplitRow> bound_rows;  // -u >= -upper for finite upper bounds
  std::vector<int> master_rows;      // rows without u terms
  std::vector<int> sub_rows;         // rows with u terms
};

/// Binary columns go to v, continuous ones to u. Throws SplitError when a
/// column symbol is unknown or its kind contradicts its symbol.
SplitModel split_model(const PlaModel& pla);

// coef.v + w_coef * w >= rhs
struct Cut {
  std::string kind;  // "optimality", "feasibility" or a static family tag
  std::vector<Term> v_terms;
  double w_coef = 0.0;
  double rhs = 0.0;

  double slack(const std::vector<double>& v, double w = 0.0) const;
};

/// Valid inequalities linking B, X, Y, Z, beta across consists and stations.
std::vector<Cut> extra_feasibility_cuts(const PlaModel& pla, const SplitModel& split,
                                        const Instance& instance, const SolveConfig& config);

/// Number of rows extra_feasibility_cuts emits.
std::size_t extra_cut_count(const Instance& instance);

struct SubproblemResult {
  bool feasible = false;
  double value = 0.0;          // c.u at the optimum
  double dual_value = 0.0;     // (b - Dm v).pi
  std::vector<double> u;
  Cut cut;
  std::string ray_source;      // "backend" or "normalized" for feasibility cuts
  double seconds = 0.0;
};

/// Solves the LP in u for fixed v and returns the optimality or feasibility
/// cut. Throws SolverError when neither an optimum nor a ray is obtained.
SubproblemResult solve_subproblem(const SplitModel& split, const std::vector<double>& v,
                                  SolverBackend& backend);

/// Master over (v, w): v-only model rows, static cuts and pooled cuts, with
/// w as the last column. w >= -1e7 until the pool holds an optimality cut.
AbstractModel build_rmp(const PlaModel& pla, const SplitModel& split,
                        const std::vector<Cut>& static_cuts, const std::vector<Cut>& pool);

struct BendersIteration {
  int iteration = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::string cut;
  double cut_violation = 0.0;  // -slack of the new cut at the master point
  bool repeated_point = false;
  double rmp_seconds = 0.0;
  double sp_seconds = 0.0;
  double elapsed = 0.0;
};

struct BendersRun {
  Solution solution;
  std::vector<Cut> cuts;            // generated cuts, in order
  std::vector<Cut> static_cuts;
  std::vector<BendersIteration> history;
};

struct BendersOptions {
  bool extra_cuts = true;
  std::function<void(const BendersIteration&)> on_iteration;
};

/// Decomposition with an initial incumbent from the full model with every
/// station and consist enabled. Lower bound from the master's MIP bound,
/// upper bound the best subproblem-feasible point seen.
BendersRun run_benders(const Instance& instance, const SolveConfig& config,
                       SolverBackend& backend, const BendersOptions& options = {});

void write_convergence_csv(const std::vector<BendersIteration>& history,
                           const std::filesystem::path& path);

}  // namespace railvolt
