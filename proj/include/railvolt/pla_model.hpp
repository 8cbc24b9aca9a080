#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "railvolt/domain.hpp"
#include "railvolt/solver_backend.hpp"

namespace railvolt {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform breakpoints for the rectangle approximation of
/// g(s, t) = (1 - s)(1 - r0)^t, shared by every (station, train, consist).
struct PlaGrid {
  int n = 0;
  int m = 0;
  double t_max = 0.0;
  double r0 = 0.0;
  std::vector<double> s;  // n + 1 SOC breakpoints
  std::vector<double> t;  // m + 1 time breakpoints
  Matrix g;               // g[u][v] = g(s_u, t_v)
  Matrix w;               // w[u][v], cell slopes along t, u < n, v < m

  double dt(int v) const { return t[v + 1] - t[v]; }
  /// The surface the model represents once interval (u, v) is selected:
  /// linear in s along t_v, plus the cell's t-slope.
  double approx(double soc, double hours) const;
};

PlaGrid build_pla_grid(int n, int m, double t_max, double r0);

/// Max |approx - g| over a dense scan of every cell.
double pla_surface_error(const PlaGrid& grid, int samples_per_cell = 20);

// Column indices of every model symbol; -1 where a symbol does not exist
// (e.g. X at the origin, consists beyond a train's length).
struct PlaIndex {
  std::vector<int> X;                     // [i]
  std::vector<std::vector<int>> Y;        // [j][k]
  Grid3<int> Zc, Zs, B;                   // [i][j][k]
  std::vector<std::vector<int>> D, Tarr, Tdep;  // [i][j]
  Grid3<int> Sarr, Sdep, Tc, F;
  std::vector<std::vector<std::vector<std::vector<int>>>> beta, gamma, tau, eta;
  std::vector<std::string> symbol;        // per column, e.g. "X", "gamma"
  std::vector<std::string> row_family;    // per row: the row name up to its first "_", e.g. "energy"
};

struct PlaModel {
  AbstractModel model;
  PlaIndex index;
  PlaGrid grid;
};

/// Builds objective (setup cost plus weighted delay) and every constraint
/// family. Throws DomainError when the instance or config is invalid.
PlaModel build_model(const Instance& instance, const SolveConfig& config);

/// Rounds binaries at 0.5 and clamps SOC/times within 1e-6. Throws
/// DecodeError for a short primal vector or a hard-invariant breach > 1e-4.
Solution decode_solution(const std::vector<double>& primal, const PlaModel& pla,
                         const Instance& instance);

/// Setup cost plus weighted delay computed from a decoded solution.
double objective_of(const Instance& instance, const SolveConfig& config,
                    const Solution& solution);

/// Primal vector in model column order reconstructed from a solution; the
/// PLA auxiliaries are set to the cell the solution's (soc, hours) fall in.
std::vector<double> encode_solution(const Solution& solution, const PlaModel& pla,
                                    const Instance& instance);

struct PlaSolveOptions {
  SolveLimits limits;
  std::string dump_model;  // LP file path, empty for none
};

/// Solves an already built (possibly restricted) model and decodes it.
Solution solve_built(PlaModel& pla, const Instance& instance, const SolveConfig& config,
                     SolverBackend& backend, const PlaSolveOptions& options);

Solution solve_pla(const Instance& instance, const SolveConfig& config,
                   SolverBackend& backend, const std::string& dump_model = "");

}  // namespace railvolt
