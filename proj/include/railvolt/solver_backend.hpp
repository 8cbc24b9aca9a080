#pragma once

#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace railvolt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a query is not supported for the model at hand, e.g. duals
/// of a model with integer columns.
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { continuous, binary };
enum class Sense { geq, leq, eq };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;
};

struct Term {
  int col;
  double coef;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::geq;
  double rhs = 0.0;
};

// Minimisation model: min cost.x + offset over rows and column bounds.
class AbstractModel {
 public:
  int add_column(std::string name, ColumnKind kind, double lower, double upper,
                 double cost = 0.0);
  int add_binary(std::string name, double cost = 0.0) {
    return add_column(std::move(name), ColumnKind::binary, 0.0, 1.0, cost);
  }
  int add_continuous(std::string name, double lower = 0.0, double upper = kInf,
                     double cost = 0.0) {
    return add_column(std::move(name), ColumnKind::continuous, lower, upper, cost);
  }
  /// Terms on the same column are merged; zero coefficients dropped.
  int add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs);

  void set_bounds(int col, double lower, double upper);
  void set_cost(int col, double cost) { columns_.at(col).cost = cost; }
  void fix(int col, double value) { set_bounds(col, value, value); }

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t num_columns() const { return columns_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  bool has_integers() const;

  double objective_offset = 0.0;

  /// Objective of a point, including the offset.
  double objective_at(const std::vector<double>& x) const;
  /// Largest bound or row violation of a point.
  double max_violation(const std::vector<double>& x) const;
  /// Throws ModelError on duplicate names, non-finite data, or lower > upper.
  void validate() const;

 private:
  std::vector<Column> columns_;
  std::vector<Row> rows_;
};

enum class OutcomeStatus { optimal, feasible_limit, infeasible, unbounded, error };

std::string to_string(OutcomeStatus status);

struct SolveLimits {
  double gap = 1e-4;
  double seconds = kInf;
  bool want_ray = false;          // infeasibility certificate for LPs
  bool first_feasible = false;    // stop at the first incumbent (MIP)
  unsigned seed = 0;
  std::optional<std::vector<double>> start;  // MIP start, one value per column
};

struct SolveOutcome {
  OutcomeStatus status = OutcomeStatus::error;
  std::vector<double> primal;
  std::vector<double> duals;  // row duals, LP only; >= rows carry duals >= 0
  std::optional<std::vector<double>> ray;  // row-space Farkas certificate
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double wall_seconds = 0.0;
  bool hit_limit = false;
  std::string message;

  bool has_primal() const {
    return status == OutcomeStatus::optimal || status == OutcomeStatus::feasible_limit;
  }
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual SolveOutcome solve(const AbstractModel& model, const SolveLimits& limits) = 0;
  /// Writes the model in CPLEX LP text format.
  virtual void write_lp(const AbstractModel& model, const std::filesystem::path& path) = 0;
  virtual AbstractModel read_lp(const std::filesystem::path& path) = 0;
};

/// HiGHS adapter. Single-threaded; HiGHS itself may spawn no workers with
/// threads=1.
class HighsBackend : public SolverBackend {
 public:
  std::string name() const override { return "highs"; }
  SolveOutcome solve(const AbstractModel& model, const SolveLimits& limits) override;
  void write_lp(const AbstractModel& model, const std::filesystem::path& path) override;
  AbstractModel read_lp(const std::filesystem::path& path) override;
};

/// Backend by name; empty name reads RAILVOLT_SOLVER and falls back to highs.
std::unique_ptr<SolverBackend> make_backend(const std::string& name = "");

/// Row duals of an LP outcome. Throws CapabilityError for integer models or
/// outcomes without an optimal primal/dual pair.
const std::vector<double>& get_duals(const SolveOutcome& outcome, const AbstractModel& model);

}  // namespace railvolt
