#include "railvolt/solver_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <unordered_set>

#include <fmt/format.h>

namespace railvolt {

int AbstractModel::add_column(std::string name, ColumnKind kind, double lower, double upper,
                              double cost) {
  columns_.push_back({std::move(name), kind, lower, upper, cost});
  return static_cast<int>(columns_.size()) - 1;
}

int AbstractModel::add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  std::map<int, double> merged;
  for (const auto& t : terms) {
    if (t.col < 0 || static_cast<std::size_t>(t.col) >= columns_.size())
      throw ModelError(fmt::format("row '{}' references unknown column {}", name, t.col));
    merged[t.col] += t.coef;
  }
  Row row{std::move(name), {}, sense, rhs};
  for (auto [c, v] : merged)
    if (v != 0.0) row.terms.push_back({c, v});
  rows_.push_back(std::move(row));
  return static_cast<int>(rows_.size()) - 1;
}

void AbstractModel::set_bounds(int col, double lower, double upper) {
  auto& c = columns_.at(col);
  c.lower = lower;
  c.upper = upper;
}

bool AbstractModel::has_integers() const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [](const Column& c) { return c.kind == ColumnKind::binary; });
}

double AbstractModel::objective_at(const std::vector<double>& x) const {
  double z = objective_offset;
  for (std::size_t c = 0; c < columns_.size(); ++c) z += columns_[c].cost * x.at(c);
  return z;
}

double AbstractModel::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    worst = std::max(worst, columns_[c].lower - x.at(c));
    worst = std::max(worst, x.at(c) - columns_[c].upper);
  }
  for (const auto& r : rows_) {
    double lhs = 0.0;
    for (const auto& t : r.terms) lhs += t.coef * x.at(t.col);
    double v = 0.0;
    switch (r.sense) {
      case Sense::geq: v = r.rhs - lhs; break;
      case Sense::leq: v = lhs - r.rhs; break;
      case Sense::eq: v = std::abs(lhs - r.rhs); break;
    }
    worst = std::max(worst, v);
  }
  return worst;
}

void AbstractModel::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) throw ModelError("duplicate column name " + c.name);
    if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper)
      throw ModelError("inconsistent bounds on column " + c.name);
    if (!std::isfinite(c.cost)) throw ModelError("non-finite cost on column " + c.name);
  }
  seen.clear();
  for (const auto& r : rows_) {
    if (!seen.insert(r.name).second) throw ModelError("duplicate row name " + r.name);
    if (!std::isfinite(r.rhs)) throw ModelError("non-finite rhs on row " + r.name);
    for (const auto& t : r.terms)
      if (!std::isfinite(t.coef)) throw ModelError("non-finite coefficient in row " + r.name);
  }
}

std::string to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::optimal: return "optimal";
    case OutcomeStatus::feasible_limit: return "feasible_limit";
    case OutcomeStatus::infeasible: return "infeasible";
    case OutcomeStatus::unbounded: return "unbounded";
    case OutcomeStatus::error: return "error";
  }
  return "error";
}

std::unique_ptr<SolverBackend> make_backend(const std::string& name) {
  std::string pick = name;
  if (pick.empty()) {
    const char* env = std::getenv("RAILVOLT_SOLVER");
    pick = env && *env ? env : "highs";
  }
  if (pick == "highs") return std::make_unique<HighsBackend>();
  throw std::invalid_argument("unknown solver backend '" + pick + "' (available: highs)");
}

const std::vector<double>& get_duals(const SolveOutcome& outcome, const AbstractModel& model) {
  if (model.has_integers()) throw CapabilityError("duals requested on a model with binaries");
  if (outcome.status != OutcomeStatus::optimal || outcome.duals.size() != model.num_rows())
    throw CapabilityError("no optimal dual solution available (status " +
                          to_string(outcome.status) + ")");
  return outcome.duals;
}

}  // namespace railvolt
