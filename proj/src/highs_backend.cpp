#include <chrono>
#include <cmath>

#include "Highs.h"
#include "railvolt/solver_backend.hpp"

namespace railvolt {

namespace {

HighsLp to_highs(const AbstractModel& m) {
  HighsLp lp;
  const auto nc = static_cast<HighsInt>(m.num_columns());
  const auto nr = static_cast<HighsInt>(m.num_rows());
  lp.num_col_ = nc;
  lp.num_row_ = nr;
  lp.sense_ = ObjSense::kMinimize;
  lp.offset_ = m.objective_offset;
  bool integral = m.has_integers();
  for (const auto& c : m.columns()) {
    lp.col_cost_.push_back(c.cost);
    lp.col_lower_.push_back(std::isinf(c.lower) ? -kHighsInf : c.lower);
    lp.col_upper_.push_back(std::isinf(c.upper) ? kHighsInf : c.upper);
    lp.col_names_.push_back(c.name);
    if (integral)
      lp.integrality_.push_back(c.kind == ColumnKind::binary ? HighsVarType::kInteger
                                                             : HighsVarType::kContinuous);
  }
  std::vector<std::vector<std::pair<HighsInt, double>>> by_col(nc);
  for (HighsInt r = 0; r < nr; ++r) {
    const auto& row = m.rows()[r];
    switch (row.sense) {
      case Sense::geq: lp.row_lower_.push_back(row.rhs); lp.row_upper_.push_back(kHighsInf); break;
      case Sense::leq: lp.row_lower_.push_back(-kHighsInf); lp.row_upper_.push_back(row.rhs); break;
      case Sense::eq: lp.row_lower_.push_back(row.rhs); lp.row_upper_.push_back(row.rhs); break;
    }
    lp.row_names_.push_back(row.name);
    for (const auto& t : row.terms) by_col[t.col].push_back({r, t.coef});
  }
  auto& a = lp.a_matrix_;
  a.format_ = MatrixFormat::kColwise;
  a.num_col_ = nc;
  a.num_row_ = nr;
  a.start_.assign(1, 0);
  for (const auto& col : by_col) {
    for (auto [r, v] : col) {
      a.index_.push_back(r);
      a.value_.push_back(v);
    }
    a.start_.push_back(static_cast<HighsInt>(a.index_.size()));
  }
  return lp;
}

void quiet(Highs& h) {
  h.setOptionValue("output_flag", false);
  h.setOptionValue("log_to_console", false);
}

// Positive when `y` proves infeasibility of the row system under column
// bounds: the least value y'Ax can be forced to exceeds what bounds allow.
double farkas_margin(const AbstractModel& m, const std::vector<double>& y) {
  double rhs_side = 0.0;
  std::vector<double> z(m.num_columns(), 0.0);
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    const auto& row = m.rows()[r];
    double yr = y[r];
    if (yr == 0.0) continue;
    bool lower_ok = row.sense != Sense::leq;
    bool upper_ok = row.sense != Sense::geq;
    if (yr > 0 && !lower_ok) return -kInf;
    if (yr < 0 && !upper_ok) return -kInf;
    rhs_side += yr * row.rhs;
    for (const auto& t : row.terms) z[t.col] += yr * t.coef;
  }
  double max_activity = 0.0;
  for (std::size_t c = 0; c < m.num_columns(); ++c) {
    const auto& col = m.columns()[c];
    if (std::abs(z[c]) < 1e-12) continue;
    double b = z[c] > 0 ? col.upper : col.lower;
    if (std::isinf(b)) return -kInf;
    max_activity += z[c] * b;
  }
  return rhs_side - max_activity;
}

}  // namespace

SolveOutcome HighsBackend::solve(const AbstractModel& model, const SolveLimits& limits) {
  auto t0 = std::chrono::steady_clock::now();
  SolveOutcome out;
  Highs h;
  quiet(h);
  h.setOptionValue("threads", 1);
  h.setOptionValue("primal_feasibility_tolerance", 1e-6);
  h.setOptionValue("mip_feasibility_tolerance", 1e-6);
  h.setOptionValue("mip_rel_gap", limits.gap);
  h.setOptionValue("random_seed", static_cast<HighsInt>(limits.seed % 2147483647u));
  if (std::isfinite(limits.seconds)) h.setOptionValue("time_limit", limits.seconds);
  if (limits.first_feasible) h.setOptionValue("mip_max_improving_sols", 1);
  const bool integral = model.has_integers();
  if (limits.want_ray && !integral) h.setOptionValue("presolve", "off");

  HighsLp lp = to_highs(model);
  if (h.passModel(std::move(lp)) == HighsStatus::kError) {
    out.message = "HiGHS rejected the model";
    return out;
  }
  if (limits.start && integral) {
    HighsSolution start;
    start.col_value = *limits.start;
    start.value_valid = true;
    h.setSolution(start);
  }
  HighsStatus run = h.run();
  HighsModelStatus ms = h.getModelStatus();
  if (ms == HighsModelStatus::kUnboundedOrInfeasible) {
    h.setOptionValue("presolve", "off");
    run = h.run();
    ms = h.getModelStatus();
  }
  const HighsInfo& info = h.getInfo();
  const bool has_point = info.primal_solution_status == kSolutionStatusFeasible;
  out.message = h.modelStatusToString(ms);
  switch (ms) {
    case HighsModelStatus::kOptimal:
      out.status = OutcomeStatus::optimal;
      break;
    case HighsModelStatus::kInfeasible:
      out.status = OutcomeStatus::infeasible;
      break;
    case HighsModelStatus::kUnbounded:
      out.status = OutcomeStatus::unbounded;
      break;
    case HighsModelStatus::kTimeLimit:
    case HighsModelStatus::kIterationLimit:
    case HighsModelStatus::kSolutionLimit:
    case HighsModelStatus::kInterrupt:
      out.hit_limit = true;
      out.status = has_point ? OutcomeStatus::feasible_limit : OutcomeStatus::error;
      break;
    default:
      out.status = OutcomeStatus::error;
  }
  if (run == HighsStatus::kError && out.status == OutcomeStatus::optimal)
    out.status = OutcomeStatus::error;

  if (out.has_primal()) {
    const auto& sol = h.getSolution();
    out.primal = sol.col_value;
    out.objective = info.objective_function_value;
    if (integral) {
      out.bound = info.mip_dual_bound;
      out.gap = info.mip_gap;
    } else {
      out.bound = out.objective;
      if (sol.dual_valid) out.duals = sol.row_dual;
    }
  }
  if (out.status == OutcomeStatus::infeasible && limits.want_ray && !integral) {
    bool has_ray = false;
    std::vector<double> ray(model.num_rows(), 0.0);
    if (h.getDualRay(has_ray, ray.data()) != HighsStatus::kError && has_ray) {
      // Sign conventions differ between versions; keep the orientation that
      // certifies infeasibility.
      std::vector<double> neg(ray.size());
      for (std::size_t r = 0; r < ray.size(); ++r) neg[r] = -ray[r];
      if (farkas_margin(model, ray) > 1e-9)
        out.ray = std::move(ray);
      else if (farkas_margin(model, neg) > 1e-9)
        out.ray = std::move(neg);
    }
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void HighsBackend::write_lp(const AbstractModel& model, const std::filesystem::path& path) {
  Highs h;
  quiet(h);
  if (h.passModel(to_highs(model)) == HighsStatus::kError)
    throw SolverError("HiGHS rejected the model");
  if (h.writeModel(path.string()) == HighsStatus::kError)
    throw SolverError("cannot write " + path.string());
}

AbstractModel HighsBackend::read_lp(const std::filesystem::path& path) {
  Highs h;
  quiet(h);
  if (h.readModel(path.string()) == HighsStatus::kError)
    throw SolverError("cannot read " + path.string());
  const HighsLp& lp = h.getLp();
  if (lp.sense_ != ObjSense::kMinimize) throw ModelError("only minimisation models are supported");
  AbstractModel m;
  m.objective_offset = lp.offset_;
  for (HighsInt c = 0; c < lp.num_col_; ++c) {
    bool integer = !lp.integrality_.empty() && lp.integrality_[c] == HighsVarType::kInteger;
    double lo = lp.col_lower_[c] <= -kHighsInf ? -kInf : lp.col_lower_[c];
    double up = lp.col_upper_[c] >= kHighsInf ? kInf : lp.col_upper_[c];
    if (integer && (lo < 0 || up > 1)) throw ModelError("general integers are not supported");
    std::string name = c < static_cast<HighsInt>(lp.col_names_.size()) ? lp.col_names_[c]
                                                                       : "c" + std::to_string(c);
    m.add_column(name, integer ? ColumnKind::binary : ColumnKind::continuous, lo, up,
                 lp.col_cost_[c]);
  }
  HighsSparseMatrix a = lp.a_matrix_;
  a.ensureRowwise();
  for (HighsInt r = 0; r < lp.num_row_; ++r) {
    std::vector<Term> terms;
    for (HighsInt p = a.start_[r]; p < a.start_[r + 1]; ++p)
      terms.push_back({static_cast<int>(a.index_[p]), a.value_[p]});
    std::string name = r < static_cast<HighsInt>(lp.row_names_.size()) ? lp.row_names_[r]
                                                                       : "r" + std::to_string(r);
    double lo = lp.row_lower_[r], up = lp.row_upper_[r];
    if (lo == up) {
      m.add_row(name, terms, Sense::eq, lo);
    } else if (lo > -kHighsInf && up < kHighsInf) {
      m.add_row(name + ".lo", terms, Sense::geq, lo);
      m.add_row(name + ".up", terms, Sense::leq, up);
    } else if (lo > -kHighsInf) {
      m.add_row(name, terms, Sense::geq, lo);
    } else if (up < kHighsInf) {
      m.add_row(name, terms, Sense::leq, up);
    }
  }
  return m;
}

}  // namespace railvolt
