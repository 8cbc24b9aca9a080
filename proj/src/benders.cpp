#include "railvolt/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

namespace railvolt {

namespace {

const std::set<std::string> kVSymbols{"X", "Y", "Zc", "Zs", "B", "beta", "tau"};
const std::set<std::string> kUSymbols{"D",  "Tarr", "Tdep",  "Sarr", "Sdep",
                                      "Tc", "F",    "gamma", "eta"};

constexpr double kDrop = 1e-10;

std::vector<Term> sparse(const std::vector<double>& dense) {
  std::vector<Term> out;
  for (std::size_t p = 0; p < dense.size(); ++p)
    if (std::abs(dense[p]) > kDrop) out.push_back({static_cast<int>(p), dense[p]});
  return out;
}

// Cut from row multipliers y over the subproblem rows:
// y.(b - Dm v) <= 0 (feasibility) or w >= y.(b - Dm v) (optimality).
Cut cut_from_multipliers(const SplitModel& sm, const std::vector<const SplitRow*>& rows,
                         const std::vector<double>& y, bool optimality) {
  std::vector<double> coef(sm.v_cols.size(), 0.0);
  double rhs = 0.0;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (std::abs(y[s]) <= kDrop) continue;
    rhs += y[s] * rows[s]->rhs;
    for (const auto& t : rows[s]->v_terms) coef[t.col] += y[s] * t.coef;
  }
  Cut cut;
  cut.kind = optimality ? "optimality" : "feasibility";
  cut.w_coef = optimality ? 1.0 : 0.0;
  if (!optimality) {
    // Any positive scaling is valid; keep coefficients near unit size.
    double scale = std::abs(rhs);
    for (double a : coef) scale = std::max(scale, std::abs(a));
    if (scale > 0) {
      for (double& a : coef) a /= scale;
      rhs /= scale;
    }
  }
  cut.v_terms = sparse(coef);
  cut.rhs = rhs;
  return cut;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SplitModel split_model(const PlaModel& pla) {
  const AbstractModel& mdl = pla.model;
  const auto& cols = mdl.columns();
  if (pla.index.symbol.size() != cols.size())
    throw SplitError("column symbol table does not match the model");
  SplitModel sm;
  sm.position.assign(cols.size(), -1);
  sm.offset = mdl.objective_offset;
  std::vector<bool> is_v(cols.size(), false);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto& sym = pla.index.symbol[c];
    const bool binary = cols[c].kind == ColumnKind::binary;
    if (kVSymbols.count(sym)) {
      if (!binary) throw SplitError(fmt::format("{} is in v but not binary", cols[c].name));
      is_v[c] = true;
      sm.position[c] = static_cast<int>(sm.v_cols.size());
      sm.v_cols.push_back(static_cast<int>(c));
      sm.f.push_back(cols[c].cost);
    } else if (kUSymbols.count(sym)) {
      if (binary) throw SplitError(fmt::format("{} is in u but binary", cols[c].name));
      if (cols[c].lower != 0.0)
        throw SplitError(fmt::format("{} must have lower bound 0", cols[c].name));
      sm.position[c] = static_cast<int>(sm.u_cols.size());
      sm.u_cols.push_back(static_cast<int>(c));
      sm.c.push_back(cols[c].cost);
      if (std::isfinite(cols[c].upper)) {
        SplitRow br;
        br.u_terms.push_back({sm.position[c], -1.0});
        br.rhs = -cols[c].upper;
        sm.bound_rows.push_back(std::move(br));
      }
    } else {
      throw SplitError(fmt::format("unknown symbol '{}' on column {}", sym, cols[c].name));
    }
  }
  const auto& rows = mdl.rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double sign = rows[r].sense == Sense::leq ? -1.0 : 1.0;
    SplitRow sr;
    sr.equality = rows[r].sense == Sense::eq;
    sr.rhs = sign * rows[r].rhs;
    sr.source_row = static_cast<int>(r);
    for (const auto& t : rows[r].terms) {
      Term nt{sm.position[t.col], sign * t.coef};
      (is_v[t.col] ? sr.v_terms : sr.u_terms).push_back(nt);
    }
    (sr.u_terms.empty() ? sm.master_rows : sm.sub_rows).push_back(static_cast<int>(r));
    sm.rows.push_back(std::move(sr));
  }
  return sm;
}

double Cut::slack(const std::vector<double>& v, double w) const {
  double lhs = w_coef * w;
  for (const auto& t : v_terms) lhs += t.coef * v.at(t.col);
  return lhs - rhs;
}

std::size_t extra_cut_count(const Instance& inst) {
  const std::size_t ni = inst.num_stations(), nj = inst.num_trains();
  std::size_t total = 4 * (ni - 1) * nj;
  for (const auto& tr : inst.trains) total += ni * (7 * tr.consists - 5) + tr.consists;
  return total;
}

std::vector<Cut> extra_feasibility_cuts(const PlaModel& pla, const SplitModel& sm,
                                        const Instance& inst, const SolveConfig& cfg) {
  const auto& ix = pla.index;
  const int ni = static_cast<int>(inst.num_stations());
  const int nj = static_cast<int>(inst.num_trains());
  const int n = pla.grid.n;
  const double M = cfg.big_M;
  auto vp = [&](int col) {
    if (col < 0 || sm.position[col] < 0) throw SplitError("cut references a missing column");
    return sm.position[col];
  };
  std::vector<Cut> cuts;
  auto add = [&](const char* kind, std::vector<Term> terms, double rhs) {
    cuts.push_back({kind, std::move(terms), 0.0, rhs});
  };
  auto x_term = [&](int i, double coef, std::vector<Term>& terms) {
    if (ix.X[i] >= 0) terms.push_back({vp(ix.X[i]), coef});
  };

  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      const int K = inst.trains[j].consists;
      auto B = [&](int k) { return vp(ix.B[i][j][k]); };
      auto beta = [&](int k, int u) { return vp(ix.beta[i][j][k][u]); };
      for (int k = 1; k < K; ++k) {
        // B_k = 0 empties every earlier consist.
        std::vector<Term> t{{B(k), static_cast<double>(k)}};
        for (int a = 0; a < k; ++a) t.push_back({B(a), -1.0});
        add("B_prefix", t, 0.0);
      }
      for (int k = 0; k + 1 < K; ++k) {
        std::vector<Term> t{{B(k), -static_cast<double>(K - 1 - k)}};
        for (int a = k + 1; a < K; ++a) t.push_back({B(a), 1.0});
        add("B_suffix", t, 0.0);
      }
      for (int k = 0; k + 1 < K; ++k) add("B_next", {{B(k + 1), 1.0}, {B(k), -1.0}}, 0.0);

      if (i + 1 < ni) {
        const double e = inst.energy[j][i][i + 1];
        std::vector<Term> t1, t2, t3, t4;
        x_term(i, M, t1);
        x_term(i, M, t2);
        for (int k = 0; k < K; ++k) {
          t1.push_back({B(k), 1.0});
          t2.push_back({B(k), e});
          t3.push_back({B(k), 1.0});
          t4.push_back({B(k), e});
          t3.push_back({vp(ix.Zc[i][j][k]), M});
          t3.push_back({vp(ix.Zs[i][j][k]), M});
          t4.push_back({vp(ix.Zc[i][j][k]), M});
          t4.push_back({vp(ix.Zs[i][j][k]), M});
        }
        add("B_X_energy", t1, e);
        add("B_X_nonempty", t2, e);
        add("B_Z_energy", t3, e);
        add("B_Z_nonempty", t4, e);
      }

      for (int k = 0; k < K; ++k) {
        std::vector<Term> t;
        for (int a = 0; a <= k; ++a) t.push_back({beta(a, 0), 1.0});
        t.push_back({B(k), static_cast<double>(k + 1)});
        add("beta_empty_prefix", t, static_cast<double>(k + 1));
      }
      for (int k = 0; k + 1 < K; ++k) {
        std::vector<Term> t{{B(k), -static_cast<double>(K - 1 - k)}};
        for (int a = k + 1; a < K; ++a) t.push_back({beta(a, n - 1), 1.0});
        add("beta_full_suffix", t, 0.0);
      }
      for (int k = 0; k < K; ++k) add("beta_empty", {{beta(k, 0), 1.0}, {B(k), 1.0}}, 1.0);
      for (int k = 0; k + 1 < K; ++k)
        add("beta_full_next", {{beta(k + 1, n - 1), 1.0}, {B(k), -1.0}}, 0.0);
    }

  // Loaded consists leave the origin with a battery. Used as an equality.
  for (int j = 0; j < nj; ++j)
    for (int k = 0; k < inst.trains[j].consists; ++k)
      add("Y_B_origin", {{vp(ix.Y[j][k]), 1.0}, {vp(ix.B[0][j][k]), -1.0}}, 0.0);
  return cuts;
}

SubproblemResult solve_subproblem(const SplitModel& sm, const std::vector<double>& v,
                                  SolverBackend& backend) {
  if (v.size() != sm.v_cols.size())
    throw SplitError(fmt::format("v has {} entries, expected {}", v.size(), sm.v_cols.size()));
  auto t0 = std::chrono::steady_clock::now();
  std::vector<const SplitRow*> rows;
  for (int r : sm.sub_rows) rows.push_back(&sm.rows[r]);
  for (const auto& br : sm.bound_rows) rows.push_back(&br);

  AbstractModel sp;
  for (std::size_t q = 0; q < sm.u_cols.size(); ++q)
    sp.add_continuous(fmt::format("u{}", q), 0.0, kInf, sm.c[q]);
  std::vector<double> rhs(rows.size());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    rhs[s] = rows[s]->rhs;
    for (const auto& t : rows[s]->v_terms) rhs[s] -= t.coef * v[t.col];
    sp.add_row(fmt::format("r{}", s), rows[s]->u_terms,
               rows[s]->equality ? Sense::eq : Sense::geq, rhs[s]);
  }

  SolveLimits lim;
  lim.want_ray = true;
  SolveOutcome out = backend.solve(sp, lim);
  if (out.status == OutcomeStatus::error) {
    // Certificate mode can stall numerically; retry without it.
    lim.want_ray = false;
    out = backend.solve(sp, lim);
  }
  SubproblemResult res;
  if (out.status == OutcomeStatus::optimal) {
    const auto& pi = get_duals(out, sp);
    res.feasible = true;
    res.value = out.objective;
    res.u = out.primal;
    for (std::size_t s = 0; s < rows.size(); ++s) res.dual_value += pi[s] * rhs[s];
    if (std::abs(res.dual_value - res.value) > 1e-4 * std::max(1.0, std::abs(res.value)))
      throw SolverError(fmt::format("subproblem duality gap: primal {} dual {}", res.value,
                                    res.dual_value));
    res.cut = cut_from_multipliers(sm, rows, pi, true);
  } else if (out.status == OutcomeStatus::infeasible) {
    std::vector<double> ray;
    if (out.ray) {
      ray = *out.ray;
      res.ray_source = "backend";
    } else {
      // max (b - Dm v).y  s.t.  A'y <= 0, sum |y| <= 1, y >= 0 on >= rows.
      AbstractModel nr;
      std::vector<std::vector<Term>> by_u(sm.u_cols.size());
      std::vector<int> plus(rows.size()), minus(rows.size(), -1);
      std::vector<Term> norm;
      for (std::size_t s = 0; s < rows.size(); ++s) {
        plus[s] = nr.add_continuous(fmt::format("yp{}", s), 0.0, kInf, -rhs[s]);
        norm.push_back({plus[s], 1.0});
        for (const auto& t : rows[s]->u_terms) by_u[t.col].push_back({plus[s], t.coef});
        if (rows[s]->equality) {
          minus[s] = nr.add_continuous(fmt::format("ym{}", s), 0.0, kInf, rhs[s]);
          norm.push_back({minus[s], 1.0});
          for (const auto& t : rows[s]->u_terms) by_u[t.col].push_back({minus[s], -t.coef});
        }
      }
      for (std::size_t q = 0; q < by_u.size(); ++q)
        if (!by_u[q].empty()) nr.add_row(fmt::format("u{}", q), by_u[q], Sense::leq, 0.0);
      nr.add_row("norm", norm, Sense::leq, 1.0);
      SolveOutcome ro = backend.solve(nr, SolveLimits{});
      if (ro.status != OutcomeStatus::optimal || -ro.objective <= 1e-9)
        throw SolverError("subproblem infeasible but no separating ray found: " + ro.message);
      ray.assign(rows.size(), 0.0);
      for (std::size_t s = 0; s < rows.size(); ++s)
        ray[s] = ro.primal[plus[s]] - (minus[s] >= 0 ? ro.primal[minus[s]] : 0.0);
      res.ray_source = "normalized";
    }
    res.cut = cut_from_multipliers(sm, rows, ray, false);
  } else {
    throw SolverError("subproblem ended with status " + to_string(out.status) + ": " +
                      out.message);
  }
  res.seconds = elapsed_since(t0);
  return res;
}

namespace {

void add_cut_row(AbstractModel& master, const Cut& c, std::size_t id) {
  auto terms = c.v_terms;
  if (c.w_coef != 0.0) terms.push_back({static_cast<int>(master.num_columns()) - 1, c.w_coef});
  master.add_row(fmt::format("cut_{}", id), terms, Sense::geq, c.rhs);
}

}  // namespace

AbstractModel build_rmp(const PlaModel& pla, const SplitModel& sm,
                        const std::vector<Cut>& static_cuts, const std::vector<Cut>& pool) {
  AbstractModel master;
  for (std::size_t p = 0; p < sm.v_cols.size(); ++p) {
    const Column& c = pla.model.columns()[sm.v_cols[p]];
    master.add_column(c.name, c.kind, c.lower, c.upper, c.cost);
  }
  bool has_optimality = std::any_of(pool.begin(), pool.end(),
                                    [](const Cut& c) { return c.w_coef != 0.0; });
  master.add_continuous("w", has_optimality ? -kInf : -1e7, kInf, 1.0);
  master.objective_offset = sm.offset;
  for (int r : sm.master_rows) {
    const auto& row = sm.rows[r];
    master.add_row(pla.model.rows()[r].name, row.v_terms,
                   row.equality ? Sense::eq : Sense::geq, row.rhs);
  }
  for (std::size_t q = 0; q < static_cuts.size(); ++q) {
    const Cut& c = static_cuts[q];
    master.add_row(fmt::format("{}_{}", c.kind, q), c.v_terms,
                   c.kind == "Y_B_origin" ? Sense::eq : Sense::geq, c.rhs);
  }
  for (std::size_t q = 0; q < pool.size(); ++q) add_cut_row(master, pool[q], q);
  return master;
}

BendersRun run_benders(const Instance& inst, const SolveConfig& cfg, SolverBackend& backend,
                       const BendersOptions& options) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  auto remaining = [&] { return cfg.time_limit_seconds - elapsed_since(t0); };

  PlaModel pla = build_model(inst, cfg);
  SplitModel sm = split_model(pla);
  const std::size_t nv = sm.v_cols.size();
  BendersRun run;
  if (options.extra_cuts) run.static_cuts = extra_feasibility_cuts(pla, sm, inst, cfg);

  Solution& sol = run.solution;
  sol = Solution::empty_for(inst);
  sol.algorithm = "bd";

  // Initial incumbent with every station and loaded consist enabled.
  std::vector<double> best_v(nv);
  {
    PlaModel all = pla;
    for (int x : all.index.X)
      if (x >= 0) all.model.fix(x, 1.0);
    for (const auto& row : all.index.Y)
      for (int y : row)
        if (y >= 0) all.model.fix(y, 1.0);
    SolveLimits lim;
    lim.first_feasible = true;
    lim.seed = cfg.seed;
    lim.seconds = std::max(1.0, remaining());
    SolveOutcome init = backend.solve(all.model, lim);
    if (!init.has_primal()) {
      sol.status = init.status == OutcomeStatus::infeasible ? SolveStatus::infeasible
                                                            : SolveStatus::error;
      sol.log["note"] = "no initial incumbent with every station deployed";
      sol.wall_seconds = elapsed_since(t0);
      return run;
    }
    for (std::size_t p = 0; p < nv; ++p) best_v[p] = std::round(init.primal[sm.v_cols[p]]);
    sol.log["initial_objective"] = init.objective;
  }
  std::vector<double> best_u;
  double lower = -kInf, upper = kInf;

  AbstractModel master = build_rmp(pla, sm, run.static_cuts, {});
  const int w = static_cast<int>(nv);
  int optimality_cuts = 0, feasibility_cuts = 0;
  auto add_cut = [&](const Cut& c) {
    add_cut_row(master, c, run.cuts.size());
    run.cuts.push_back(c);
    if (c.w_coef != 0.0) {
      if (optimality_cuts++ == 0) master.set_bounds(w, -kInf, kInf);
    } else {
      ++feasibility_cuts;
    }
  };
  std::set<std::vector<double>> seen;
  auto evaluate = [&](const std::vector<double>& v, double w_hat, int iter,
                      double rmp_seconds) {
    SubproblemResult sp = solve_subproblem(sm, v, backend);
    add_cut(sp.cut);
    if (sp.feasible) {
      double fv = sm.offset;
      for (std::size_t p = 0; p < nv; ++p) fv += sm.f[p] * v[p];
      if (fv + sp.value < upper) {
        upper = fv + sp.value;
        best_v = v;
        best_u = sp.u;
      }
    }
    BendersIteration h{iter, lower, upper, sp.cut.kind, 0.0, false, rmp_seconds, sp.seconds,
                       elapsed_since(t0)};
    h.cut_violation = -sp.cut.slack(v, w_hat);
    h.repeated_point = !seen.insert(v).second;
    run.history.push_back(h);
    if (options.on_iteration) options.on_iteration(run.history.back());
  };

  evaluate(best_v, 0.0, 0, 0.0);
  std::string stop = "gap";
  int iter = 0;
  std::vector<double> last_v;
  while (true) {
    if (upper < kInf && lower > -kInf &&
        (upper - lower) / std::max(std::abs(upper), 1e-9) <= cfg.benders_gap)
      break;
    if (iter >= cfg.max_benders_iterations) { stop = "iteration limit"; break; }
    if (remaining() <= 0) { stop = "time limit"; break; }
    ++iter;

    SolveLimits lim;
    lim.gap = cfg.rmp_gap;
    lim.seed = cfg.seed;
    lim.seconds = std::max(0.5, std::min(cfg.rmp_time_limit_seconds, remaining()));
    if (!best_u.empty()) {
      std::vector<double> start = best_v;
      double wstart = -kInf;
      for (const Cut& c : run.cuts)
        if (c.w_coef != 0.0) wstart = std::max(wstart, -c.slack(best_v, 0.0) / c.w_coef);
      start.push_back(wstart);
      lim.start = std::move(start);
    }
    SolveOutcome rmp = backend.solve(master, lim);
    if (rmp.status == OutcomeStatus::infeasible) {
      stop = "master infeasible";
      if (best_u.empty()) sol.status = SolveStatus::infeasible;
      break;
    }
    if (!rmp.has_primal()) { stop = "master without incumbent: " + rmp.message; break; }
    lower = std::max(lower, std::min(rmp.bound, rmp.objective));
    std::vector<double> v(nv);
    for (std::size_t p = 0; p < nv; ++p) v[p] = std::round(rmp.primal[p]);
    if (upper < kInf && (upper - lower) / std::max(std::abs(upper), 1e-9) <= cfg.benders_gap) {
      run.history.push_back(
          {iter, lower, upper, "", 0.0, false, rmp.wall_seconds, 0.0, elapsed_since(t0)});
      break;
    }
    if (v == last_v && run.cuts.back().slack(v, rmp.primal[w]) >= -1e-6) {
      // The master keeps proposing a point its cuts already price correctly;
      // remaining gap is the master's own tolerance.
      stop = "stalled";
      run.history.push_back(
          {iter, lower, upper, "", 0.0, false, rmp.wall_seconds, 0.0, elapsed_since(t0)});
      break;
    }
    last_v = v;
    evaluate(v, rmp.primal[w], iter, rmp.wall_seconds);
  }

  sol.log["stop"] = stop;
  sol.log["iterations"] = iter;
  sol.log["optimality_cuts"] = optimality_cuts;
  sol.log["feasibility_cuts"] = feasibility_cuts;
  sol.log["static_cuts"] = run.static_cuts.size();
  sol.log["backend"] = backend.name();
  if (!best_u.empty()) {
    std::vector<double> full(pla.model.num_columns(), 0.0);
    for (std::size_t p = 0; p < nv; ++p) full[sm.v_cols[p]] = best_v[p];
    for (std::size_t q = 0; q < sm.u_cols.size(); ++q) full[sm.u_cols[q]] = best_u[q];
    nlohmann::json keep = sol.log;
    sol = decode_solution(full, pla, inst);
    sol.log = keep;
    sol.algorithm = "bd";
    sol.objective_value = upper;
    sol.bound = lower;
    sol.gap = lower > -kInf ? (upper - lower) / std::max(std::abs(upper), 1e-9) : kInf;
    sol.status = sol.gap <= cfg.benders_gap ? SolveStatus::optimal : SolveStatus::feasible_limit;
  } else if (sol.status != SolveStatus::infeasible) {
    sol.status = SolveStatus::error;
  }
  sol.wall_seconds = elapsed_since(t0);
  return run;
}

void write_convergence_csv(const std::vector<BendersIteration>& history,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iteration,lower,upper,gap,cut,cut_violation,repeated_point,rmp_seconds,sp_seconds,"
         "elapsed\n";
  for (const auto& h : history) {
    double gap = (std::isfinite(h.lower) && std::isfinite(h.upper))
                     ? (h.upper - h.lower) / std::max(std::abs(h.upper), 1e-9)
                     : kInf;
    out << fmt::format("{},{},{},{},{},{:.6g},{},{:.4f},{:.4f},{:.3f}\n", h.iteration, h.lower,
                       h.upper, gap, h.cut, h.cut_violation, h.repeated_point ? 1 : 0,
                       h.rmp_seconds, h.sp_seconds, h.elapsed);
  }
}

}  // namespace railvolt
