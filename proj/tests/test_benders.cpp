#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "railvolt/benders.hpp"
#include "railvolt/pla_model.hpp"
#include "railvolt/validator.hpp"
#include "support.hpp"

using namespace railvolt;
using doctest::Approx;

namespace {

std::vector<double> v_part(const SplitModel& sm, const std::vector<double>& full) {
  std::vector<double> v;
  for (int c : sm.v_cols) v.push_back(std::round(full[c]));
  return v;
}

}  // namespace

TEST_CASE("split partitions columns and rows") {
  Instance inst = testing::illustrative();
  PlaModel pla = build_model(inst, {});
  SplitModel sm = split_model(pla);
  CHECK(sm.v_cols.size() + sm.u_cols.size() == pla.model.num_columns());
  for (int c : pla.index.X)
    if (c >= 0) CHECK(sm.position[c] >= 0);
  for (int c : sm.v_cols) CHECK(pla.model.columns()[c].kind == ColumnKind::binary);
  for (const auto& row : pla.index.D)
    for (int c : row) {
      bool in_u = false;
      for (int u : sm.u_cols) in_u = in_u || u == c;
      CHECK(in_u);
    }
  CHECK(sm.rows.size() == pla.model.num_rows());
  CHECK(sm.master_rows.size() + sm.sub_rows.size() == pla.model.num_rows());

  // Reassembly: every split row is the original row, negated when it was "<=".
  bool same = true;
  for (std::size_t r = 0; r < sm.rows.size() && same; ++r) {
    const Row& orig = pla.model.rows()[r];
    const double sign = orig.sense == Sense::leq ? -1.0 : 1.0;
    std::map<int, double> back;
    for (const auto& t : sm.rows[r].u_terms) back[sm.u_cols[t.col]] += t.coef;
    for (const auto& t : sm.rows[r].v_terms) back[sm.v_cols[t.col]] += t.coef;
    same = back.size() == orig.terms.size() && sm.rows[r].rhs == sign * orig.rhs &&
           sm.rows[r].equality == (orig.sense == Sense::eq);
    for (const auto& t : orig.terms) same = same && back[t.col] == sign * t.coef;
  }
  CHECK(same);
}

TEST_CASE("unknown column class is rejected") {
  PlaModel pla = build_model(testing::tiny_instance(), {});
  pla.index.symbol[0] = "mystery";
  CHECK_THROWS_AS(split_model(pla), SplitError);
  PlaModel pla2 = build_model(testing::tiny_instance(), {});
  pla2.model.set_bounds(pla2.index.D[0][0], -1, kInf);
  CHECK_THROWS_AS(split_model(pla2), SplitError);
}

TEST_CASE("reassembled model solves like the original") {
  Instance inst = testing::tiny_instance();
  SolveConfig cfg;
  PlaModel pla = build_model(inst, cfg);
  SplitModel sm = split_model(pla);
  AbstractModel again;
  for (std::size_t c = 0; c < pla.model.num_columns(); ++c) {
    const Column& col = pla.model.columns()[c];
    again.add_column(col.name, col.kind, col.lower,
                     col.kind == ColumnKind::binary ? col.upper : kInf, col.cost);
  }
  again.objective_offset = sm.offset;
  auto add = [&](const SplitRow& r, const std::string& name) {
    std::vector<Term> t;
    for (const auto& x : r.u_terms) t.push_back({sm.u_cols[x.col], x.coef});
    for (const auto& x : r.v_terms) t.push_back({sm.v_cols[x.col], x.coef});
    again.add_row(name, t, r.equality ? Sense::eq : Sense::geq, r.rhs);
  };
  for (std::size_t r = 0; r < sm.rows.size(); ++r) add(sm.rows[r], "r" + std::to_string(r));
  for (std::size_t r = 0; r < sm.bound_rows.size(); ++r)
    add(sm.bound_rows[r], "b" + std::to_string(r));
  auto be = make_backend();
  SolveLimits lim;
  lim.gap = cfg.mip_gap;
  SolveOutcome a = be->solve(pla.model, lim);
  SolveOutcome b = be->solve(again, lim);
  REQUIRE(a.status == OutcomeStatus::optimal);
  REQUIRE(b.status == OutcomeStatus::optimal);
  CHECK(b.objective == Approx(a.objective).epsilon(cfg.mip_gap));
}

TEST_CASE("subproblem at a feasible point returns an extreme point") {
  Instance inst = testing::tiny_instance();
  PlaModel pla = build_model(inst, {});
  SplitModel sm = split_model(pla);
  auto be = make_backend();
  SolveOutcome full = be->solve(pla.model, {});
  REQUIRE(full.status == OutcomeStatus::optimal);
  auto v = v_part(sm, full.primal);
  SubproblemResult sp = solve_subproblem(sm, v, *be);
  REQUIRE(sp.feasible);
  double cu = 0.0;
  for (std::size_t q = 0; q < sm.u_cols.size(); ++q) cu += sm.c[q] * full.primal[sm.u_cols[q]];
  // The MIP's continuous part is feasible for the subproblem, so SP <= it.
  CHECK(sp.value <= cu + 1e-6);
  CHECK(sp.dual_value == Approx(sp.value).epsilon(1e-4));
  CHECK(sp.cut.kind == "optimality");
  CHECK(sp.cut.slack(v, sp.value) == Approx(0.0).epsilon(1e-6));
}

TEST_CASE("subproblem with nothing deployed returns a ray") {
  Instance inst = testing::illustrative();
  PlaModel pla = build_model(inst, {});
  SplitModel sm = split_model(pla);
  std::vector<double> v(sm.v_cols.size(), 0.0);
  auto be = make_backend();
  SubproblemResult sp = solve_subproblem(sm, v, *be);
  CHECK_FALSE(sp.feasible);
  CHECK(sp.cut.kind == "feasibility");
  CHECK(sp.cut.w_coef == 0.0);
  CHECK(sp.cut.slack(v) < -1e-9);
  CHECK(!sp.ray_source.empty());
}

TEST_CASE("static cut census") {
  Instance inst = testing::illustrative();
  PlaModel pla = build_model(inst, {});
  SplitModel sm = split_model(pla);
  auto cuts = extra_feasibility_cuts(pla, sm, inst, {});
  // per (i, j): 7K - 5 ordering/beta rows; per (i < last, j): 4 linkage rows;
  // per (j, k): one origin row. 6*2*16 + 5*2*4 + 6.
  CHECK(cuts.size() == 238);
  CHECK(extra_cut_count(inst) == cuts.size());
  std::map<std::string, int> fam;
  for (const auto& c : cuts) ++fam[c.kind];
  CHECK(fam["B_next"] == 6 * 2 * 2);
  CHECK(fam["Y_B_origin"] == 6);
  Instance tiny = testing::tiny_instance();
  PlaModel tp = build_model(tiny, {});
  CHECK(extra_feasibility_cuts(tp, split_model(tp), tiny, {}).size() == extra_cut_count(tiny));
}

TEST_CASE("static cuts keep feasible solutions") {
  Instance inst = testing::illustrative();
  SolveConfig cfg;
  PlaModel pla = build_model(inst, cfg);
  SplitModel sm = split_model(pla);
  auto cuts = extra_feasibility_cuts(pla, sm, inst, cfg);
  Solution t2 = load_solution(inst, testing::source_path("instances/table2_schedule.json"));
  auto v = v_part(sm, encode_solution(t2, pla, inst));
  int over = 0;
  for (const auto& c : cuts) over += c.slack(v) < -1e-9;
  CHECK(over == 0);

  Instance tiny = testing::tiny_instance();
  PlaModel tp = build_model(tiny, cfg);
  SplitModel ts = split_model(tp);
  auto be = make_backend();
  SolveOutcome full = be->solve(tp.model, {});
  REQUIRE(full.status == OutcomeStatus::optimal);
  auto tv = v_part(ts, full.primal);
  for (const auto& c : extra_feasibility_cuts(tp, ts, tiny, cfg)) CHECK(c.slack(tv) >= -1e-9);
}

TEST_CASE("master construction") {
  Instance inst = testing::tiny_instance();
  PlaModel pla = build_model(inst, {});
  SplitModel sm = split_model(pla);
  AbstractModel empty = build_rmp(pla, sm, {}, {});
  CHECK(empty.num_columns() == sm.v_cols.size() + 1);
  CHECK(empty.columns().back().lower == -1e7);
  CHECK(empty.num_rows() == sm.master_rows.size());
  Cut opt{"optimality", {{0, 1.0}}, 1.0, 3.0};
  AbstractModel one = build_rmp(pla, sm, {}, {opt});
  CHECK(one.num_rows() == empty.num_rows() + 1);
  CHECK(std::isinf(one.columns().back().lower));
  const Row& r = one.rows().back();
  bool has_w = false;
  for (const auto& t : r.terms) has_w = has_w || t.col == static_cast<int>(sm.v_cols.size());
  CHECK(has_w);
}

TEST_CASE("benders on the tiny instance") {
  Instance inst = testing::tiny_instance();
  SolveConfig cfg;
  cfg.time_limit_seconds = 120;
  auto be = make_backend();
  BendersRun run = run_benders(inst, cfg, *be);
  const Solution& s = run.solution;
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.gap <= cfg.benders_gap + 1e-9);
  Solution pla = solve_pla(inst, cfg, *be);
  CHECK(std::abs(s.objective_value - pla.objective_value) / pla.objective_value <=
        cfg.benders_gap + cfg.mip_gap);
  CHECK(simulate_schedule(inst, s).ok);
  for (std::size_t h = 1; h < run.history.size(); ++h) {
    CHECK(run.history[h].lower >= run.history[h - 1].lower - 1e-9);
    CHECK(run.history[h].upper <= run.history[h - 1].upper + 1e-9);
  }
  // every generated cut holds at the independently solved incumbent
  PlaModel model = build_model(inst, cfg);
  SplitModel sm = split_model(model);
  SolveOutcome full = be->solve(model.model, {});
  REQUIRE(full.status == OutcomeStatus::optimal);
  auto v = v_part(sm, full.primal);
  SubproblemResult at = solve_subproblem(sm, v, *be);
  REQUIRE(at.feasible);
  for (const auto& c : run.cuts) CHECK(c.slack(v, at.value) >= -1e-6);
}
