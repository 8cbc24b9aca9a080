#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "railvolt/pla_model.hpp"
#include "railvolt/validator.hpp"
#include "support.hpp"

using namespace railvolt;
using doctest::Approx;

TEST_CASE("grid values of the remaining-capacity surface") {
  PlaGrid g = build_pla_grid(10, 10, 10.0, 0.4);
  REQUIRE(g.s.size() == 11);
  REQUIRE(g.t.size() == 11);
  for (int v = 0; v <= 10; ++v) CHECK(g.g[10][v] == Approx(0.0));
  CHECK(g.g[0][0] == Approx(1.0));
  CHECK(g.g[5][1] == Approx(0.5 * 0.6));
  // slopes take the flatter (less negative is not required) of the two edges
  for (int u = 0; u < 10; ++u)
    for (int v = 0; v < 10; ++v) {
      CHECK(g.w[u][v] <= g.g[u][v + 1] - g.g[u][v] + 1e-15);
      CHECK(g.w[u][v] <= g.g[u + 1][v + 1] - g.g[u + 1][v] + 1e-15);
    }
  CHECK_THROWS_AS(build_pla_grid(1, 10, 10, 0.4), DomainError);
}

TEST_CASE("rectangle surface stays within 0.05 of the exact surface") {
  PlaGrid g = build_pla_grid(10, 10, 10.0, 0.4);
  double bound = pla_surface_error(g);
  CHECK(bound <= 0.05);
  CHECK(bound > 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> S(0.0, 1.0), T(0.0, 10.0);
  double worst = 0.0;
  for (int n = 0; n < 20000; ++n) {
    double s = S(rng), t = T(rng);
    worst = std::max(worst, std::abs(g.approx(s, t) - (1 - s) * std::pow(0.6, t)));
  }
  CHECK(worst <= bound + 1e-9);
  CHECK(worst >= 0.5 * bound);
  // exact at the grid nodes
  for (int u = 0; u < 10; ++u)
    for (int v = 0; v < 10; ++v) CHECK(g.approx(g.s[u], g.t[v]) == Approx(g.g[u][v]));
}

TEST_CASE("model census on the illustrative instance") {
  Instance inst = testing::illustrative();
  SolveConfig cfg;
  PlaModel a = build_model(inst, cfg);
  int x = 0;
  for (int c : a.index.X) x += c >= 0;
  CHECK(x == 4);
  std::map<std::string, int> count;
  for (const auto& s : a.index.symbol) ++count[s];
  const int triples = 6 * 2 * 3;
  CHECK(count["beta"] == triples * 10);
  CHECK(count["gamma"] == triples * 11);
  CHECK(count["tau"] == triples * 10);
  CHECK(count["eta"] == triples * 11);
  CHECK(count["F"] == triples);
  CHECK(count["Y"] == 6);
  CHECK(count["D"] == 12);
  for (std::size_t c = 0; c < a.model.num_columns(); ++c) {
    bool binary = a.model.columns()[c].kind == ColumnKind::binary;
    const auto& s = a.index.symbol[c];
    bool expect = s == "X" || s == "Y" || s == "Zc" || s == "Zs" || s == "B" || s == "beta" ||
                  s == "tau";
    CHECK(binary == expect);
  }
  CHECK_NOTHROW(a.model.validate());
  PlaModel b = build_model(inst, cfg);
  REQUIRE(a.model.num_rows() == b.model.num_rows());
  bool same = true;
  for (std::size_t r = 0; r < a.model.num_rows(); ++r) {
    const auto& ra = a.model.rows()[r];
    const auto& rb = b.model.rows()[r];
    same = same && ra.name == rb.name && ra.rhs == rb.rhs && ra.terms.size() == rb.terms.size();
    for (std::size_t t = 0; same && t < ra.terms.size(); ++t)
      same = ra.terms[t].col == rb.terms[t].col && ra.terms[t].coef == rb.terms[t].coef;
  }
  CHECK(same);
  CHECK(a.index.row_family.size() == a.model.num_rows());
}

TEST_CASE("build rejects invalid input") {
  Instance inst = testing::illustrative();
  inst.wait_time[1][0] = -1;
  CHECK_THROWS_AS(build_model(inst, {}), DomainError);
  SolveConfig cfg;
  cfg.soc_breakpoints = 0;
  CHECK_THROWS_AS(build_model(testing::illustrative(), cfg), DomainError);
}

TEST_CASE("objective of the published schedule") {
  Instance inst = testing::illustrative();
  Solution s = load_solution(inst, testing::source_path("instances/table2_schedule.json"));
  double waits = 0.0, dwell = 0.0;
  for (std::size_t i = 0; i < inst.num_stations(); ++i)
    for (std::size_t j = 0; j < inst.num_trains(); ++j) {
      waits += inst.wait_time[i][j];
      dwell += s.depart_time[i][j] - s.arrive_time[i][j];
    }
  double setup = 21.72 + 21.47 + 30.0;
  CHECK(objective_of(inst, {}, s) == Approx(setup + 3 * (dwell - waits)));
}

TEST_CASE("decode rounds, clamps and rejects short vectors") {
  Instance inst = testing::tiny_instance();
  SolveConfig cfg;
  PlaModel pla = build_model(inst, cfg);
  auto be = make_backend();
  SolveOutcome out = be->solve(pla.model, {});
  REQUIRE(out.status == OutcomeStatus::optimal);
  std::vector<double> p = out.primal;
  int xa = pla.index.X[1];
  p[xa] = p[xa] > 0.5 ? 0.9999 : 0.0001;
  Solution d = decode_solution(p, pla, inst);
  CHECK(d.deployed[1] == (out.primal[xa] > 0.5));
  int sa = pla.index.Sdep[0][0][0];
  p[sa] = 1.0000004;
  d = decode_solution(p, pla, inst);
  CHECK(d.soc_depart[0][0][0] == 1.0);
  p.pop_back();
  CHECK_THROWS_AS(decode_solution(p, pla, inst), DecodeError);
}

TEST_CASE("tiny instance solves and validates") {
  Instance inst = testing::tiny_instance();
  SolveConfig cfg;
  auto be = make_backend();
  Solution s = solve_pla(inst, cfg, *be);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.algorithm == "pla");
  CHECK(objective_of(inst, cfg, s) == Approx(s.objective_value).epsilon(1e-6));
  ValidationReport r = simulate_schedule(inst, s);
  for (const auto& v : r.violations) MESSAGE(v.kind << ": " << v.message);
  CHECK(r.ok);
  // encoding the decoded solution reproduces a feasible point with the same cost
  PlaModel pla = build_model(inst, cfg);
  auto x = encode_solution(s, pla, inst);
  CHECK(pla.model.objective_at(x) == Approx(s.objective_value).epsilon(1e-6));
  CHECK(pla.model.max_violation(x) < 1e-5);
}

TEST_CASE("unsatisfiable demand is reported as infeasible") {
  Instance inst;
  inst.stations = {"Origin", "A", "Destination"};
  inst.trains = {{"T1", 1, 1}};
  inst.fixed_cost = {0, 10, 0};
  inst.chargers = {0, 1, 0};
  inst.full_batteries = {0, 1, 0};
  Matrix e = {{0, 3, 3.5}, {3, 0, 0.5}, {3.5, 0.5, 0}};
  Matrix t = {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
  inst.energy = {e};
  inst.travel_time = {t};
  inst.wait_time = {{0}, {0}, {0}};
  auto be = make_backend();
  Solution s = solve_pla(inst, {}, *be);
  CHECK(s.status == SolveStatus::infeasible);
}
