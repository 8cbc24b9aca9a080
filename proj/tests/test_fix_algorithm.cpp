#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "railvolt/fix_algorithm.hpp"
#include "railvolt/pla_model.hpp"
#include "railvolt/validator.hpp"
#include "support.hpp"

using namespace railvolt;
using doctest::Approx;

TEST_CASE("supply and demand of the illustrative instance") {
  Instance inst = testing::illustrative();
  SupplyDemand sd = compute_supply_demand(inst);
  // leg sums: 1.73+1.67+1.00+1.83+2.27 and 1.41+1.56+1.38+1.37+1.76
  CHECK(sd.demand == Approx(8.50 + 7.48));
  // end-to-end entries 8.49 and 7.48 differ from the leg sums by rounding only
  CHECK(std::abs(sd.demand - (inst.energy[0][0][5] + inst.energy[1][0][5])) <= 0.011);
  CHECK(sd.initial == Approx(6));
  CHECK(sd.delta == Approx(sd.demand - 6));
}

TEST_CASE("benefit of station 1 with nothing deployed") {
  Instance inst = testing::illustrative();
  std::vector<bool> none(6, false);
  Benefit b = compute_benefit(1, none, inst, {});
  CHECK(b.max_supply == Approx(8 + 2 * 7));
  CHECK(b.e_up == Approx(1.73 + 1.41));
  CHECK(b.e_down == Approx(6.76 + 6.07));
  CHECK(b.value == Approx(22 + 12.83 + 3.14 - 21.72 + 3 * (0 + 0.28)));
  CHECK(b.value == Approx(17.09));
  CHECK_THROWS_AS(compute_benefit(0, none, inst, {}), DomainError);
}

TEST_CASE("neighbour energies shrink as more stations deploy") {
  Instance inst = testing::illustrative();
  for (int i = 1; i <= 4; ++i)
    for (int mask = 0; mask < 16; ++mask) {
      std::vector<bool> d(6, false), more(6, false);
      for (int b = 0; b < 4; ++b) d[b + 1] = mask >> b & 1;
      for (int extra = 1; extra <= 4; ++extra) {
        if (extra == i) continue;
        more = d;
        more[extra] = true;
        Benefit a = compute_benefit(i, d, inst, {});
        Benefit b = compute_benefit(i, more, inst, {});
        CHECK(b.e_up <= a.e_up + 1e-12);
        CHECK(b.e_down <= a.e_down + 1e-12);
      }
    }
}

TEST_CASE("initial deployment on the illustrative instance") {
  Instance inst = testing::illustrative();
  FixState st = initialize_deployment(inst, {});
  std::vector<bool> none(6, false);
  int best = 1;
  for (int i = 2; i <= 4; ++i)
    if (compute_benefit(i, none, inst, {}).value > compute_benefit(best, none, inst, {}).value)
      best = i;
  REQUIRE(!st.order.empty());
  CHECK(st.order.front() == best);
  CHECK(st.supplied >= st.need.delta);
  // one station already covers the deficit
  CHECK(st.order.size() == 1);
}

TEST_CASE("zero deficit deploys nothing and solves without stations") {
  Instance inst = testing::tiny_instance();
  for (auto& row : inst.energy[0])
    for (double& e : row) e *= 0.5;
  FixState st = initialize_deployment(inst, {});
  CHECK(st.order.empty());
  auto be = make_backend();
  Solution s = run_fix_algorithm(inst, {}, *be);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.deployed == std::vector<bool>(4, false));
  CHECK(s.objective_value == Approx(0.0).epsilon(1e-6));
}

TEST_CASE("all stations together cannot cover the deficit") {
  Instance inst = testing::tiny_instance();
  for (auto& row : inst.energy[0])
    for (double& e : row) e *= 10;
  CHECK_THROWS_AS(initialize_deployment(inst, {}), IrrecoverableInfeasibility);
}

TEST_CASE("ties are broken by the seed") {
  // B's fixed cost chosen so both candidates score 5 + 2.4 - 20 + 0.9.
  Instance inst = testing::tiny_instance();
  inst.fixed_cost[2] = 17.1;
  std::vector<bool> none(4, false);
  REQUIRE(compute_benefit(1, none, inst, {}).value ==
          Approx(compute_benefit(2, none, inst, {}).value).epsilon(1e-12));
  std::set<int> picks;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    SolveConfig cfg;
    cfg.seed = seed;
    FixState st = initialize_deployment(inst, cfg);
    CHECK(st.order.size() == 1);
    picks.insert(st.order.front());
    FixState again = initialize_deployment(inst, cfg);
    CHECK(again.order == st.order);
  }
  CHECK(picks == std::set<int>{1, 2});
}

TEST_CASE("fix algorithm on the tiny instance") {
  Instance inst = testing::tiny_instance();
  SolveConfig cfg;
  auto be = make_backend();
  Solution fa = run_fix_algorithm(inst, cfg, *be);
  REQUIRE(fa.status == SolveStatus::optimal);
  CHECK(fa.algorithm == "fa");
  CHECK(fa.deployed == std::vector<bool>{false, true, false, false});
  Solution pla = solve_pla(inst, cfg, *be);
  CHECK(fa.objective_value >= pla.objective_value * (1 - cfg.mip_gap) - 1e-6);
  CHECK(simulate_schedule(inst, fa).ok);
  REQUIRE(fa.log.contains("trace"));
  CHECK(fa.log["trace"][0]["event"] == "deploy");
}

TEST_CASE("infeasible rounds add the next station") {
  // B scores best but the train cannot reach it on two batteries (1.2 + 0.9),
  // so the first restricted round is infeasible and A follows.
  Instance inst = testing::tiny_instance({1.2, 0.9, 0.7});
  inst.fixed_cost[2] = 5;
  std::vector<bool> none(4, false);
  REQUIRE(compute_benefit(2, none, inst, {}).value > compute_benefit(1, none, inst, {}).value);
  auto be = make_backend();
  Solution fa = run_fix_algorithm(inst, {}, *be);
  REQUIRE(fa.status == SolveStatus::optimal);
  CHECK(fa.deployed == std::vector<bool>{false, true, true, false});
  std::vector<int> order;
  std::vector<std::string> statuses;
  for (const auto& e : fa.log["trace"]) {
    if (e["event"] == "deploy") order.push_back(e["station"].get<int>());
    if (e["event"] == "solve") statuses.push_back(e["status"].get<std::string>());
  }
  CHECK(order == std::vector<int>{2, 1});
  CHECK(statuses == std::vector<std::string>{"infeasible", "optimal"});
  CHECK(fa.log["rounds"].get<int>() == 2);
}
