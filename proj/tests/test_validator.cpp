#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "railvolt/validator.hpp"
#include "support.hpp"

using namespace railvolt;
using doctest::Approx;

namespace {

Solution table2(const Instance& inst) {
  return load_solution(inst, testing::source_path("instances/table2_schedule.json"));
}

bool has_kind(const ValidationReport& r, const std::string& kind) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

}  // namespace

TEST_CASE("published schedule passes at PLA tolerance") {
  Instance inst = testing::illustrative();
  ValidationReport r = simulate_schedule(inst, table2(inst));
  for (const auto& v : r.violations) MESSAGE(v.kind << ": " << v.message);
  CHECK(r.ok);
  // Train 2's zero-hour charge at Station 1 is kept as printed.
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].kind == "zero_charge");
}

TEST_CASE("published schedule is not exact under strict tolerance") {
  Instance inst = testing::illustrative();
  ValidationReport r = simulate_schedule(inst, table2(inst), Tolerance::strict());
  CHECK_FALSE(r.ok);
  CHECK(has_kind(r, "soc_mismatch"));
}

TEST_CASE("metrics of the published schedule") {
  Instance inst = testing::illustrative();
  Metrics m = recompute_metrics(inst, table2(inst));
  CHECK(m.n_deployed == 3);
  CHECK(m.setup_cost == Approx(73.19));
  // delays 0.55 + 1.80 + 1.76 and 1.70 + (1.40 - 0.01) over two trains
  double waits_t2_s4 = inst.wait_time[4][1];
  double expected_delay = (0.55 + 1.80 + 1.76 + 1.70 + (1.40 - waits_t2_s4)) / 2;
  CHECK(m.avg_delay_per_train == Approx(expected_delay).epsilon(1e-9));
  CHECK(m.avg_delay_per_train == Approx(3.60).epsilon(0.01 / 3.60));
  CHECK(m.avg_charge_hours_per_train ==
        Approx((2 * 0.55125 + 0.284 + 0.2035 + 3 * 1.394) / 2));
  // nine swaps of two hours over two trains and three stations
  CHECK(m.avg_swap_hours_per_train == Approx(9 * 2.0 / 2));
  CHECK(m.avg_swap_hours_per_station == Approx(9 * 2.0 / 3));
  CHECK(m.avg_swap_hours_per_station == Approx(6.0));
}

TEST_CASE("mutations of the published schedule are caught") {
  Instance inst = testing::illustrative();
  Solution s = table2(inst);
  SUBCASE("charge and swap for one train at one station") {
    s.charge_flag[2][0][0] = true;
    s.charge_hours[2][0][0] = 0.5;
    CHECK(has_kind(simulate_schedule(inst, s), "exclusivity"));
  }
  SUBCASE("operation at an undeployed station") {
    s.swap_flag[3][0][0] = true;
    CHECK_FALSE(simulate_schedule(inst, s).ok);
  }
  SUBCASE("swap shorter than the swap time") {
    s.depart_time[2][0] = s.arrive_time[2][0] + 1.0;
    CHECK(has_kind(simulate_schedule(inst, s), "swap_time"));
  }
  SUBCASE("travel faster than the timetable") {
    s.arrive_time[3][0] -= 1.0;
    CHECK_FALSE(simulate_schedule(inst, s).ok);
  }
  SUBCASE("dropping a swap strands the train") {
    for (int k = 0; k < 3; ++k) {
      s.swap_flag[4][0][k] = false;
      s.soc_depart[4][0][k] = s.soc_arrive[4][0][k];
    }
    CHECK_FALSE(simulate_schedule(inst, s).ok);
  }
  SUBCASE("too many swaps for the battery stock") {
    inst.full_batteries[2] = 2;  // three swaps per train there
    CHECK(has_kind(simulate_schedule(inst, s), "swap_capacity"));
  }
  SUBCASE("too many simultaneous charges for the chargers") {
    inst.chargers[4] = 2;
    CHECK(has_kind(simulate_schedule(inst, s), "charger_capacity"));
  }
}

TEST_CASE("shape mismatch is an error") {
  Instance inst = testing::illustrative();
  Solution s = table2(inst);
  s.arrive_time.pop_back();
  CHECK_THROWS_AS(simulate_schedule(inst, s), ValidationError);
}

TEST_CASE("brute force on the tiny instance") {
  // Only A deployed, consist 1 charged from 0.2 until the two consists hold
  // the remaining 1.6: t >= ln(0.8 / 0.4) / ln(1 / 0.6) = 1.357 h, i.e. 1.5 h on
  // the quarter-hour grid, delay 1.5 - 0.3.
  Instance inst = testing::tiny_instance();
  BruteForceResult r = brute_force_best(inst);
  REQUIRE(r.feasible);
  CHECK(r.objective == Approx(20 + 3 * (1.5 - 0.3)));
  CHECK(r.schedule.deployed == std::vector<bool>{false, true, false, false});
  CHECK(r.schedule.charge_hours[1][0][0] == Approx(1.5));
  ValidationReport v = simulate_schedule(inst, r.schedule, Tolerance::strict());
  for (const auto& x : v.violations) MESSAGE(x.kind << ": " << x.message);
  CHECK(v.ok);
  CHECK(v.objective == Approx(r.objective));

  BruteForceGrid fine;
  fine.time_step = 0.05;
  BruteForceResult f = brute_force_best(inst, fine);
  CHECK(f.objective <= r.objective + 1e-9);
  CHECK(f.objective == Approx(20 + 3 * (1.4 - 0.3)));
}

TEST_CASE("brute force refuses oversized searches") {
  Instance inst = testing::illustrative();
  BruteForceGrid g;
  g.max_states = 1000;
  CHECK_THROWS_AS(brute_force_best(inst, g), SearchTooLarge);
}
