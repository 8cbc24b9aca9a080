#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "railvolt/domain.hpp"
#include "railvolt/io.hpp"
#include "support.hpp"

using namespace railvolt;
using doctest::Approx;

TEST_CASE("charge rate is linear in soc") {
  CHECK(charge_rate_at_soc(0.0, 0.4) == Approx(0.4));
  CHECK(charge_rate_at_soc(1.0, 0.4) == Approx(0.0));
  CHECK(charge_rate_at_soc(0.5, 0.4) == Approx(0.2));
  CHECK_THROWS_AS(charge_rate_at_soc(1.1, 0.4), DomainError);
  CHECK_THROWS_AS(charge_rate_at_soc(0.5, 1.0), DomainError);
  CHECK_THROWS_AS(charge_rate_at_soc(0.5, 0.0), DomainError);
}

TEST_CASE("soc after charging matches the hourly recursion") {
  CHECK(soc_after_charging(0.0, 0.0, 0.4) == Approx(0.0));
  CHECK(soc_after_charging(0.0, 1.0, 0.4) == Approx(0.4));
  // two steps of s <- s + r0 (1 - s)
  double s = 0.0;
  for (int h = 0; h < 2; ++h) s += charge_rate_at_soc(s, 0.4);
  CHECK(s == Approx(0.64));
  CHECK(soc_after_charging(0.0, 2.0, 0.4) == Approx(s).epsilon(1e-12));
  for (double start : {0.0, 0.13, 0.5, 0.9}) {
    double r = start;
    for (int h = 1; h <= 6; ++h) {
      r += charge_rate_at_soc(r, 0.4);
      CHECK(soc_after_charging(start, h, 0.4) == Approx(r).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(soc_after_charging(0.2, -0.1, 0.4), DomainError);
}

TEST_CASE("charge time inverts the curve") {
  CHECK(charge_time_for_target(0.3, 0.3, 0.4) == 0.0);
  CHECK(charge_time_for_target(0.0, 0.64, 0.4) == Approx(2.0));
  CHECK_THROWS_AS(charge_time_for_target(0.0, 1.0, 0.4), DomainError);
  CHECK_THROWS_AS(charge_time_for_target(0.5, 0.4, 0.4), DomainError);
}

TEST_CASE("physics properties over random samples") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 2000; ++n) {
    double r0 = 0.05 + 0.9 * U(rng);
    double s = U(rng);
    double t1 = 8 * U(rng), t2 = 8 * U(rng);
    double a = soc_after_charging(s, t1, r0);
    CHECK(a < 1.0);
    CHECK(a >= s);
    CHECK(soc_after_charging(a, t2, r0) ==
          Approx(soc_after_charging(s, t1 + t2, r0)).epsilon(1e-9));
    CHECK(soc_after_charging(s, t1 + 0.01, r0) >= a);
    double target = s + (0.999 - s) * U(rng);
    if (target >= s) {
      double t = charge_time_for_target(s, target, r0);
      CHECK(std::abs(soc_after_charging(s, t, r0) - target) < 1e-9);
    }
  }
}

// The hourly recursion's rate r0 (1 - s) is a per-step increment; the
// continuous curve through its integer points moves at -ln(1 - r0) (1 - s).
TEST_CASE("instantaneous slope of the continuous curve") {
  const double r0 = 0.4, h = 1e-6;
  for (double s : {0.0, 0.25, 0.6}) {
    for (double t : {0.0, 0.7, 3.0}) {
      double soc = soc_after_charging(s, t, r0);
      double fd = (soc_after_charging(s, t + h, r0) - soc) / h;
      CHECK(fd == Approx(-std::log(1 - r0) * (1 - soc)).epsilon(1e-4));
      CHECK(fd / charge_rate_at_soc(soc, r0) == Approx(-std::log(0.6) / 0.4).epsilon(1e-4));
    }
  }
}

TEST_CASE("illustrative instance is valid") {
  Instance inst = testing::illustrative();
  CHECK(inst.num_stations() == 6);
  CHECK(inst.num_trains() == 2);
  CHECK(validate_instance(inst).empty());
  CHECK(inst.energy[0][0][1] == Approx(1.73));
  CHECK(inst.travel_time[0][0][1] == Approx(7.0));
}

TEST_CASE("instance violations are reported with indices") {
  Instance inst = testing::illustrative();
  SUBCASE("negative wait") {
    inst.wait_time[2][1] = -0.5;
    auto v = validate_instance(inst);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "wait_time");
    CHECK(v[0].station == 2);
    CHECK(v[0].train == 1);
  }
  SUBCASE("leg sum inconsistent") {
    inst.energy[0][0][5] += 1.0;
    auto v = validate_instance(inst);
    REQUIRE(!v.empty());
    CHECK(v[0].kind == "energy_additivity");
  }
  SUBCASE("wrong shape") {
    inst.fixed_cost.pop_back();
    CHECK(!validate_instance(inst).empty());
  }
  SUBCASE("interior station without chargers") {
    inst.chargers[3] = 0;
    auto v = validate_instance(inst);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "chargers");
  }
}

TEST_CASE("solve config validation") {
  SolveConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.mip_gap = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.soc_breakpoints = 1;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.alpha_delay = -1;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("status names round-trip") {
  for (auto s : {SolveStatus::optimal, SolveStatus::feasible_limit, SolveStatus::infeasible,
                 SolveStatus::error})
    CHECK(solve_status_from_string(to_string(s)) == s);
  CHECK_THROWS(solve_status_from_string("maybe"));
}

TEST_CASE("instance json round-trip") {
  Instance a = testing::illustrative();
  Instance b = instance_from_json(instance_to_json(a));
  CHECK(instance_to_json(a) == instance_to_json(b));
  nlohmann::json bad = instance_to_json(a);
  bad.erase("energy");
  CHECK_THROWS_AS(instance_from_json(bad), FormatError);
}

TEST_CASE("solution json round-trip") {
  Instance inst = testing::illustrative();
  Solution s = load_solution(inst, testing::source_path("instances/table2_schedule.json"));
  CHECK(s.deployed == std::vector<bool>{false, true, true, false, true, false});
  CHECK(s.charge_hours[4][1][0] == Approx(1.394));
  Solution r = solution_from_json(inst, solution_to_json(inst, s));
  CHECK(solution_to_json(inst, r) == solution_to_json(inst, s));
}
