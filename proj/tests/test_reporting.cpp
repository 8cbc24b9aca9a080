#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "railvolt/instance_gen.hpp"
#include "railvolt/reporting.hpp"
#include "support.hpp"

using namespace railvolt;
using doctest::Approx;

TEST_CASE("incomplete beta against closed forms") {
  // I_x(2, 3) is a binomial tail: (6 + 4 + 1) / 16 at x = 1/2
  CHECK(incomplete_beta(2, 3, 0.5) == Approx(11.0 / 16.0).epsilon(1e-10));
  CHECK(incomplete_beta(1, 1, 0.3) == Approx(0.3).epsilon(1e-10));
  CHECK(incomplete_beta(3, 1, 0.4) == Approx(0.064).epsilon(1e-10));
  CHECK(incomplete_beta(2.5, 0.5, 0.9) == Approx(0.48958974456442755).epsilon(1e-8));
  CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
  for (double x = 0.05; x < 1; x += 0.1)
    CHECK(incomplete_beta(2.5, 4.0, x) + incomplete_beta(4.0, 2.5, 1 - x) == Approx(1.0));
}

TEST_CASE("student t tail against closed forms") {
  for (double t : {0.2, 1.0, 3.7}) {
    // df = 1 is Cauchy, df = 2 has an algebraic CDF
    CHECK(student_t_two_sided_p(t, 1) == Approx(1 - 2 * std::atan(t) / std::numbers::pi));
    CHECK(student_t_two_sided_p(t, 2) == Approx(1 - t / std::sqrt(2 + t * t)));
    CHECK(student_t_two_sided_p(-t, 5) == Approx(student_t_two_sided_p(t, 5)));
  }
  CHECK(student_t_two_sided_p(0.0, 9) == Approx(1.0));
  CHECK(student_t_two_sided_p(2.5, 7) == Approx(0.040992218585752874).epsilon(1e-8));
  CHECK(student_t_two_sided_p(0.3, 30) == Approx(0.7662461052843528).epsilon(1e-8));
  double prev = 1.0;
  for (double t = 0.0; t < 8; t += 0.25) {
    double p = student_t_two_sided_p(t, 6);
    CHECK(p <= prev + 1e-15);
    prev = p;
  }
}

TEST_CASE("paired t-test") {
  TTest r = paired_t_test({2, 4, 6, 8, 10}, {1, 2, 3, 4, 5});
  CHECK(r.n == 5);
  CHECK(r.mean_diff == Approx(3.0));
  CHECK(r.sd_diff == Approx(std::sqrt(2.5)));
  CHECK(r.t == Approx(4.242640687119285).epsilon(1e-10));
  CHECK(r.p == Approx(0.013235599563682695).epsilon(1e-6));
  CHECK_FALSE(r.degenerate);

  TTest q = paired_t_test({3.1, 2.9, 4.0, 3.5}, {2.0, 2.5, 3.1, 3.6});
  CHECK(q.t == Approx(2.1385712594394155).epsilon(1e-9));
  CHECK(q.p == Approx(0.12201772591924567).epsilon(1e-6));

  TTest s = paired_t_test({1, 2, 3, 4, 5}, {2, 4, 6, 8, 10});
  CHECK(s.t == Approx(-r.t));
  CHECK(s.p == Approx(r.p));

  TTest same = paired_t_test({1.5, 2, 7}, {1.5, 2, 7});
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);
  CHECK_FALSE(same.degenerate);

  TTest shift = paired_t_test({2, 3, 4}, {1, 2, 3});
  CHECK(shift.degenerate);
  CHECK(shift.p == 0.0);
  CHECK(std::isinf(shift.t));

  CHECK_THROWS_AS(paired_t_test({1, 2}, {1}), std::domain_error);
  CHECK_THROWS_AS(paired_t_test({1}, {1}), std::domain_error);
}

namespace {

BatchRow row(const std::string& inst, const std::string& algo, double obj, int n) {
  BatchRow r;
  r.instance = inst;
  r.algorithm = algo;
  r.status = "optimal";
  r.metrics.objective = obj;
  r.metrics.n_deployed = n;
  r.metrics.setup_cost = 10.0 * n;
  r.metrics.avg_delay_per_train = obj / 7;
  r.gap = 0.001;
  r.seconds = 1.5;
  return r;
}

}  // namespace

TEST_CASE("sensitivity comparison") {
  std::vector<BatchRow> base{row("a", "pla", 10, 1), row("b", "pla", 12, 2),
                             row("c", "pla", 15, 2)};
  SensitivityTable same = sensitivity_compare(base, base);
  CHECK(same.cells.size() == 3 * kMeasures.size());
  for (const auto& c : same.cells) CHECK(c.delta == 0.0);
  for (const auto& t : same.tests) CHECK(t.test.p == 1.0);

  std::vector<BatchRow> varied{row("c", "pla", 18, 2), row("a", "pla", 11, 1),
                               row("b", "pla", 14, 2)};
  SensitivityTable st = sensitivity_compare(base, varied);
  for (const auto& t : st.tests)
    if (t.measure == "objective") {
      CHECK(t.test.mean_diff == Approx(2.0));
      CHECK(t.test.t == Approx(2.0 / (1.0 / std::sqrt(3.0))));
    }

  std::vector<BatchRow> missing{row("a", "pla", 10, 1), row("b", "pla", 12, 2)};
  CHECK_THROWS_AS(sensitivity_compare(base, missing), std::domain_error);
  CHECK_THROWS_AS(sensitivity_compare(missing, base), std::domain_error);
  std::vector<BatchRow> other{row("a", "pla", 10, 1), row("b", "pla", 12, 2),
                              row("d", "pla", 15, 2)};
  CHECK_THROWS_AS(sensitivity_compare(base, other), std::domain_error);
}

TEST_CASE("batch csv round trip and averages") {
  std::vector<BatchRow> rows{row("a", "pla", 10, 1), row("b", "pla", 12, 3),
                             row("a", "fa", 11, 2)};
  BatchRow bad;
  bad.instance = "b";
  bad.algorithm = "fa";
  bad.status = "error";
  bad.message = "boom, with comma";
  rows.push_back(bad);
  auto avg = average_rows(rows);
  REQUIRE(avg.size() == 2);
  for (const auto& a : avg) {
    CHECK(a.instance == "Average");
    if (a.algorithm == "pla") {
      CHECK(a.metrics.objective == Approx(11.0));
      CHECK(a.metrics.setup_cost == Approx(20.0));
    } else {
      CHECK(a.metrics.objective == Approx(11.0));
    }
  }
  auto path = std::filesystem::temp_directory_path() / "railvolt_batch_test.csv";
  write_batch_csv(rows, path);
  auto back = read_batch_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].instance == rows[i].instance);
    CHECK(back[i].algorithm == rows[i].algorithm);
    CHECK(back[i].status == rows[i].status);
    for (const auto& m : kMeasures)
      CHECK(measure(back[i].metrics, m) == Approx(measure(rows[i].metrics, m)));
  }
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("#", 0) == 0);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(measure(Metrics{}, "nope"), std::invalid_argument);
}

TEST_CASE("batch runner") {
  std::vector<NamedInstance> set{{"tiny", testing::tiny_instance()}};
  SolveConfig cfg;
  cfg.time_limit_seconds = 60;
  auto be = make_backend();
  auto rows = run_batch(set, {"pla", "fa", "xyz"}, cfg, *be);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].status == "optimal");
  CHECK(rows[0].metrics.n_deployed == 1);
  CHECK(rows[1].metrics.objective == Approx(rows[0].metrics.objective).epsilon(0.02));
  CHECK(rows[2].status == "error");
  CHECK_THROWS_AS(solve_with("xyz", set[0].instance, cfg, *be), std::invalid_argument);
}
