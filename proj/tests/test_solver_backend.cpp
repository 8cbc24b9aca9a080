#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "railvolt/solver_backend.hpp"

using namespace railvolt;
using doctest::Approx;

namespace {

// min x + 2y  s.t.  x + y >= 2,  x - y <= 1,  0 <= x, y <= 5
AbstractModel small_lp() {
  AbstractModel m;
  int x = m.add_continuous("x", 0, 5, 1);
  int y = m.add_continuous("y", 0, 5, 2);
  m.add_row("cover", {{x, 1}, {y, 1}}, Sense::geq, 2);
  m.add_row("spread", {{x, 1}, {y, -1}}, Sense::leq, 1);
  return m;
}

}  // namespace

TEST_CASE("model building") {
  AbstractModel m;
  int a = m.add_continuous("a");
  int b = m.add_binary("b", 3.0);
  int r = m.add_row("r", {{a, 1}, {b, 2}, {a, 1}, {b, -2}}, Sense::leq, 4);
  REQUIRE(m.rows()[r].terms.size() == 1);
  CHECK(m.rows()[r].terms[0].coef == 2.0);
  CHECK(m.has_integers());
  CHECK_THROWS_AS(m.add_row("bad", {{7, 1}}, Sense::eq, 0), ModelError);
  m.add_continuous("a");
  CHECK_THROWS_AS(m.validate(), ModelError);
  AbstractModel n;
  n.add_continuous("x", 2, 1);
  CHECK_THROWS_AS(n.validate(), ModelError);
  AbstractModel p;
  p.add_continuous("x", 0, kInf, std::nan(""));
  CHECK_THROWS_AS(p.validate(), ModelError);
}

TEST_CASE("objective and violation of a point") {
  AbstractModel m = small_lp();
  m.objective_offset = 10;
  CHECK(m.objective_at({1.5, 0.5}) == Approx(12.5));
  CHECK(m.max_violation({1.5, 0.5}) == Approx(0.0));
  CHECK(m.max_violation({0.5, 0.5}) == Approx(1.0));
}

TEST_CASE("LP optimum and duals") {
  auto be = make_backend("highs");
  AbstractModel m = small_lp();
  SolveOutcome out = be->solve(m, {});
  REQUIRE(out.status == OutcomeStatus::optimal);
  // vertex x - y = 1, x + y = 2
  CHECK(out.primal[0] == Approx(1.5));
  CHECK(out.primal[1] == Approx(0.5));
  CHECK(out.objective == Approx(2.5));
  const auto& pi = get_duals(out, m);
  CHECK(pi[0] >= -1e-9);
  CHECK(pi[1] <= 1e-9);
  // strong duality (no active column bounds at this vertex)
  CHECK(pi[0] * 2 + pi[1] * 1 == Approx(out.objective));
  // reduced costs vanish on basic columns: c - A'pi = 0
  CHECK(1 - (pi[0] + pi[1]) == Approx(0.0).epsilon(1e-9));
  CHECK(2 - (pi[0] - pi[1]) == Approx(0.0).epsilon(1e-9));
}

TEST_CASE("infeasible LP yields a Farkas ray") {
  auto be = make_backend("highs");
  AbstractModel m;
  int x = m.add_continuous("x", 0, kInf);
  int y = m.add_continuous("y", 0, kInf);
  m.add_row("need", {{x, 1}, {y, 1}}, Sense::geq, 3);
  m.add_row("cap_x", {{x, -1}}, Sense::geq, -1);
  m.add_row("cap_y", {{y, -1}}, Sense::geq, -1);
  SolveLimits lim;
  lim.want_ray = true;
  SolveOutcome out = be->solve(m, lim);
  REQUIRE(out.status == OutcomeStatus::infeasible);
  REQUIRE(out.ray.has_value());
  const auto& ray = *out.ray;
  for (double v : ray) CHECK(v >= -1e-9);
  // A'y <= 0 on columns with x >= 0, and b'y > 0
  CHECK(ray[0] - ray[1] <= 1e-9);
  CHECK(ray[0] - ray[2] <= 1e-9);
  CHECK(3 * ray[0] - ray[1] - ray[2] > 1e-9);
  CHECK_THROWS_AS(get_duals(out, m), CapabilityError);
}

TEST_CASE("MIP solve and capability errors") {
  auto be = make_backend("highs");
  AbstractModel m;
  // knapsack: max 5a + 4b + 3c  s.t. 2a + 3b + c <= 4
  int a = m.add_binary("a", -5), b = m.add_binary("b", -4), c = m.add_binary("c", -3);
  m.add_row("w", {{a, 2}, {b, 3}, {c, 1}}, Sense::leq, 4);
  SolveOutcome out = be->solve(m, {});
  REQUIRE(out.status == OutcomeStatus::optimal);
  CHECK(out.objective == Approx(-8));
  CHECK(out.primal[a] == Approx(1));
  CHECK(out.primal[c] == Approx(1));
  CHECK_THROWS_AS(get_duals(out, m), CapabilityError);

  m.add_row("force", {{a, 1}, {b, 1}}, Sense::geq, 2);
  SolveOutcome inf = be->solve(m, {});
  CHECK(inf.status == OutcomeStatus::infeasible);
}

TEST_CASE("MIP start is accepted") {
  auto be = make_backend("highs");
  AbstractModel m;
  int a = m.add_binary("a", 1), b = m.add_binary("b", 1);
  m.add_row("one", {{a, 1}, {b, 1}}, Sense::geq, 1);
  SolveLimits lim;
  lim.start = std::vector<double>{1.0, 1.0};
  SolveOutcome out = be->solve(m, lim);
  REQUIRE(out.status == OutcomeStatus::optimal);
  CHECK(out.objective == Approx(1));
}

TEST_CASE("unknown backend name") {
  CHECK_THROWS(make_backend("nonexistent"));
}

TEST_CASE("LP file round-trip keeps the optimum") {
  auto be = make_backend("highs");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto dir = std::filesystem::temp_directory_path() / "railvolt_lp_roundtrip";
  std::filesystem::create_directories(dir);
  for (int rep = 0; rep < 10; ++rep) {
    AbstractModel m;
    const int nc = 6, nr = 5;
    for (int c = 0; c < nc; ++c)
      m.add_continuous("x" + std::to_string(c), 0, 1 + 4 * U(rng), U(rng) - 0.3);
    for (int r = 0; r < nr; ++r) {
      std::vector<Term> t;
      for (int c = 0; c < nc; ++c)
        if (U(rng) < 0.6) t.push_back({c, std::round((U(rng) * 4 - 1) * 100) / 100});
      if (t.empty()) t.push_back({r, 1.0});
      Sense s = r % 3 == 0 ? Sense::leq : r % 3 == 1 ? Sense::geq : Sense::eq;
      double rhs = s == Sense::geq ? 0.1 : 1.0;
      m.add_row("r" + std::to_string(r), t, s, s == Sense::eq ? 0.0 : rhs);
    }
    auto path = dir / ("m" + std::to_string(rep) + ".lp");
    be->write_lp(m, path);
    AbstractModel back = be->read_lp(path);
    CHECK(back.num_columns() == m.num_columns());
    SolveOutcome a = be->solve(m, {});
    SolveOutcome b = be->solve(back, {});
    CHECK(a.status == b.status);
    if (a.status == OutcomeStatus::optimal && b.status == OutcomeStatus::optimal)
      CHECK(a.objective == Approx(b.objective).epsilon(1e-6));
  }
  std::filesystem::remove_all(dir);
}
