#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "railvolt/instance_gen.hpp"
#include "railvolt/io.hpp"

using namespace railvolt;
using doctest::Approx;

TEST_CASE("energy and time conversions") {
  // 373 km at 30 kWh/km over 7000 kWh modules
  CHECK(energy_between(373, 30, 7000) == Approx(373.0 * 30.0 / 7000.0));
  CHECK(energy_between(373, 30, 7000) == Approx(1.5986).epsilon(1e-4));
  CHECK(travel_hours(250, 100) == Approx(2.5));
  CHECK_THROWS_AS(energy_between(10, 30, 0), DomainError);
  CHECK_THROWS_AS(travel_hours(10, 0), DomainError);
  CHECK_THROWS_AS(travel_hours(-1, 100), DomainError);
}

TEST_CASE("size classes") {
  CHECK(station_count(SizeClass::small) == 6);
  CHECK(station_count(SizeClass::medium) == 15);
  CHECK(station_count(SizeClass::large) == 25);
  CHECK(size_class_from_string("medium") == SizeClass::medium);
  CHECK_THROWS(size_class_from_string("huge"));
  for (auto sc : {SizeClass::small, SizeClass::medium, SizeClass::large}) {
    GenSpec spec;
    spec.size_class = sc;
    Instance inst = generate_instance(spec);
    CHECK(static_cast<int>(inst.num_stations()) == station_count(sc));
  }
}

TEST_CASE("same seed gives the same instance, other seeds differ") {
  GenSpec spec;
  spec.seed = 11;
  auto a = instance_to_json(generate_instance(spec));
  auto b = instance_to_json(generate_instance(spec));
  CHECK(a.dump() == b.dump());
  spec.seed = 12;
  CHECK(instance_to_json(generate_instance(spec)).dump() != a.dump());
}

TEST_CASE("sampler stream is pinned") {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  std::mt19937_64 eng;
  eng.discard(9999);
  CHECK(eng() == 9981545732273789042ULL);
  // Regression pin: a change here breaks reproducibility of shipped seeds.
  GenSpec spec;
  spec.seed = 1;
  Instance inst = generate_instance(spec);
  const auto legs = inst.meta["leg_distances_km"].get<std::vector<double>>();
  REQUIRE(legs.size() == 5);
  CHECK(legs[0] == Approx(564.6763232318922).epsilon(1e-12));
  CHECK(legs[3] == Approx(397.2610216336493).epsilon(1e-12));
}

TEST_CASE("leg distances follow the truncated normal") {
  double sum = 0, sq = 0;
  int n = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.size_class = SizeClass::large;
    for (double d : generate_instance(spec).meta["leg_distances_km"].get<std::vector<double>>()) {
      CHECK(d >= 50.0);
      sum += d;
      sq += d * d;
      ++n;
    }
  }
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  // clamping at 50 km lifts the mean by about 0.7 km
  CHECK(mean == Approx(373.7).epsilon(0.02));
  CHECK(sd == Approx(146.0).epsilon(0.05));
}

TEST_CASE("generated instances satisfy the instance invariants") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.size_class = seed % 3 == 0 ? SizeClass::medium : SizeClass::small;
    Instance inst = generate_instance(spec);
    CAPTURE(seed);
    CHECK(validate_instance(inst, 1e-9).empty());
    const std::size_t ni = inst.num_stations();
    std::vector<double> legs = inst.meta["leg_distances_km"].get<std::vector<double>>();
    REQUIRE(legs.size() == ni - 1);
    for (std::size_t i = 0; i + 1 < ni; ++i) {
      CHECK(legs[i] >= spec.distance_min_km);
      CHECK(inst.leg_energy(0, i) == Approx(energy_between(legs[i], 30, 7000)));
      CHECK(inst.leg_time(0, i) == Approx(legs[i] / 100.0));
    }
    for (std::size_t i = 1; i + 1 < ni; ++i) {
      CHECK(inst.fixed_cost[i] >= 15);
      CHECK(inst.fixed_cost[i] <= 30);
      CHECK(inst.chargers[i] >= 1);
      CHECK(inst.chargers[i] <= 10);
      CHECK(inst.full_batteries[i] >= 5);
      CHECK(inst.full_batteries[i] <= 15);
      for (std::size_t j = 0; j < inst.num_trains(); ++j) CHECK(inst.wait_time[i][j] >= 0);
    }
    CHECK(inst.meta["generator"] == Sampler::kName);
  }
}

TEST_CASE("about half of the interior waits are zero") {
  int zero = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    Instance inst = generate_instance(spec);
    for (std::size_t i = 1; i + 1 < inst.num_stations(); ++i)
      for (std::size_t j = 0; j < inst.num_trains(); ++j, ++total) zero += inst.wait_time[i][j] == 0;
  }
  CHECK(static_cast<double>(zero) / total == Approx(0.5).epsilon(0.2));
}

TEST_CASE("invalid generator parameters") {
  GenSpec spec;
  spec.speed_kmh = 0;
  CHECK_THROWS_AS(generate_instance(spec), DomainError);
  spec = {};
  spec.cost = {22, 3, 25, 30};
  CHECK_THROWS_AS(generate_instance(spec), DomainError);
  spec = {};
  spec.n_stations = 2;
  CHECK_THROWS_AS(generate_instance(spec), DomainError);
}
