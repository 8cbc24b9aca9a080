#include "railvolt/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace railvolt {

int station_count(SizeClass size) {
  switch (size) {
    case SizeClass::small: return 6;
    case SizeClass::medium: return 15;
    case SizeClass::large: return 25;
  }
  return 6;
}

SizeClass size_class_from_string(const std::string& text) {
  if (text == "small") return SizeClass::small;
  if (text == "medium") return SizeClass::medium;
  if (text == "large") return SizeClass::large;
  throw std::invalid_argument("size must be small, medium or large, got '" + text + "'");
}

std::string to_string(SizeClass size) {
  switch (size) {
    case SizeClass::small: return "small";
    case SizeClass::medium: return "medium";
    case SizeClass::large: return "large";
  }
  return "small";
}

void GenSpec::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0)) throw DomainError(fmt::format("{} must be positive", what));
  };
  auto triple = [&](const TruncNormal& t, const char* what) {
    positive(t.sd, what);
    positive(t.min, what);
    if (!(t.min <= t.mean && t.mean <= t.max))
      throw DomainError(fmt::format("{}: need min <= mean <= max", what));
  };
  if (n_stations != 0 && n_stations < 3) throw DomainError("need at least 3 stations");
  if (n_trains < 1) throw DomainError("need at least one train");
  if (consists_per_train < 1) throw DomainError("need at least one consist");
  if (max_batteries < 1) throw DomainError("max_batteries must be >= 1");
  positive(distance_mean_km, "distance_mean_km");
  positive(distance_sd_km, "distance_sd_km");
  positive(distance_min_km, "distance_min_km");
  positive(speed_kmh, "speed_kmh");
  positive(consumption_kwh_per_km, "consumption_kwh_per_km");
  positive(battery_kwh, "battery_kwh");
  triple(cost, "cost");
  triple(chargers, "chargers");
  triple(batteries, "batteries");
  if (!(wait_probability >= 0 && wait_probability <= 1))
    throw DomainError("wait_probability must lie in [0,1]");
  positive(wait_sd_hours, "wait_sd_hours");
  if (!(r0 > 0 && r0 < 1)) throw DomainError("r0 must lie in (0,1)");
  positive(swap_hours, "swap_hours");
}

double Sampler::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Sampler::normal(double mean, double sd) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sd * spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return mean + sd * r * std::cos(a);
}

double energy_between(double distance_km, double consumption_kwh_per_km, double battery_kwh) {
  if (!(battery_kwh > 0)) throw DomainError("battery_kwh must be positive");
  if (distance_km < 0 || consumption_kwh_per_km < 0)
    throw DomainError("distance and consumption must be nonnegative");
  return distance_km * consumption_kwh_per_km / battery_kwh;
}

double travel_hours(double distance_km, double speed_kmh) {
  if (!(speed_kmh > 0)) throw DomainError("speed must be positive");
  if (distance_km < 0) throw DomainError("distance must be nonnegative");
  return distance_km / speed_kmh;
}

Instance generate_instance(const GenSpec& spec) {
  spec.validate();
  Sampler rng(spec.seed);
  const int ni = spec.n_stations > 0 ? spec.n_stations : station_count(spec.size_class);
  const int nj = spec.n_trains;
  auto clamp = [&](const TruncNormal& t) { return std::clamp(rng.normal(t.mean, t.sd), t.min, t.max); };

  Instance inst;
  inst.r0 = spec.r0;
  inst.swap_hours = spec.swap_hours;
  inst.stations.push_back("Origin");
  for (int i = 1; i + 1 < ni; ++i) inst.stations.push_back(fmt::format("Station {}", i));
  inst.stations.push_back("Destination");
  for (int j = 0; j < nj; ++j)
    inst.trains.push_back({fmt::format("Train {}", j + 1), spec.consists_per_train,
                           spec.max_batteries});

  std::vector<double> cum(ni, 0.0);
  for (int i = 1; i < ni; ++i)
    cum[i] = cum[i - 1] + std::max(spec.distance_min_km,
                                   rng.normal(spec.distance_mean_km, spec.distance_sd_km));

  inst.fixed_cost.assign(ni, 0.0);
  inst.chargers.assign(ni, 0);
  inst.full_batteries.assign(ni, 0);
  for (int i = 1; i + 1 < ni; ++i) {
    inst.fixed_cost[i] = clamp(spec.cost);
    inst.chargers[i] = static_cast<int>(std::lround(clamp(spec.chargers)));
    inst.full_batteries[i] = static_cast<int>(std::lround(clamp(spec.batteries)));
  }

  inst.wait_time.assign(ni, std::vector<double>(nj, 0.0));
  for (int i = 1; i + 1 < ni; ++i)
    for (int j = 0; j < nj; ++j)
      if (rng.uniform() < spec.wait_probability)
        inst.wait_time[i][j] = std::abs(rng.normal(0.0, spec.wait_sd_hours));

  Matrix e(ni, std::vector<double>(ni)), t(ni, std::vector<double>(ni));
  for (int a = 0; a < ni; ++a)
    for (int b = 0; b < ni; ++b) {
      double d = std::abs(cum[b] - cum[a]);
      e[a][b] = energy_between(d, spec.consumption_kwh_per_km, spec.battery_kwh);
      t[a][b] = travel_hours(d, spec.speed_kmh);
    }
  inst.energy.assign(nj, e);
  inst.travel_time.assign(nj, t);

  inst.meta = {
      {"generator", Sampler::kName},
      {"seed", spec.seed},
      {"size_class", spec.n_stations > 0 ? "custom" : to_string(spec.size_class)},
      {"stations", ni},
      {"distance_km", {{"mean", spec.distance_mean_km}, {"sd", spec.distance_sd_km},
                       {"min", spec.distance_min_km}}},
      {"wait_model", "0 with probability 1-p, else |N(0, sd)|"},
      {"wait_probability", spec.wait_probability},
      {"wait_sd_hours", spec.wait_sd_hours},
      {"leg_distances_km", [&] {
         std::vector<double> legs;
         for (int i = 1; i < ni; ++i) legs.push_back(cum[i] - cum[i - 1]);
         return legs;
       }()},
  };
  return inst;
}

}  // namespace railvolt
