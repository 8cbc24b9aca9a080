#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "railvolt/domain.hpp"

namespace railvolt {

enum class SizeClass { small, medium, large };

int station_count(SizeClass size);
SizeClass size_class_from_string(const std::string& text);
std::string to_string(SizeClass size);

struct TruncNormal {
  double mean, sd, min, max;
};

struct GenSpec {
  SizeClass size_class = SizeClass::small;
  int n_stations = 0;  // overrides size_class when > 0
  int n_trains = 2;
  int consists_per_train = 3;
  int max_batteries = 3;
  double distance_mean_km = 373.0;
  double distance_sd_km = 146.0;
  double distance_min_km = 50.0;
  double speed_kmh = 100.0;
  double consumption_kwh_per_km = 30.0;
  double battery_kwh = 7000.0;
  TruncNormal cost{22.0, 3.0, 15.0, 30.0};
  TruncNormal chargers{5.0, 1.0, 1.0, 10.0};
  TruncNormal batteries{10.0, 2.0, 5.0, 15.0};
  double wait_probability = 0.5;
  double wait_sd_hours = 0.3;
  double r0 = 0.4;
  double swap_hours = 2.0;
  std::uint64_t seed = 1;

  /// Throws DomainError for non-positive parameters or inconsistent triples.
  void validate() const;
};

/// Portable sampler: mt19937_64 words mapped to [0,1) with 53 bits, normals
/// by Box-Muller. Both steps are fixed here so streams do not depend on the
/// standard library's distribution implementations.
class Sampler {
 public:
  static constexpr const char* kName = "mt19937_64/box-muller/v1";
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}
  double uniform();
  double normal(double mean, double sd);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

double energy_between(double distance_km, double consumption_kwh_per_km, double battery_kwh);
double travel_hours(double distance_km, double speed_kmh);

Instance generate_instance(const GenSpec& spec);

}  // namespace railvolt
