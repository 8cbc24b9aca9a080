#pragma once

#include <string>
#include <vector>

#include "railvolt/domain.hpp"
#include "railvolt/io.hpp"

namespace railvolt::testing {

inline std::string source_path(const std::string& rel) {
  return std::string(RAILVOLT_SOURCE_DIR) + "/" + rel;
}

inline Instance illustrative() { return load_instance(source_path("instances/illustrative.json")); }

// Origin, two candidates, destination; one train with two loaded consists.
// Demand 2.4 batteries against 2 carried, so at least one station is needed.
inline Instance tiny_instance(std::vector<double> legs_e = {0.8, 0.9, 0.7}) {
  Instance inst;
  inst.stations = {"Origin", "A", "B", "Destination"};
  inst.trains = {{"T1", 2, 2}};
  inst.fixed_cost = {0, 20, 25, 0};
  inst.chargers = {0, 2, 1, 0};
  inst.full_batteries = {0, 3, 2, 0};
  const double legs_t[] = {2.0, 3.0, 2.0};
  Matrix e(4, std::vector<double>(4, 0.0)), t = e;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int l = a; l < b; ++l) {
        e[a][b] += legs_e[l];
        t[a][b] += legs_t[l];
      }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < a; ++b) {
      e[a][b] = e[b][a];
      t[a][b] = t[b][a];
    }
  inst.energy = {e};
  inst.travel_time = {t};
  inst.wait_time = {{0}, {0.3}, {0}, {0}};
  return inst;
}

}  // namespace railvolt::testing
