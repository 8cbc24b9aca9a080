#include "railvolt/io.hpp"

#include <fstream>

#include <fmt/format.h>

namespace railvolt {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  return it == doc.end() || it->is_null() ? fallback : it->get<T>();
}

template <class T>
std::vector<T> vec(const json& doc, const char* key, std::size_t expect) {
  if (!doc.contains(key)) throw FormatError(fmt::format("missing key '{}'", key));
  auto v = doc.at(key).get<std::vector<T>>();
  if (v.size() != expect)
    throw FormatError(fmt::format("'{}' has {} entries, expected {}", key, v.size(), expect));
  return v;
}

std::vector<bool> bools(const json& doc, const char* key, std::size_t n) {
  if (!doc.contains(key)) return std::vector<bool>(n, false);
  std::vector<bool> out;
  for (const auto& x : doc.at(key)) out.push_back(x.is_boolean() ? x.get<bool>() : x.get<int>() != 0);
  if (out.size() != n)
    throw FormatError(fmt::format("'{}' has {} entries, expected {}", key, out.size(), n));
  return out;
}

std::vector<double> doubles(const json& doc, const char* key, std::size_t n) {
  if (!doc.contains(key)) return std::vector<double>(n, 0.0);
  return vec<double>(doc, key, n);
}

}  // namespace

json instance_to_json(const Instance& inst) {
  json trains = json::array();
  for (const auto& t : inst.trains)
    trains.push_back({{"name", t.name}, {"consists", t.consists}, {"max_batteries", t.max_batteries}});
  return {
      {"stations", inst.stations},
      {"trains", trains},
      {"fixed_cost", inst.fixed_cost},
      {"chargers", inst.chargers},
      {"full_batteries", inst.full_batteries},
      {"energy", inst.energy},
      {"travel_time", inst.travel_time},
      {"wait_time", inst.wait_time},
      {"physics", {{"r0", inst.r0}, {"swap_hours", inst.swap_hours}}},
      {"meta", inst.meta},
  };
}

Instance instance_from_json(const json& doc) {
  try {
    Instance inst;
    inst.stations = doc.at("stations").get<std::vector<std::string>>();
    const auto ni = inst.stations.size();
    int idx = 0;
    for (const auto& t : doc.at("trains")) {
      Train tr;
      tr.name = get_or<std::string>(t, "name", fmt::format("Train {}", ++idx));
      tr.consists = t.at("consists").get<int>();
      tr.max_batteries = t.at("max_batteries").get<int>();
      inst.trains.push_back(tr);
    }
    const auto nj = inst.trains.size();
    inst.fixed_cost = vec<double>(doc, "fixed_cost", ni);
    inst.chargers = vec<int>(doc, "chargers", ni);
    inst.full_batteries = vec<int>(doc, "full_batteries", ni);
    inst.energy = vec<Matrix>(doc, "energy", nj);
    inst.travel_time = vec<Matrix>(doc, "travel_time", nj);
    inst.wait_time = vec<std::vector<double>>(doc, "wait_time", ni);
    for (const auto& row : inst.wait_time)
      if (row.size() != nj) throw FormatError("wait_time rows must have one entry per train");
    for (const auto* ms : {&inst.energy, &inst.travel_time})
      for (const auto& m : *ms) {
        if (m.size() != ni) throw FormatError("matrix row count differs from station count");
        for (const auto& row : m)
          if (row.size() != ni) throw FormatError("matrix column count differs from station count");
      }
    const auto& phys = doc.at("physics");
    inst.r0 = phys.at("r0").get<double>();
    inst.swap_hours = phys.at("swap_hours").get<double>();
    if (doc.contains("meta")) inst.meta = doc.at("meta");
    return inst;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad instance document: ") + e.what());
  }
}

json solution_to_json(const Instance& inst, const Solution& s) {
  const auto ni = inst.num_stations();
  json trains = json::array();
  for (std::size_t j = 0; j < inst.num_trains(); ++j) {
    json t;
    std::vector<double> arr(ni), dep(ni), del(ni);
    for (std::size_t i = 0; i < ni; ++i) {
      arr[i] = s.arrive_time[i][j];
      dep[i] = s.depart_time[i][j];
      del[i] = s.delay[i][j];
    }
    t["arrive_time"] = arr;
    t["depart_time"] = dep;
    t["delay"] = del;
    json consists = json::array();
    for (int k = 0; k < inst.trains[j].consists; ++k) {
      json c;
      std::vector<double> sa(ni), sd(ni), ch(ni);
      std::vector<bool> zc(ni), zs(ni), b(ni);
      for (std::size_t i = 0; i < ni; ++i) {
        sa[i] = s.soc_arrive[i][j][k];
        sd[i] = s.soc_depart[i][j][k];
        ch[i] = s.charge_hours[i][j][k];
        zc[i] = s.charge_flag[i][j][k];
        zs[i] = s.swap_flag[i][j][k];
        b[i] = s.battery_nonempty[i][j][k];
      }
      c["has_battery"] = bool(s.has_battery[j][k]);
      c["soc_arrive"] = sa;
      c["soc_depart"] = sd;
      c["charge"] = zc;
      c["swap"] = zs;
      c["charge_hours"] = ch;
      c["nonempty"] = b;
      consists.push_back(c);
    }
    t["consists"] = consists;
    trains.push_back(t);
  }
  json deployed = json::array();
  for (bool d : s.deployed) deployed.push_back(d);
  return {
      {"algorithm", s.algorithm},
      {"status", to_string(s.status)},
      {"objective", s.objective_value},
      {"bound", s.bound},
      {"gap", s.gap},
      {"wall_seconds", s.wall_seconds},
      {"deployed", deployed},
      {"trains", trains},
      {"log", s.log},
  };
}

Solution solution_from_json(const Instance& inst, const json& doc) {
  try {
    const auto ni = inst.num_stations();
    const auto nj = inst.num_trains();
    Solution s = Solution::empty_for(inst);
    s.algorithm = get_or<std::string>(doc, "algorithm", "");
    s.status = solve_status_from_string(get_or<std::string>(doc, "status", "feasible_limit"));
    s.objective_value = get_or<double>(doc, "objective", 0.0);
    s.bound = get_or<double>(doc, "bound", 0.0);
    s.gap = get_or<double>(doc, "gap", 0.0);
    s.wall_seconds = get_or<double>(doc, "wall_seconds", 0.0);
    if (doc.contains("log")) s.log = doc.at("log");
    s.deployed = bools(doc, "deployed", ni);
    const auto& trains = doc.at("trains");
    if (trains.size() != nj)
      throw FormatError(fmt::format("solution has {} trains, instance {}", trains.size(), nj));
    for (std::size_t j = 0; j < nj; ++j) {
      const auto& t = trains[j];
      auto arr = doubles(t, "arrive_time", ni);
      auto dep = doubles(t, "depart_time", ni);
      auto del = doubles(t, "delay", ni);
      for (std::size_t i = 0; i < ni; ++i) {
        s.arrive_time[i][j] = arr[i];
        s.depart_time[i][j] = dep[i];
        s.delay[i][j] = del[i];
      }
      const auto& cs = t.at("consists");
      if (cs.size() != static_cast<std::size_t>(inst.trains[j].consists))
        throw FormatError(fmt::format("train {} has {} consists, instance {}", j, cs.size(),
                                      inst.trains[j].consists));
      for (std::size_t k = 0; k < cs.size(); ++k) {
        const auto& c = cs[k];
        s.has_battery[j][k] = get_or<bool>(c, "has_battery", false);
        auto sa = doubles(c, "soc_arrive", ni);
        auto sd = doubles(c, "soc_depart", ni);
        auto ch = doubles(c, "charge_hours", ni);
        auto zc = bools(c, "charge", ni);
        auto zs = bools(c, "swap", ni);
        auto b = bools(c, "nonempty", ni);
        for (std::size_t i = 0; i < ni; ++i) {
          s.soc_arrive[i][j][k] = sa[i];
          s.soc_depart[i][j][k] = sd[i];
          s.charge_hours[i][j][k] = ch[i];
          s.charge_flag[i][j][k] = zc[i];
          s.swap_flag[i][j][k] = zs[i];
          // published schedules omit the flag; it follows from the arrival SOC
          s.battery_nonempty[i][j][k] = c.contains("nonempty") ? b[i] : sa[i] > 0;
        }
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad solution document: ") + e.what());
  }
}

json config_to_json(const SolveConfig& c) {
  return {
      {"alpha_fixed", c.alpha_fixed},
      {"alpha_delay", c.alpha_delay},
      {"big_M", c.big_M},
      {"soc_big_M", c.soc_big_M},
      {"epsilon", c.epsilon},
      {"soc_breakpoints", c.soc_breakpoints},
      {"time_breakpoints", c.time_breakpoints},
      {"max_charge_hours", c.max_charge_hours},
      {"mip_gap", c.mip_gap},
      {"time_limit_seconds", c.time_limit_seconds},
      {"benders_gap", c.benders_gap},
      {"rmp_gap", c.rmp_gap},
      {"rmp_time_limit_seconds", c.rmp_time_limit_seconds},
      {"seed", c.seed},
  };
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json(path));
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  write_json(instance_to_json(instance), path);
}

Solution load_solution(const Instance& instance, const std::filesystem::path& path) {
  return solution_from_json(instance, read_json(path));
}

void save_solution(const Instance& instance, const Solution& solution,
                   const std::filesystem::path& path) {
  write_json(solution_to_json(instance, solution), path);
}

}  // namespace railvolt
