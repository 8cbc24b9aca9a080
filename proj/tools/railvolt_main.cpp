#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "railvolt/benders.hpp"
#include "railvolt/fix_algorithm.hpp"
#include "railvolt/instance_gen.hpp"
#include "railvolt/io.hpp"
#include "railvolt/pla_model.hpp"
#include "railvolt/reporting.hpp"
#include "railvolt/validator.hpp"

namespace fs = std::filesystem;
using namespace railvolt;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  SolveConfig cfg;
  std::string out;
  std::string dump_model;
  std::string solver;
};

void add_common(CLI::App* app, Common& c, bool alpha_d = true) {
  app->add_option("--seed", c.cfg.seed, "Random seed (generator, tie-breaks, solver)");
  app->add_option("--alpha-f", c.cfg.alpha_fixed, "Weight of setup cost")
      ->check(CLI::NonNegativeNumber);
  if (alpha_d)
    app->add_option("--alpha-d", c.cfg.alpha_delay, "Weight of delay")
        ->check(CLI::NonNegativeNumber);
  app->add_option("--gap", c.cfg.mip_gap, "Relative MIP gap")->check(CLI::Range(0.0, 1.0));
  app->add_option("--time-limit", c.cfg.time_limit_seconds, "Seconds per solve")
      ->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "Output file");
  app->add_option("--dump-model", c.dump_model, "Write the MILP in LP format");
  app->add_option("--solver", c.solver, "Backend name (default: $RAILVOLT_SOLVER or highs)");
}

Instance read_instance(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("instance file not found: " + path);
  return load_instance(path);
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

// Per train: a time row of (arrival, departure) pairs, a delay row, then one
// row per consist with arrival/departure SOC and the operation.
void print_schedule(const Instance& inst, const Solution& s, std::ostream& os) {
  const std::size_t w = 18;
  os << pad("", 22);
  for (std::size_t i = 0; i < inst.num_stations(); ++i)
    os << pad(inst.stations[i] + (s.deployed[i] ? "*" : ""), w);
  os << "\n";
  for (std::size_t j = 0; j < inst.num_trains(); ++j) {
    os << pad(inst.trains[j].name, 10) << pad("time", 12);
    for (std::size_t i = 0; i < inst.num_stations(); ++i)
      os << pad(fmt::format("({:.2f}, {:.2f})", s.arrive_time[i][j], s.depart_time[i][j]), w);
    os << "\n" << pad("", 10) << pad("delay", 12);
    for (std::size_t i = 0; i < inst.num_stations(); ++i) {
      double dwell = s.depart_time[i][j] - s.arrive_time[i][j];
      os << pad(fmt::format("{:.2f}", std::max(dwell, inst.wait_time[i][j]) -
                                          inst.wait_time[i][j] + 0.0),
                w);
    }
    os << "\n";
    for (int k = 0; k < inst.trains[j].consists; ++k) {
      os << pad("", 10)
         << pad(fmt::format("consist {}{}", k + 1, s.has_battery[j][k] ? "" : " -"), 12);
      for (std::size_t i = 0; i < inst.num_stations(); ++i) {
        std::string op;
        if (s.charge_flag[i][j][k]) op = fmt::format(" C{:.2f}", s.charge_hours[i][j][k]);
        if (s.swap_flag[i][j][k]) op = " S";
        os << pad(fmt::format("{:.2f}/{:.2f}{}", s.soc_arrive[i][j][k], s.soc_depart[i][j][k],
                              op),
                  w);
      }
      os << "\n";
    }
  }
}

void print_metrics(const Metrics& m, std::ostream& os) {
  os << fmt::format(
      "objective {:.4f}\nstations deployed {}\nsetup cost {:.4f}\n"
      "delay per train {:.4f} h\ncharge per train {:.4f} h\nswap per train {:.4f} h\n"
      "charge per station {:.4f} h\nswap per station {:.4f} h\n",
      m.objective, m.n_deployed, m.setup_cost, m.avg_delay_per_train,
      m.avg_charge_hours_per_train, m.avg_swap_hours_per_train, m.avg_charge_hours_per_station,
      m.avg_swap_hours_per_station);
}

std::vector<NamedInstance> collect_instances(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(in)) {
      files.emplace_back(in);
    } else {
      throw UsageError("no such instance file or directory: " + in);
    }
  }
  if (files.empty()) throw UsageError("no instances found");
  std::vector<NamedInstance> out;
  for (const auto& f : files) out.push_back({f.stem().string(), load_instance(f)});
  return out;
}

std::vector<std::string> split_algos(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  for (const auto& a : out)
    if (a != "pla" && a != "fa" && a != "bd")
      throw UsageError("unknown algorithm '" + a + "' (expected pla, fa, bd)");
  if (out.empty()) throw UsageError("no algorithms given");
  return out;
}

void print_rows(const std::vector<BatchRow>& rows, std::ostream& os) {
  os << fmt::format("{:<20} {:<5} {:<15} {:>10} {:>4} {:>9} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
                    "instance", "algo", "status", "objective", "#st", "setup", "dly/tr",
                    "chg/tr", "swp/tr", "chg/st", "swp/st", "gap");
  for (const auto& r : rows) {
    const Metrics& m = r.metrics;
    os << fmt::format(
        "{:<20} {:<5} {:<15} {:>10.2f} {:>4} {:>9.2f} {:>8.2f} {:>8.2f} {:>8.2f} {:>8.2f} "
        "{:>8.2f} {:>8.4f}\n",
        r.instance, r.algorithm, r.status, m.objective, m.n_deployed, m.setup_cost,
        m.avg_delay_per_train, m.avg_charge_hours_per_train, m.avg_swap_hours_per_train,
        m.avg_charge_hours_per_station, m.avg_swap_hours_per_station, r.gap);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charging and swapping station planning for battery-electric freight trains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "railvolt 0.1.0");

  Common gen_c, solve_c, val_c, rep_c, sweep_c;

  auto* gen = app.add_subcommand("generate", "Generate a random corridor instance");
  add_common(gen, gen_c);
  GenSpec spec;
  std::string size = "small";
  gen->add_option("--size", size, "small, medium or large")
      ->check(CLI::IsMember({"small", "medium", "large"}));
  gen->add_option("--stations", spec.n_stations, "Total stations including both ends");
  gen->add_option("--trains", spec.n_trains);
  gen->add_option("--consists", spec.consists_per_train);
  gen->add_option("--max-batteries", spec.max_batteries);
  gen->add_option("--wait-probability", spec.wait_probability);

  auto* solve = app.add_subcommand("solve", "Solve an instance");
  add_common(solve, solve_c);
  std::string algo = "pla", instance_path, log_path;
  bool show = false;
  solve->add_option("--algo", algo, "pla, fa or bd")->check(CLI::IsMember({"pla", "fa", "bd"}));
  solve->add_option("--instance", instance_path)->required();
  solve->add_option("--benders-gap", solve_c.cfg.benders_gap)->check(CLI::Range(0.0, 1.0));
  solve->add_option("--log", log_path, "Benders convergence CSV");
  solve->add_flag("--print", show, "Print the schedule table");

  auto* val = app.add_subcommand("validate", "Check a schedule against an instance");
  add_common(val, val_c);
  std::string val_instance, val_solution;
  bool strict = false;
  val->add_option("--instance", val_instance)->required();
  val->add_option("--solution", val_solution)->required();
  val->add_flag("--strict", strict, "Tolerances 1e-4 instead of the PLA-aware defaults");

  auto* rep = app.add_subcommand("report", "Batch-solve instances and tabulate the measures");
  add_common(rep, rep_c);
  std::vector<std::string> rep_inputs;
  std::string rep_algos = "pla,fa,bd", rep_long;
  rep->add_option("--instances", rep_inputs, "Directories or files")->required();
  rep->add_option("--algos", rep_algos);
  rep->add_option("--long", rep_long, "Long-format CSV for plotting");

  auto* sweep = app.add_subcommand("sweep", "Delay-weight sensitivity with paired t-tests");
  add_common(sweep, sweep_c, false);
  std::vector<std::string> sweep_inputs;
  std::string sweep_algos = "pla,fa,bd";
  std::vector<double> alphas{3.0, 5.0};
  sweep->add_option("--instances", sweep_inputs)->required();
  sweep->add_option("--algos", sweep_algos);
  sweep->add_option("--alpha-d", alphas, "Comma-separated delay weights; the first is the base")
      ->delimiter(',')
      ->expected(2, 16);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      gen_c.cfg.validate();
      spec.size_class = size_class_from_string(size);
      spec.seed = gen_c.cfg.seed;
      Instance inst = generate_instance(spec);
      if (gen_c.out.empty())
        std::cout << instance_to_json(inst).dump(2) << "\n";
      else
        save_instance(inst, gen_c.out);
      return kOk;
    }

    if (*solve) {
      solve_c.cfg.validate();
      Instance inst = read_instance(instance_path);
      auto backend = make_backend(solve_c.solver);
      Solution s;
      if (algo == "pla") {
        s = solve_pla(inst, solve_c.cfg, *backend, solve_c.dump_model);
      } else if (algo == "fa") {
        s = run_fix_algorithm(inst, solve_c.cfg, *backend);
      } else {
        BendersRun run = run_benders(inst, solve_c.cfg, *backend);
        if (!log_path.empty()) write_convergence_csv(run.history, log_path);
        s = std::move(run.solution);
      }
      if (algo != "pla" && !solve_c.dump_model.empty())
        backend->write_lp(build_model(inst, solve_c.cfg).model, solve_c.dump_model);
      std::cout << fmt::format("algorithm {}\nstatus {}\n", algo, to_string(s.status));
      if (s.status != SolveStatus::optimal && s.status != SolveStatus::feasible_limit) {
        if (s.log.contains("note")) std::cout << "note " << s.log["note"].get<std::string>() << "\n";
        return kFailed;
      }
      std::cout << fmt::format("objective {:.4f} (gap {:.4f}, bound {:.4f})\ntime {:.1f} s\n",
                               s.objective_value, s.gap, s.bound, s.wall_seconds);
      std::cout << "deployed";
      for (std::size_t i = 0; i < inst.num_stations(); ++i)
        if (s.deployed[i]) std::cout << " '" << inst.stations[i] << "'";
      std::cout << "\n";
      print_metrics(recompute_metrics(inst, s, solve_c.cfg), std::cout);
      if (show) print_schedule(inst, s, std::cout);
      if (!solve_c.out.empty()) {
        nlohmann::json doc = solution_to_json(inst, s);
        doc["config"] = config_to_json(solve_c.cfg);
        doc["reproducibility"] =
            "single-threaded backend with fixed seed; runs that hit a time limit may differ";
        write_json(doc, solve_c.out);
      }
      return kOk;
    }

    if (*val) {
      val_c.cfg.validate();
      Instance inst = read_instance(val_instance);
      if (!fs::exists(val_solution)) throw UsageError("solution file not found: " + val_solution);
      Solution s = load_solution(inst, val_solution);
      ValidationReport r = simulate_schedule(
          inst, s, strict ? Tolerance::strict() : Tolerance::pla_aware(), val_c.cfg);
      for (const auto& v : r.violations) std::cout << "violation " << v.kind << ": " << v.message << "\n";
      for (const auto& v : r.warnings) std::cout << "warning " << v.kind << ": " << v.message << "\n";
      print_metrics(r.metrics, std::cout);
      std::cout << (r.ok ? "valid" : "INVALID") << "\n";
      return r.ok ? kOk : kFailed;
    }

    if (*rep) {
      rep_c.cfg.validate();
      auto instances = collect_instances(rep_inputs);
      auto algos = split_algos(rep_algos);
      auto backend = make_backend(rep_c.solver);
      auto rows = run_batch(instances, algos, rep_c.cfg, *backend);
      auto avg = average_rows(rows);
      rows.insert(rows.end(), avg.begin(), avg.end());
      print_rows(rows, std::cout);
      if (!rep_c.out.empty()) write_batch_csv(rows, rep_c.out);
      if (!rep_long.empty()) write_long_csv(rows, rep_long);
      return kOk;
    }

    if (*sweep) {
      sweep_c.cfg.validate();
      auto instances = collect_instances(sweep_inputs);
      auto algos = split_algos(sweep_algos);
      auto backend = make_backend(sweep_c.solver);
      std::vector<std::vector<BatchRow>> runs;
      for (double a : alphas) {
        SolveConfig cfg = sweep_c.cfg;
        cfg.alpha_delay = a;
        cfg.validate();
        runs.push_back(run_batch(instances, algos, cfg, *backend));
        std::cout << fmt::format("alpha_d = {}\n", a);
        print_rows(runs.back(), std::cout);
      }
      for (std::size_t r = 1; r < runs.size(); ++r) {
        SensitivityTable t = sensitivity_compare(runs[0], runs[r]);
        std::cout << fmt::format("\ndelta alpha_d {} - {} (two-sided paired t-tests)\n",
                                 alphas[r], alphas[0]);
        for (const auto& test : t.tests)
          std::cout << fmt::format("{:<4} {:<20} mean delta {:>10.4f}  t {:>9.4f}  p {:.4f}{}\n",
                                   test.algorithm, test.measure, test.test.mean_diff,
                                   test.test.t, test.test.p,
                                   test.test.degenerate ? " (zero variance)" : "");
        if (!sweep_c.out.empty()) {
          fs::path out = sweep_c.out;
          if (runs.size() > 2)
            out.replace_filename(fmt::format("{}_{}{}", out.stem().string(), r,
                                             out.extension().string()));
          write_sensitivity_csv(t, out);
        }
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
