#include "railvolt/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "railvolt/benders.hpp"
#include "railvolt/fix_algorithm.hpp"
#include "railvolt/pla_model.hpp"
#include "railvolt/validator.hpp"

namespace railvolt {

Solution solve_with(const std::string& algo, const Instance& inst, const SolveConfig& cfg,
                    SolverBackend& backend) {
  if (algo == "pla") return solve_pla(inst, cfg, backend);
  if (algo == "fa") return run_fix_algorithm(inst, cfg, backend);
  if (algo == "bd") return run_benders(inst, cfg, backend).solution;
  throw std::invalid_argument("unknown algorithm '" + algo + "' (expected pla, fa or bd)");
}

namespace {

bool solved(const std::string& status) {
  return status == "optimal" || status == "feasible_limit";
}

std::string clean(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

}  // namespace

std::vector<BatchRow> run_batch(const std::vector<NamedInstance>& instances,
                                const std::vector<std::string>& algorithms,
                                const SolveConfig& cfg, SolverBackend& backend) {
  std::vector<BatchRow> rows;
  for (const auto& ni : instances)
    for (const auto& algo : algorithms) {
      BatchRow row;
      row.instance = ni.name;
      row.algorithm = algo;
      try {
        Solution s = solve_with(algo, ni.instance, cfg, backend);
        row.status = to_string(s.status);
        row.gap = s.gap;
        row.seconds = s.wall_seconds;
        if (solved(row.status)) row.metrics = recompute_metrics(ni.instance, s, cfg);
        if (s.log.contains("note")) row.message = s.log["note"].get<std::string>();
      } catch (const std::exception& e) {
        row.status = "error";
        row.message = e.what();
      }
      rows.push_back(std::move(row));
    }
  return rows;
}

double measure(const Metrics& m, const std::string& name) {
  if (name == "objective") return m.objective;
  if (name == "n_deployed") return m.n_deployed;
  if (name == "setup_cost") return m.setup_cost;
  if (name == "delay_per_train") return m.avg_delay_per_train;
  if (name == "charge_per_train") return m.avg_charge_hours_per_train;
  if (name == "swap_per_train") return m.avg_swap_hours_per_train;
  if (name == "charge_per_station") return m.avg_charge_hours_per_station;
  if (name == "swap_per_station") return m.avg_swap_hours_per_station;
  throw std::invalid_argument("unknown measure '" + name + "'");
}

std::vector<BatchRow> average_rows(const std::vector<BatchRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const BatchRow*>> by_algo;
  for (const auto& r : rows) {
    if (!by_algo.count(r.algorithm)) order.push_back(r.algorithm);
    auto& bucket = by_algo[r.algorithm];
    if (solved(r.status)) bucket.push_back(&r);
  }
  std::vector<BatchRow> out;
  for (const auto& algo : order) {
    const auto& bucket = by_algo[algo];
    BatchRow avg;
    avg.instance = "Average";
    avg.algorithm = algo;
    avg.status = bucket.empty() ? "error" : "average";
    avg.message = fmt::format("{} of {} rows", bucket.size(),
                              std::count_if(rows.begin(), rows.end(),
                                            [&](const BatchRow& r) { return r.algorithm == algo; }));
    if (!bucket.empty()) {
      double n = static_cast<double>(bucket.size());
      double deployed = 0.0;
      for (const BatchRow* r : bucket) {
        Metrics& a = avg.metrics;
        const Metrics& m = r->metrics;
        a.objective += m.objective / n;
        deployed += m.n_deployed / n;
        a.setup_cost += m.setup_cost / n;
        a.avg_delay_per_train += m.avg_delay_per_train / n;
        a.avg_charge_hours_per_train += m.avg_charge_hours_per_train / n;
        a.avg_swap_hours_per_train += m.avg_swap_hours_per_train / n;
        a.avg_charge_hours_per_station += m.avg_charge_hours_per_station / n;
        a.avg_swap_hours_per_station += m.avg_swap_hours_per_station / n;
        avg.gap += r->gap / n;
        avg.seconds += r->seconds / n;
      }
      avg.metrics.n_deployed = static_cast<int>(std::lround(deployed));
    }
    out.push_back(std::move(avg));
  }
  return out;
}

void write_batch_csv(const std::vector<BatchRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# railvolt batch v" << kCsvSchemaVersion << "\n";
  out << "instance,algorithm,status,objective,n_deployed,setup_cost,delay_per_train,"
         "charge_per_train,swap_per_train,charge_per_station,swap_per_station,gap,seconds,"
         "message\n";
  for (const auto& r : rows) {
    const Metrics& m = r.metrics;
    out << fmt::format("{},{},{},{:.6f},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.3f},{}\n",
                       clean(r.instance), r.algorithm, r.status, m.objective, m.n_deployed,
                       m.setup_cost, m.avg_delay_per_train, m.avg_charge_hours_per_train,
                       m.avg_swap_hours_per_train, m.avg_charge_hours_per_station,
                       m.avg_swap_hours_per_station, r.gap, r.seconds, clean(r.message));
  }
}

std::vector<BatchRow> read_batch_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<BatchRow> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 14) throw std::runtime_error("malformed batch row: " + line);
    BatchRow r;
    r.instance = f[0];
    r.algorithm = f[1];
    r.status = f[2];
    r.metrics.objective = std::stod(f[3]);
    r.metrics.n_deployed = std::stoi(f[4]);
    r.metrics.setup_cost = std::stod(f[5]);
    r.metrics.avg_delay_per_train = std::stod(f[6]);
    r.metrics.avg_charge_hours_per_train = std::stod(f[7]);
    r.metrics.avg_swap_hours_per_train = std::stod(f[8]);
    r.metrics.avg_charge_hours_per_station = std::stod(f[9]);
    r.metrics.avg_swap_hours_per_station = std::stod(f[10]);
    r.gap = std::stod(f[11]);
    r.seconds = std::stod(f[12]);
    r.message = f[13];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_long_csv(const std::vector<BatchRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "instance,algorithm,measure,value\n";
  for (const auto& r : rows) {
    if (!solved(r.status) && r.status != "average") continue;
    for (const auto& name : kMeasures)
      out << fmt::format("{},{},{},{:.6f}\n", clean(r.instance), r.algorithm, name,
                         measure(r.metrics, name));
  }
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0 && b > 0)) throw std::domain_error("incomplete_beta needs a, b > 0");
  if (x < 0 || x > 1) throw std::domain_error("incomplete_beta needs x in [0,1]");
  if (x == 0.0 || x == 1.0) return x;
  if (x > (a + 1) / (a + b + 2)) return 1.0 - incomplete_beta(b, a, 1.0 - x);
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log1p(-x)) / a;
  // Modified Lentz evaluation of the continued fraction.
  constexpr double tiny = 1e-300;
  double f = 1.0, c = 1.0, d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const int m = i / 2;
    double num;
    if (i == 0)
      num = 1.0;
    else if (i % 2 == 0)
      num = m * (b - m) * x / ((a + 2.0 * m - 1) * (a + 2.0 * m));
    else
      num = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    const double cd = c * d;
    f *= cd;
    if (std::abs(1.0 - cd) < 1e-15) return front * (f - 1.0);
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0)) throw std::domain_error("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::domain_error(fmt::format("paired samples differ in length: {} vs {}", a.size(),
                                        b.size()));
  if (a.size() < 2) throw std::domain_error("paired t-test needs at least two pairs");
  TTest r;
  r.n = static_cast<int>(a.size());
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  r.mean_diff = std::accumulate(d.begin(), d.end(), 0.0) / r.n;
  double ss = 0.0;
  for (double x : d) ss += (x - r.mean_diff) * (x - r.mean_diff);
  r.sd_diff = std::sqrt(ss / (r.n - 1));
  const double scale = std::max(1.0, std::abs(r.mean_diff));
  if (r.sd_diff <= 1e-12 * scale) {
    if (std::abs(r.mean_diff) <= 1e-12) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = std::copysign(kInf, r.mean_diff);
      r.p = 0.0;
      r.degenerate = true;
    }
    return r;
  }
  r.t = r.mean_diff / (r.sd_diff / std::sqrt(static_cast<double>(r.n)));
  r.p = student_t_two_sided_p(r.t, r.n - 1);
  return r;
}

SensitivityTable sensitivity_compare(const std::vector<BatchRow>& base,
                                     const std::vector<BatchRow>& varied) {
  auto key = [](const BatchRow& r) { return r.instance + "\x1f" + r.algorithm; };
  std::map<std::string, const BatchRow*> vmap;
  for (const auto& r : varied)
    if (r.instance != "Average") vmap[key(r)] = &r;
  std::size_t nbase = 0;
  SensitivityTable table;
  std::vector<std::string> algos;
  std::map<std::string, std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>>
      samples;
  for (const auto& r : base) {
    if (r.instance == "Average") continue;
    ++nbase;
    auto it = vmap.find(key(r));
    if (it == vmap.end())
      throw std::domain_error(fmt::format("no varied result for instance '{}' algorithm {}",
                                          r.instance, r.algorithm));
    const BatchRow& v = *it->second;
    if (!solved(r.status) || !solved(v.status)) continue;
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end())
      algos.push_back(r.algorithm);
    for (const auto& name : kMeasures) {
      double x = measure(r.metrics, name), y = measure(v.metrics, name);
      table.cells.push_back({r.instance, r.algorithm, name, x, y, y - x});
      samples[r.algorithm][name].first.push_back(y);
      samples[r.algorithm][name].second.push_back(x);
    }
  }
  if (nbase != vmap.size())
    throw std::domain_error("base and varied results cover different instance sets");
  for (const auto& algo : algos)
    for (const auto& name : kMeasures) {
      const auto& [y, x] = samples[algo][name];
      if (y.size() < 2) continue;
      table.tests.push_back({algo, name, paired_t_test(y, x)});
    }
  return table;
}

void write_sensitivity_csv(const SensitivityTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# railvolt sensitivity v" << kCsvSchemaVersion << ", paired t-tests are two-sided\n";
  out << "instance,algorithm,measure,base,varied,delta,t,p\n";
  for (const auto& c : table.cells)
    out << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},,\n", clean(c.instance), c.algorithm,
                       c.measure, c.base, c.varied, c.delta);
  for (const auto& t : table.tests)
    out << fmt::format("t-test,{},{},,,{:.6f},{:.6f},{:.8f}\n", t.algorithm, t.measure,
                       t.test.mean_diff, t.test.t, t.test.p);
}

}  // namespace railvolt
