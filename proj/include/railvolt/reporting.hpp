#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "railvolt/domain.hpp"
#include "railvolt/solver_backend.hpp"

namespace railvolt {

inline constexpr int kCsvSchemaVersion = 1;

struct NamedInstance {
  std::string name;
  Instance instance;
};

struct BatchRow {
  std::string instance;
  std::string algorithm;
  std::string status;  // SolveStatus text, or "error" with a message
  Metrics metrics;
  double gap = 0.0;
  double seconds = 0.0;
  std::string message;
};

/// Solves one instance with "pla", "fa" or "bd". Throws std::invalid_argument
/// for an unknown algorithm name.
Solution solve_with(const std::string& algorithm, const Instance& instance,
                    const SolveConfig& config, SolverBackend& backend);

/// One row per (instance, algorithm) in input order. Failures become rows
/// with status "error".
std::vector<BatchRow> run_batch(const std::vector<NamedInstance>& instances,
                                const std::vector<std::string>& algorithms,
                                const SolveConfig& config, SolverBackend& backend);

/// Per-algorithm means over rows that produced a solution, named "Average".
std::vector<BatchRow> average_rows(const std::vector<BatchRow>& rows);

void write_batch_csv(const std::vector<BatchRow>& rows, const std::filesystem::path& path);
std::vector<BatchRow> read_batch_csv(const std::filesystem::path& path);
/// Long format: instance, algorithm, measure, value.
void write_long_csv(const std::vector<BatchRow>& rows, const std::filesystem::path& path);

struct TTest {
  int n = 0;
  double mean_diff = 0.0;
  double sd_diff = 0.0;
  double t = 0.0;
  double p = 1.0;  // two-sided
  bool degenerate = false;  // zero variance with nonzero mean
};

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided p value of Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Paired test on a - b. Throws std::domain_error on length mismatch or n < 2.
TTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

inline const std::vector<std::string> kMeasures{
    "objective",         "n_deployed",          "setup_cost",
    "delay_per_train",   "charge_per_train",    "swap_per_train",
    "charge_per_station", "swap_per_station"};

double measure(const Metrics& m, const std::string& name);

struct SensitivityCell {
  std::string instance;
  std::string algorithm;
  std::string measure;
  double base = 0.0;
  double varied = 0.0;
  double delta = 0.0;  // varied - base
};

struct SensitivityTest {
  std::string algorithm;
  std::string measure;
  TTest test;
};

struct SensitivityTable {
  std::vector<SensitivityCell> cells;
  std::vector<SensitivityTest> tests;
};

/// Pairs rows by (instance, algorithm). Throws std::domain_error when the two
/// sides do not cover the same pairs. Rows without a solution are skipped on
/// both sides.
SensitivityTable sensitivity_compare(const std::vector<BatchRow>& base,
                                     const std::vector<BatchRow>& varied);

void write_sensitivity_csv(const SensitivityTable& table, const std::filesystem::path& path);

}  // namespace railvolt
