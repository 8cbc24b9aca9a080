#pragma once

#include <filesystem>
#include <stdexcept>

#include "railvolt/domain.hpp"

namespace railvolt {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& doc);

nlohmann::json solution_to_json(const Instance& instance, const Solution& solution);
/// Missing optional arrays default to zero; shape mismatches throw FormatError.
Solution solution_from_json(const Instance& instance, const nlohmann::json& doc);

nlohmann::json config_to_json(const SolveConfig& config);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);
Solution load_solution(const Instance& instance, const std::filesystem::path& path);
void save_solution(const Instance& instance, const Solution& solution,
                   const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace railvolt
