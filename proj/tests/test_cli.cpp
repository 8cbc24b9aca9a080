#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "railvolt/io.hpp"
#include "railvolt/validator.hpp"
#include "support.hpp"

using namespace railvolt;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  fs::path log = fs::temp_directory_path() / "railvolt_cli_test.out";
  std::string cmd = std::string(RAILVOLT_CLI) + " " + args + " > " + log.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST_CASE("validate the published schedule") {
  Run r = run("validate --instance " + testing::source_path("instances/illustrative.json") +
              " --solution " + testing::source_path("instances/table2_schedule.json"));
  CHECK(r.code == 0);
  CHECK(r.out.find("valid") != std::string::npos);
  Run strict = run("validate --strict --instance " +
                   testing::source_path("instances/illustrative.json") + " --solution " +
                   testing::source_path("instances/table2_schedule.json"));
  CHECK(strict.code == 1);
}

TEST_CASE("usage errors exit with 2") {
  const std::string inst = testing::source_path("instances/illustrative.json");
  CHECK(run("solve --algo xyz --instance " + inst).code == 2);
  CHECK(run("solve --algo pla").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("solve --algo pla --instance /nonexistent.json").code == 2);
  CHECK(run("solve --algo pla --alpha-d -1 --instance " + inst).code == 2);
  CHECK(run("generate --size huge").code == 2);
}

TEST_CASE("generate writes a valid instance") {
  fs::path out = tmp("railvolt_cli_gen.json");
  REQUIRE(run("generate --size small --seed 4 --out " + out.string()).code == 0);
  Instance inst = load_instance(out);
  CHECK(inst.num_stations() == 6);
  CHECK(validate_instance(inst, 0).empty());
  Run again = run("generate --size small --seed 4");
  CHECK(again.code == 0);
  CHECK(nlohmann::json::parse(again.out) == read_json(out));
  fs::remove(out);
}

TEST_CASE("solve and validate round trip") {
  fs::path inst_path = tmp("railvolt_cli_tiny.json");
  fs::path sol_path = tmp("railvolt_cli_tiny_sol.json");
  save_instance(testing::tiny_instance(), inst_path);
  Run r = run("solve --algo pla --print --instance " + inst_path.string() + " --out " +
              sol_path.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("status optimal") != std::string::npos);
  nlohmann::json doc = read_json(sol_path);
  CHECK(doc.contains("config"));
  CHECK(doc.contains("reproducibility"));
  CHECK(run("validate --instance " + inst_path.string() + " --solution " + sol_path.string())
            .code == 0);

  fs::path bad = tmp("railvolt_cli_bad.json");
  Instance hopeless = testing::tiny_instance({8, 9, 7});
  save_instance(hopeless, bad);
  CHECK(run("solve --algo pla --instance " + bad.string()).code == 1);
  fs::remove(inst_path);
  fs::remove(sol_path);
  fs::remove(bad);
}
