#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "robocontract/cli.hpp"

namespace fs = std::filesystem;
using robocontract::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("robocontract_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> files_under(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir).string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("menu formatting") {
  using robocontract::cli::format_menu;
  CHECK(format_menu({5.0, 7.5, 10.0}) == "(5.0, 7.5, 10.0)");
  CHECK(format_menu({10.0}) == "(10.0)");
  CHECK(format_menu({3.539852, 5.693234, 7.846617, 10.0}) == "(3.54, 5.69, 7.85, 10.0)");
}

TEST_CASE("payment command") {
  auto r = call({"payment", "--K", "3", "--r", "10"});
  CHECK(r.code == 0);
  CHECK(r.out.find("(5.0, 7.5, 10.0)") != std::string::npos);
  CHECK(r.out.find("verifier PASS") != std::string::npos);
  CHECK(r.out.find("oracle") != std::string::npos);

  r = call({"payment", "--K", "1", "--r", "10"});
  CHECK(r.code == 0);
  CHECK(r.out.find("(10.0)") != std::string::npos);

  r = call({"payment", "--K", "4", "--r", "10", "--gain-mode", "text-k"});
  CHECK(r.code == 0);
  CHECK(r.out.find("(2.5, 5.0, 7.5, 10.0)") != std::string::npos);
  CHECK(r.out.find("verifier PASS") != std::string::npos);

  r = call({"payment", "--K", "7"});
  CHECK(r.code == robocontract::cli::kConfigError);
  CHECK(r.err.find("assumption") != std::string::npos);
}

TEST_CASE("config errors") {
  CHECK(call({}).code == robocontract::cli::kConfigError);
  CHECK(call({"payment", "--bogus"}).code == robocontract::cli::kConfigError);
  CHECK(call({"run", "--scenario", "9", "--out", scratch("bad").string()}).code == robocontract::cli::kConfigError);
  CHECK(call({"run", "--alpha", "-1", "--out", scratch("bad").string()}).code == robocontract::cli::kConfigError);
  CHECK(call({"batch", "--methods", "oracle", "--out", scratch("bad").string()}).code ==
        robocontract::cli::kConfigError);
}

TEST_CASE("infeasible scenarios exit with their own code") {
  const auto dir = scratch("infeasible");
  fs::create_directories(dir);
  std::ofstream(dir / "spec.json") << R"({"id": 0, "user_type_counts": [4], "robot_type_counts": [500],
    "physics": {"workspace": [0, 0, 1, 1]}})";
  const auto r = call({"run", "--spec", (dir / "spec.json").string(), "--out", (dir / "out").string()});
  CHECK(r.code == robocontract::cli::kInfeasible);
}

TEST_CASE("run writes one trajectory per type and is deterministic") {
  const auto a = scratch("run_a"), b = scratch("run_b");
  REQUIRE(call({"run", "--scenario", "8", "--case", "2", "--out", a.string()}).code == 0);
  REQUIRE(call({"run", "--scenario", "8", "--case", "2", "--out", b.string()}).code == 0);
  const auto files = files_under(a);
  CHECK(files == std::vector<std::string>{"assignments.csv", "manifest.json", "summary.json",
                                          "trajectories/type_1.csv", "trajectories/type_2.csv",
                                          "trajectories/type_3.csv", "trajectories/type_4.csv",
                                          "trajectories/type_5.csv"});
  for (const auto& f : files) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(slurp(a / "trajectories/type_1.csv").rfind("t,type,robot_id,x,y\n", 0) == 0);
  CHECK(slurp(a / "summary.json").find("\"min_distance\"") != std::string::npos);
}

TEST_CASE("manifest replay reproduces outputs") {
  const auto a = scratch("replay_a"), b = scratch("replay_b");
  REQUIRE(call({"compare", "--scenario", "1,5", "--batch-size", "3", "--seed", "9", "--beta", "5", "--out",
                a.string()}).code == 0);
  REQUIRE(call({"compare", "--manifest", (a / "manifest.json").string(), "--out", b.string()}).code == 0);
  const auto files = files_under(a);
  CHECK(files == files_under(b));
  for (const auto& f : files) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(call({"batch", "--manifest", (a / "manifest.json").string(), "--out", scratch("x").string()}).code ==
        robocontract::cli::kConfigError);
}

TEST_CASE("compare and batch outputs") {
  const auto dir = scratch("compare");
  REQUIRE(call({"compare", "--scenario", "2", "--batch-size", "2", "--methods", "robust,max,samp", "--out",
                dir.string()}).code == 0);
  for (const char* f : {"table2.csv", "table3.csv", "table4.csv", "fig5.csv", "records.csv", "summary.json",
                        "manifest.json", "scenario_2/summary.json"})
    CHECK(fs::exists(dir / f));
  CHECK(slurp(dir / "fig5.csv").find("2,robust,") != std::string::npos);

  const auto only = scratch("compare_contract");
  REQUIRE(call({"compare", "--scenario", "1", "--batch-size", "2", "--methods", "contract", "--out",
                only.string()}).code == 0);
  CHECK(slurp(only / "fig5.csv") == "scenario,method,difference_mean,difference_std\n");

  const auto all = scratch("batch_all");
  REQUIRE(call({"batch", "--scenario", "all", "--batch-size", "1", "--out", all.string()}).code == 0);
  for (int id = 1; id <= 8; ++id) CHECK(fs::exists(all / ("scenario_" + std::to_string(id)) / "summary.json"));
}
