#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hdp_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = hdp::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hdp_cli_test_" + std::to_string(std::rand()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& s) const { return (path / s).string(); }
};

}  // namespace

TEST_CASE("simulate writes CSV and manifest") {
  TempDir d;
  const auto r = run({"simulate", "--family", "benchmark", "--paths", "3", "--steps", "4", "--out", d.sub("a")});
  REQUIRE(r.code == 0);
  const auto csv = lines(slurp(d.sub("a/paths.csv")));
  REQUIRE(csv.size() == 1 + 15);
  CHECK(csv[0] == "path_id,t,B,B_theta,L,X");
  const auto m = nlohmann::json::parse(slurp(d.sub("a/manifest.json")));
  CHECK(m["schema_version"] == 1);
  CHECK(m["config"]["steps"] == 4);
  CHECK(m["seeds"]["master_seed"] == 20231109u);

  // Same config twice gives identical files.
  REQUIRE(run({"simulate", "--family", "benchmark", "--paths", "3", "--steps", "4", "--out", d.sub("b")}).code == 0);
  CHECK(slurp(d.sub("a/paths.csv")) == slurp(d.sub("b/paths.csv")));
}

TEST_CASE("simulate flags the known non-solution") {
  TempDir d;
  const auto r = run({"simulate", "--family", "skew", "--alpha", "-0.5", "--theta", "0.5", "--steps", "10", "--out",
                      d.sub("s")});
  REQUIRE(r.code == 0);
  const auto m = nlohmann::json::parse(slurp(d.sub("s/manifest.json")));
  CHECK(m["non_solution_flag"] == true);
  const auto csv = lines(slurp(d.sub("s/paths.csv")));
  CHECK(csv.size() == 12);
}

TEST_CASE("every family and the json format") {
  TempDir d;
  for (std::string fam : {"stopped", "nonmarkov", "reflected", "skew"}) {
    const auto r = run({"simulate", "--family", fam, "--x0", "0.5", "--steps", "8", "--paths", "2", "--format",
                        "json", "--out", d.sub(fam)});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(d.sub(fam + "/paths.json")));
    CHECK(j["rows"].size() == 18);
  }
}

TEST_CASE("config errors exit with 2 and leave no output") {
  TempDir d;
  CHECK(run({"simulate", "--alpha", "1.5", "--out", d.sub("x")}).code == 2);
  CHECK_FALSE(fs::exists(d.sub("x/manifest.json")));
  CHECK(run({"simulate", "--family", "bogus", "--out", d.sub("x")}).code == 2);
  CHECK(run({"simulate", "--steps", "0", "--out", d.sub("x")}).code == 2);
  CHECK(run({"simulate", "--nonsense"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"verify", "--suite", "foo", "--out", d.sub("x")}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("seed comes from the flag, then the environment") {
  TempDir d;
  ::setenv("HDP_LAB_SEED", "77", 1);
  REQUIRE(run({"simulate", "--steps", "4", "--out", d.sub("e")}).code == 0);
  auto m = nlohmann::json::parse(slurp(d.sub("e/manifest.json")));
  CHECK(m["seeds"]["master_seed"] == 77);
  CHECK(m["seeds"]["source"] == "HDP_LAB_SEED");
  REQUIRE(run({"simulate", "--steps", "4", "--seed", "5", "--out", d.sub("f")}).code == 0);
  m = nlohmann::json::parse(slurp(d.sub("f/manifest.json")));
  CHECK(m["seeds"]["master_seed"] == 5);
  ::setenv("HDP_LAB_SEED", "abc", 1);
  CHECK(run({"simulate", "--steps", "4", "--out", d.sub("g")}).code == 2);
  ::unsetenv("HDP_LAB_SEED");
}

TEST_CASE("config file, overridden by flags") {
  TempDir d;
  {
    std::ofstream cfg(d.sub("run.ini"));
    cfg << "steps = 6\npaths = 2\nalpha = 0.25\n";
  }
  REQUIRE(run({"simulate", "--config", d.sub("run.ini"), "--paths", "1", "--out", d.sub("c")}).code == 0);
  const auto m = nlohmann::json::parse(slurp(d.sub("c/manifest.json")));
  CHECK(m["config"]["steps"] == 6);
  CHECK(m["config"]["paths"] == 1);
  CHECK(m["config"]["alpha"] == 0.25);
}

TEST_CASE("density subcommand") {
  TempDir d;
  {
    std::ofstream p(d.sub("skew.csv"));
    p << "b\n0\n";
  }
  auto r = run({"density", "--which", "skew", "--theta", "0", "--points", d.sub("skew.csv"), "--out", d.sub("o")});
  REQUIRE(r.code == 0);
  auto csv = lines(slurp(d.sub("o/density_skew.csv")));
  REQUIRE(csv.size() == 2);
  CHECK(std::stod(csv[1].substr(csv[1].find(',') + 1)) == doctest::Approx(0.3989422804014327));

  {
    std::ofstream p(d.sub("yb.csv"));
    p << "1,0\n1,5\n";
  }
  r = run({"density", "--which", "joint-yb", "--theta", "0.5", "--points", d.sub("yb.csv"), "--out", d.sub("o")});
  CHECK(r.code == 1);
  csv = lines(slurp(d.sub("o/density_joint-yb.csv")));
  REQUIRE(csv.size() == 3);
  CHECK(csv[2] == "1,5,0,outside support");

  {
    std::ofstream p(d.sub("bl.csv"));
    p << "0.5,0\n0.5,0.2\n";
  }
  r = run({"density", "--which", "joint-bl", "--theta", "0.5", "--points", d.sub("bl.csv"), "--out", d.sub("o")});
  CHECK(r.code == 1);
  csv = lines(slurp(d.sub("o/density_joint-bl.csv")));
  CHECK(csv[1].find("error") != std::string::npos);
  CHECK(csv[2].find(",ok") != std::string::npos);

  CHECK(run({"density", "--which", "nope", "--points", d.sub("bl.csv"), "--out", d.sub("o")}).code == 2);
  CHECK(run({"density", "--which", "skew", "--points", d.sub("missing.csv"), "--out", d.sub("o")}).code == 2);
}

TEST_CASE("msd, exit-prob and reverse subcommands") {
  TempDir d;
  auto r = run({"msd", "--alpha", "0", "--theta", "1", "--out", d.sub("m")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("msd=0.36338") != std::string::npos);

  r = run({"exit-prob", "--theta", "0.6", "--paths", "200", "--dt", "1e-4", "--out", d.sub("e")});
  CHECK(r.code == 0);
  CHECK(fs::exists(d.sub("e/exit_prob.csv")));

  r = run({"reverse", "--theta", "0.5", "--t-end", "0.5", "--horizon", "1", "--steps", "50", "--paths", "2",
           "--out", d.sub("r")});
  CHECK(r.code == 0);
  CHECK(lines(slurp(d.sub("r/reversed.csv"))).size() == 1 + 2 * 51);
  r = run({"reverse", "--theta", "1", "--t-end", "0.5", "--horizon", "1", "--steps", "50", "--terminal-from",
           "explicit", "--y-terminal", "0.4", "--z-terminal", "-0.3", "--out", d.sub("r1")});
  CHECK(r.code == 0);
  r = run({"reverse", "--theta", "0.5", "--terminal-from", "explicit", "--y-terminal", "1", "--z-terminal", "5",
           "--out", d.sub("r2")});
  CHECK(r.code == 2);
  CHECK(run({"reverse", "--theta", "0.5", "--t-end", "2", "--horizon", "1", "--out", d.sub("r3")}).code == 2);
}

TEST_CASE("verify subcommand writes a report array") {
  TempDir d;
  const auto r = run({"verify", "--suite", "heat", "--out", d.sub("v")});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(d.sub("v/verify_heat.json")));
  REQUIRE(j.is_array());
  CHECK(j.size() == 2);
  CHECK(j[0]["pass"] == true);
  CHECK(j[0]["metadata"].contains("seed"));
}
