// End-to-end tests of the command line: subcommands, report fields, output
// determinism, and the exit-code contract (0 success, 1 usage/parse, 2
// rejected input, 3 numerical failure).

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("liespec_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  CliResult res;
  const fs::path errfile = work_dir() / "stderr.txt";
  const std::string cmd = std::string("\"") + LIESPEC_CLI_PATH + "\" " + args + " 2>" + errfile.string();
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
  const int status = ::pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream ein(errfile);
  std::stringstream ss;
  ss << ein.rdbuf();
  res.err = ss.str();
  return res;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = work_dir() / name;
  std::ofstream out(p);
  out << text;
  return p.string();
}

std::string emitted(const std::string& name) {
  static bool done = [] {
    const CliResult r = run_cli("examples emit --all --dir " + work_dir().string());
    REQUIRE(r.exit_code == 0);
    return true;
  }();
  (void)done;
  return (work_dir() / (name + ".json")).string();
}

bool close_pair(const ordered_json& e, double re, double im, double eps = 1e-9) {
  return e.is_array() && e.size() == 2 && std::abs(e[0].get<double>() - re) < eps &&
         std::abs(e[1].get<double>() - im) < eps;
}

}  // namespace

TEST_CASE("examples list names every built-in instance") {
  const CliResult r = run_cli("examples list");
  REQUIRE(r.exit_code == 0);
  const ordered_json j = ordered_json::parse(r.out);
  REQUIRE(j.is_array());
  bool has_g2 = false;
  for (const auto& e : j) has_g2 = has_g2 || e["name"] == "g2";
  CHECK(has_g2);
  CHECK(j.size() >= 5);

  const CliResult t = run_cli("examples list --format text");
  REQUIRE(t.exit_code == 0);
  CHECK(t.out.find("g2:") != std::string::npos);
}

TEST_CASE("spectrum reports the frozen points of the solvable pair") {
  const CliResult r = run_cli("spectrum " + emitted("g2"));
  REQUIRE(r.exit_code == 0);
  const ordered_json j = ordered_json::parse(r.out);
  CHECK(j["schema"] == "liespec-report-v1");
  CHECK(j["command"] == "spectrum");
  CHECK(j["instance"] == "g2");
  CHECK(j["flag"]["k"] == 1);
  REQUIRE(j["points"].size() == 2);
  CHECK(close_pair(j["points"][0]["input"][0], 0, 0));
  CHECK(close_pair(j["points"][0]["input"][1], -1.5, 0));
  CHECK(close_pair(j["points"][1]["input"][1], 0.5, 0));
  CHECK(j["points"][1]["betti"] == ordered_json::array({1, 1, 0}));
  CHECK(j["candidates_tested"] == 3);

  // byte-identical rerun
  const CliResult again = run_cli("spectrum " + emitted("g2"));
  REQUIRE(again.exit_code == 0);
  CHECK(again.out == r.out);

  // tolerance flags are accepted and leave the result intact
  const CliResult flagged = run_cli("spectrum " + emitted("g2") + " --tol-rank 1e-9");
  REQUIRE(flagged.exit_code == 0);
  CHECK(ordered_json::parse(flagged.out)["points"].size() == 2);
}

TEST_CASE("analyze reports classification and flag data") {
  const CliResult r = run_cli("analyze " + emitted("g2"));
  REQUIRE(r.exit_code == 0);
  const ordered_json j = ordered_json::parse(r.out);
  CHECK(j["classification"]["class"] == "solvable");
  CHECK(j["classification"]["derived_dims"] == ordered_json::array({2, 1, 0}));
  CHECK(j["flag"]["k"] == 1);
  CHECK(j["flag"]["nilpotent_shape"] == false);
  CHECK(j["component_spectra"].size() == 2);

  const CliResult h = run_cli("analyze " + emitted("heisenberg"));
  REQUIRE(h.exit_code == 0);
  const ordered_json hj = ordered_json::parse(h.out);
  CHECK(hj["classification"]["class"] == "nilpotent");
  CHECK(hj["flag"]["nilpotent_shape"] == true);
}

TEST_CASE("verify runs the requested checks and reports all_passed") {
  const CliResult r = run_cli("verify " + emitted("g2") + " --checks dd,split");
  REQUIRE(r.exit_code == 0);
  const ordered_json j = ordered_json::parse(r.out);
  REQUIRE(j["checks"].size() == 2);
  CHECK(j["checks"][0]["check"] == "dd");
  CHECK(j["checks"][0]["status"] == "passed");
  CHECK(j["checks"][1]["check"] == "split");
  CHECK(j["checks"][1]["status"] == "passed");
  CHECK(j["all_passed"] == true);
}

TEST_CASE("verify skips checks whose precondition fails") {
  const CliResult r = run_cli("verify " + emitted("g2") + " --checks thm2,oracle");
  REQUIRE(r.exit_code == 0);
  const ordered_json j = ordered_json::parse(r.out);
  CHECK(j["checks"][0]["status"].get<std::string>().rfind("skipped", 0) == 0);
  CHECK(j["checks"][1]["status"].get<std::string>().rfind("skipped", 0) == 0);
  CHECK(j["all_passed"] == true);
}

TEST_CASE("oracle agrees with the diagonal pairing") {
  const CliResult r = run_cli("oracle " + emitted("commuting_diag"));
  REQUIRE(r.exit_code == 0);
  const ordered_json j = ordered_json::parse(r.out);
  REQUIRE(j["points"].size() == 2);
  CHECK(close_pair(j["points"][0][0], 1, 0));
  CHECK(close_pair(j["points"][0][1], 3, 0));
  CHECK(close_pair(j["points"][1][0], 2, 0));
  CHECK(close_pair(j["points"][1][1], 4, 0));
}

TEST_CASE("non-solvable and non-commuting input exits with the rejection code") {
  CHECK(run_cli("spectrum " + emitted("sl2")).exit_code == 2);
  CHECK(run_cli("verify " + emitted("sl2")).exit_code == 2);
  CHECK(run_cli("oracle " + emitted("g2")).exit_code == 2);
}

TEST_CASE("algebraically rejected families exit with code 2") {
  const std::string dep = write_file("dependent.json", R"({
    "name": "dependent", "space_dim": 2,
    "generators": [
      {"label": "y", "matrix": [[[1,0],[1,0]],[[-1,0],[-1,0]]]},
      {"label": "y2", "matrix": [[[2,0],[2,0]],[[-2,0],[-2,0]]]}
    ]})");
  const CliResult r = run_cli("spectrum " + dep);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("rejected") != std::string::npos);

  const std::string open = write_file("not_closed.json", R"({
    "name": "not_closed", "space_dim": 2,
    "generators": [
      {"label": "e", "matrix": [[[0,0],[1,0]],[[0,0],[0,0]]]},
      {"label": "f", "matrix": [[[0,0],[0,0]],[[1,0],[0,0]]]}
    ]})");
  CHECK(run_cli("spectrum " + open).exit_code == 2);
}

TEST_CASE("usage and parse problems exit with code 1") {
  CHECK(run_cli("spectrum " + work_dir().string() + "/does_not_exist.json").exit_code == 1);
  CHECK(run_cli("").exit_code == 1);

  const std::string bad = write_file("bad.json", "{ not json");
  CHECK(run_cli("spectrum " + bad).exit_code == 1);

  const std::string shape = write_file("shape.json", R"({
    "name": "shape", "space_dim": 2,
    "generators": [{"label": "a", "matrix": [[[1,0],[0,0]]]}]})");
  const CliResult r = run_cli("spectrum " + shape);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("rows") != std::string::npos);

  const std::string badtol = write_file("badtol.json", R"({
    "name": "badtol", "space_dim": 2,
    "generators": [{"label": "a", "matrix": [[[1,0],[0,0]],[[0,0],[2,0]]]}],
    "tolerances": {"rank_rel": -1}})");
  CHECK(run_cli("spectrum " + badtol).exit_code == 1);

  CHECK(run_cli("verify " + emitted("g2") + " --checks bogus").exit_code == 1);
}

TEST_CASE("generated instances are reproducible end to end") {
  const std::string a = (work_dir() / "gen_a.json").string();
  const std::string b = (work_dir() / "gen_b.json").string();
  REQUIRE(run_cli("examples gen --kind abelian --dim 3 --n 2 --seed 5 --out " + a).exit_code == 0);
  REQUIRE(run_cli("examples gen --kind abelian --dim 3 --n 2 --seed 5 --out " + b).exit_code == 0);
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  REQUIRE(!sa.str().empty());
  CHECK(sa.str() == sb.str());

  const ordered_json j = ordered_json::parse(sa.str());
  CHECK(j["name"] == "abelian-d3-n2-seed5");
  CHECK(j["expected_joint"].size() == 3);

  // the emitted file is a valid instance for the other subcommands
  const CliResult sp = run_cli("spectrum " + a);
  REQUIRE(sp.exit_code == 0);
  CHECK(ordered_json::parse(sp.out)["points"].size() == 3);
}

TEST_CASE("text format renders the same document deterministically") {
  const CliResult r = run_cli("spectrum " + emitted("g2") + " --format text");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("schema: \"liespec-report-v1\"") != std::string::npos);
  CHECK(r.out.find("points:") != std::string::npos);
  const CliResult again = run_cli("spectrum " + emitted("g2") + " --format text");
  CHECK(again.out == r.out);
}
