#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "helpers.hpp"

using namespace liftmap;
using nlohmann::json;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  REQUIRE(f.good());
  f << text;
}

std::string triangle_path() {
  static std::string path = [] {
    std::string p = "cli_triangle.json";
    write_file(p, model_to_json(testing::frustrated_triangle()).dump(2));
    return p;
  }();
  return path;
}

std::string mln_path() {
  static std::string path = [] {
    std::string p = "cli_semi.mln";
    write_file(p, testing::semi_transitive_mln(4));
    return p;
  }();
  return path;
}

struct CliRun {
  int exit_code;
  std::string out, err;
  json parsed;
};

CliRun run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(std::move(args), out, err);
  CliRun r{code, out.str(), err.str(), {}};
  if (!r.out.empty() && r.out[0] == '{') r.parsed = json::parse(r.out);
  return r;
}

std::string without_wall_ms(const std::string& text) {
  std::istringstream in(text);
  std::string line, kept;
  while (std::getline(in, line))
    if (line.find("wall_ms") == std::string::npos) kept += line + "\n";
  return kept;
}

}  // namespace

TEST_CASE("solve reports the local relaxation") {
  CliRun r = run_cli({"solve", triangle_path(), "--relaxation", "local"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.parsed["status"] == "optimal");
  CHECK(r.parsed["objective"].get<double>() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(r.parsed["total"].get<double>() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(r.parsed["num_node_orbits"] == 1);
  CHECK(r.parsed["num_edge_orbits"] == 1);
  CHECK(r.parsed["group_order"] == "6");
  CHECK_FALSE(r.parsed["integral"].get<bool>());
}

TEST_CASE("solve closes the gap with cycle cuts") {
  CliRun r = run_cli({"solve", triangle_path(), "--relaxation", "cycle"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.parsed["objective"].get<double>() == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(r.parsed["cycle_converged"].get<bool>());
  CHECK(r.parsed["rounds"].get<int>() >= 1);
  REQUIRE(r.parsed["trace"].is_array());
  CHECK(r.parsed["trace"][0].get<double>() == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("solve can enumerate exactly") {
  CliRun r = run_cli({"solve", triangle_path(), "--relaxation", "exact"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.parsed["objective"].get<double>() == doctest::Approx(-1.0));
  REQUIRE(r.parsed["assignment"].is_array());
  CHECK(r.parsed["assignment"].size() == 3);
}

TEST_CASE("solve with the message passing solver") {
  CliRun r = run_cli({"solve", triangle_path(), "--solver", "mplp"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.parsed["objective"].get<double>() == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(r.parsed["sweeps"].get<int>() >= 1);
  CHECK(r.parsed["assignment"].size() == 3);

  // mplp is defined on the local relaxation only
  CliRun bad = run_cli({"solve", triangle_path(), "--solver", "mplp", "--relaxation", "cycle"});
  CHECK(bad.exit_code == 1);
  CHECK(bad.parsed.contains("error"));
}

TEST_CASE("solve output is deterministic") {
  std::vector<std::string> args{"solve", triangle_path(), "--relaxation", "cycle"};
  CliRun a = run_cli(args);
  CliRun b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(without_wall_ms(a.out) == without_wall_ms(b.out));
}

TEST_CASE("solve grounds logical inputs") {
  CliRun r = run_cli({"solve", mln_path(), "--relaxation", "local", "--symmetry", "renaming"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.parsed["domain"] == 4);
  CHECK(r.parsed["offset"].get<double>() == doctest::Approx(1.1));
  CHECK(r.parsed["num_vars"] == 12);
  CHECK(r.parsed["num_node_orbits"] == 7);
  CHECK(r.parsed["group_order"] == "2");
  CHECK(r.parsed["total"].get<double>() ==
        doctest::Approx(r.parsed["objective"].get<double>() + 1.1));

  CliRun bigger = run_cli({"solve", mln_path(), "--relaxation", "local", "--symmetry",
                           "renaming", "--domain", "5"});
  REQUIRE(bigger.exit_code == 0);
  CHECK(bigger.parsed["domain"] == 5);
  CHECK(bigger.parsed["num_vars"] == 20);
  CHECK(bigger.parsed["num_node_orbits"] == 7);
  CHECK(bigger.parsed["group_order"] == "6");
}

TEST_CASE("orbit reporting") {
  CliRun r = run_cli({"orbits", mln_path(), "--symmetry", "renaming", "--domain", "5", "--cells",
                      "--dump-grounding"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.parsed["var_orbits"] == 7);
  CHECK(r.parsed["feature_orbits"] == 14);
  CHECK(r.parsed["edge_orbits"] == 13);
  CHECK(r.parsed["arc_orbits"] == 26);
  CHECK(r.parsed["merged_edge_orbits"] == 0);
  CHECK(r.parsed["group_order"] == "6");
  REQUIRE(r.parsed["var_orbit_cells"].is_array());
  CHECK(r.parsed["var_orbit_cells"].size() == 7);
  CHECK(r.parsed["atoms"].size() == 20);
  CHECK(r.parsed["features"].size() == r.parsed["num_features"].get<size_t>());

  CliRun tri = run_cli({"orbits", triangle_path()});
  REQUIRE(tri.exit_code == 0);
  CHECK(tri.parsed["var_orbits"] == 1);
  CHECK(tri.parsed["merged_edge_orbits"] == 1);
}

TEST_CASE("bench compares configurations") {
  std::string csv_path = "cli_bench.csv";
  CliRun r = run_cli({"bench", triangle_path(), "--csv", csv_path});
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.parsed["configs"].is_array());
  std::vector<std::string> names;
  for (const auto& c : r.parsed["configs"]) {
    names.push_back(c["config"].get<std::string>());
    CHECK(c["status"] == "optimal");
  }
  CHECK(names == std::vector<std::string>{"ground-local", "lifted-local", "ground-cycle",
                                          "lifted-cycle", "exact"});

  std::string csv = read_text_file(csv_path);
  CHECK(csv.rfind("config,status,objective,total,wall_ms,lp_vars,lp_rows,rounds\n", 0) == 0);
  CHECK(csv.find("lifted-cycle,optimal,") != std::string::npos);
}

TEST_CASE("verification passes on the fixtures") {
  std::ostringstream out, err;
  int code = cli::run({"verify", triangle_path()}, out, err);
  CHECK(code == 0);
  CHECK(out.str().find("FAIL") == std::string::npos);
  CHECK(out.str().find("verified: 0 failure(s)") != std::string::npos);

  std::ostringstream out2, err2;
  code = cli::run({"verify", mln_path(), "--domain", "4"}, out2, err2);
  CHECK(code == 0);
  CHECK(out2.str().find("verified: 0 failure(s)") != std::string::npos);
}

TEST_CASE("result files mirror stdout") {
  std::string out_path = "cli_solve_out.json";
  CliRun r = run_cli({"solve", triangle_path(), "--out", out_path});
  REQUIRE(r.exit_code == 0);
  json from_file = json::parse(read_text_file(out_path));
  CHECK(from_file == r.parsed);
}

TEST_CASE("errors surface as json with a nonzero exit") {
  CliRun missing = run_cli({"solve", "no_such_file.json"});
  CHECK(missing.exit_code == 1);
  CHECK(missing.parsed.contains("error"));

  CliRun renaming = run_cli({"solve", triangle_path(), "--symmetry", "renaming"});
  CHECK(renaming.exit_code == 1);
  CHECK(renaming.parsed.contains("error"));

  CliRun domain = run_cli({"solve", triangle_path(), "--domain", "4"});
  CHECK(domain.exit_code == 1);
  CHECK(domain.parsed.contains("error"));

  CliRun flag = run_cli({"solve", triangle_path(), "--bogus"});
  CHECK(flag.exit_code != 0);

  CliRun none = run_cli({});
  CHECK(none.exit_code != 0);
}
