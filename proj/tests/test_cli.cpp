#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "perc/cli.hpp"

using json = nlohmann::json;

TEST_SUITE_BEGIN("cli");

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = perc::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("bounds: oriented site d=7 prints the published cell") {
  CliResult r = run_cli({"bounds", "--family", "oriented-site", "--d", "7"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["family"] == "oriented-site");
  CHECK(j["d"] == 7);
  CHECK(j["rounded"] == doctest::Approx(0.3533));
  CHECK(j["provenance"].size() >= 2);
}

TEST_CASE("bounds: bond d=3") {
  CliResult r = run_cli({"bounds", "--family", "bond", "--d", "3"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["rounded"] == doctest::Approx(0.3473));
  CHECK(j["method"] == "thm1");
}

TEST_CASE("bounds: registry override reaches d=2") {
  CliResult r = run_cli({"bounds", "--family", "oriented-bond", "--d", "2", "--method", "registry"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["rounded"] == doctest::Approx(0.6667));
  CHECK(j["method"] == "registry");
}

TEST_CASE("bounds: bad inputs exit with code 2") {
  CHECK(run_cli({"bounds", "--family", "hex", "--d", "3"}).code == 2);
  CHECK(run_cli({"bounds", "--family", "bond", "--d", "1"}).code == 2);
  CHECK(run_cli({"bounds", "--family", "bond", "--d", "2"}).code == 2);
  CHECK(run_cli({"bounds", "--family", "site", "--d", "5", "--method", "thm2.2"}).code == 2);
  CHECK(run_cli({"nonsense"}).code == 2);
}

TEST_CASE("table: csv shape and determinism") {
  CliResult a = run_cli({"table", "--dmin", "3", "--dmax", "9"});
  REQUIRE(a.code == 0);
  CliResult b = run_cli({"table", "--dmin", "3", "--dmax", "9"});
  CHECK(a.out == b.out);
  int lines = 0;
  std::stringstream ss(a.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(ss, line))
    if (!line.empty()) {
      ++lines;
      rows.push_back(line);
    }
  CHECK(lines == 8);  // header + 7 rows
  CHECK(rows[0] == "d,bond,oriented_bond,site,oriented_site");
  CHECK(rows[1] == "3,0.3473,0.5680,0.5000,0.6422");
}

TEST_CASE("table: json rows past d=9 carry the extension label") {
  CliResult r = run_cli({"table", "--dmin", "3", "--dmax", "12", "--format", "json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j.size() == 10);
  CHECK(j[0]["method_extended"] == false);
  CHECK(j[7]["d"] == 10);
  CHECK(j[7]["method_extended"] == true);
  CHECK(j[9]["method_extended"] == true);
  CHECK(run_cli({"table", "--dmin", "2", "--dmax", "9"}).code == 2);
  CHECK(run_cli({"table", "--dmin", "3", "--dmax", "65"}).code == 2);
}

TEST_CASE("simulate: survival endpoints and byte-identical reruns") {
  CliResult one = run_cli({"simulate", "--mode", "survival", "--family", "bond", "--d", "2",
                           "--p", "1", "--L", "4", "--replicas", "50", "--seed", "5"});
  REQUIRE(one.code == 0);
  json j = json::parse(one.out);
  CHECK(j["estimate"] == 1.0);
  CHECK(j["starts_treated_open"] == true);

  CliResult zero = run_cli({"simulate", "--mode", "survival", "--family", "site", "--d", "2",
                            "--p", "0", "--L", "4", "--replicas", "50", "--seed", "5"});
  CHECK(json::parse(zero.out)["estimate"] == 0.0);

  CliResult again = run_cli({"simulate", "--mode", "survival", "--family", "bond", "--d", "2",
                             "--p", "1", "--L", "4", "--replicas", "50", "--seed", "5"});
  CHECK(one.out == again.out);
}

TEST_CASE("simulate: sweep csv hits both endpoints") {
  CliResult r = run_cli({"simulate", "--mode", "sweep", "--family", "bond", "--d", "2",
                         "--p-grid", "0,1", "--L", "4", "--replicas", "20", "--seed", "3",
                         "--format", "csv"});
  REQUIRE(r.code == 0);
  std::stringstream ss(r.out);
  std::string header, row0, row1;
  std::getline(ss, header);
  std::getline(ss, row0);
  std::getline(ss, row1);
  CHECK(header == "p,estimate,ci_low,ci_high");
  CHECK(row0.substr(0, 4) == "0,0,");
  CHECK(row1.substr(0, 4) == "1,1,");
  CHECK(run_cli({"simulate", "--mode", "sweep", "--family", "oriented-bond", "--d", "2",
                 "--p-grid", "0,1", "--L", "4", "--replicas", "20"})
            .code == 2);
}

TEST_CASE("couple: frozen triangular run validates and writes traces") {
  std::string trace_path = "cli_trace_test.jsonl";
  CliResult r = run_cli({"couple", "--kind", "triangular", "--p1", "0", "--p2", "0", "--p3", "0",
                         "--replicas", "200", "--step-cap", "100", "--seed", "4", "--trace",
                         trace_path});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["pathwise"]["pass"] == true);
  CHECK(j["pass"] == true);
  std::ifstream tf(trace_path);
  REQUIRE(tf.good());
  int lines = 0;
  std::string line;
  json first;
  while (std::getline(tf, line)) {
    if (line.empty()) continue;
    if (lines == 0) first = json::parse(line);
    json rec = json::parse(line);
    CHECK(rec["event"]["occurred"] == false);
    ++lines;
  }
  CHECK(lines == 6);
  CHECK(first["n"] == 1);
  CHECK(first["infected_size"] == 1);
  std::remove(trace_path.c_str());
}

TEST_CASE("simulate: csv fields round-trip the doubles exactly") {
  CliResult r = run_cli({"simulate", "--mode", "survival", "--family", "bond", "--d", "2",
                         "--p", "0.57", "--L", "6", "--replicas", "321", "--seed", "8",
                         "--format", "csv"});
  REQUIRE(r.code == 0);
  json j = json::parse(run_cli({"simulate", "--mode", "survival", "--family", "bond", "--d", "2",
                                "--p", "0.57", "--L", "6", "--replicas", "321", "--seed", "8"})
                           .out);
  std::stringstream ss(r.out);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  std::stringstream rs(row);
  std::string f0, f1, f2, f3;
  std::getline(rs, f0, ',');
  std::getline(rs, f1, ',');
  std::getline(rs, f2, ',');
  std::getline(rs, f3, ',');
  CHECK(std::stod(f0) == double(j["p"]));
  CHECK(std::stod(f1) == double(j["estimate"]));
  CHECK(std::stod(f2) == double(j["ci_low"]));
  CHECK(std::stod(f3) == double(j["ci_high"]));
}

TEST_CASE("bounds: --out writes the payload to a file") {
  std::string path = "cli_bounds_out.json";
  CliResult r = run_cli({"bounds", "--family", "bond", "--d", "4", "--out", path});
  REQUIRE(r.code == 0);
  std::ifstream f(path);
  REQUIRE(f.good());
  json j = json::parse(f);
  CHECK(j["rounded"] == doctest::Approx(0.2788));
  std::remove(path.c_str());
}

TEST_CASE("simulate: frozen regression for site d=3 above its bound") {
  // pilot value recorded once for seed 2001; supercritical per the d=3 table
  // cell 0.5000, so the proxy must come out positive
  CliResult r = run_cli({"simulate", "--mode", "survival", "--family", "site", "--d", "3",
                         "--p", "0.55", "--L", "16", "--replicas", "2000", "--seed", "2001"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["hits"] == 1981);
  CHECK(j["estimate"] == doctest::Approx(0.9905).epsilon(1e-12));
  CHECK(double(j["ci_low"]) > 0.0);
}

TEST_CASE("couple: out-of-range parameter exits with code 2") {
  CHECK(run_cli({"couple", "--kind", "vertex-split", "--d", "3", "--p", "1.5", "--replicas",
                 "200"})
            .code == 2);
  CHECK(run_cli({"couple", "--kind", "fold", "--d", "6", "--k", "4", "--p", "0.5", "--replicas",
                 "200"})
            .code == 2);
}

TEST_CASE("couple: edge-split reports calibration against the closed form") {
  CliResult r = run_cli({"couple", "--kind", "edge-split", "--d", "4", "--p", "0.45",
                         "--replicas", "300", "--step-cap", "200", "--seed", "11",
                         "--calibration-samples", "20000"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["calibration"].size() == 1);
  CHECK(j["calibration"][0]["pass"] == true);
  double expected = j["calibration"][0]["expected"];
  CHECK(expected == doctest::Approx(0.4872).epsilon(1e-3));
}

TEST_SUITE_END();
