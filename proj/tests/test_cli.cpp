#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "passage/cli_app.hpp"
#include "passage/csv.hpp"
#include "passage/figures.hpp"

using namespace passage;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

struct ParsedCsv {
  std::vector<std::string> manifest;
  std::string header;
  std::vector<std::vector<double>> rows;
};

ParsedCsv parse_csv(const std::string& text) {
  ParsedCsv parsed;
  for (const auto& line : split_lines(text)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      parsed.manifest.push_back(line);
      continue;
    }
    if (parsed.header.empty()) {
      parsed.header = line;
      continue;
    }
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    parsed.rows.push_back(std::move(row));
  }
  return parsed;
}

bool manifest_contains(const ParsedCsv& csv, const std::string& needle) {
  for (const auto& line : csv.manifest) {
    if (line.find(needle) != std::string::npos) return true;
  }
  return false;
}

double manifest_value(const ParsedCsv& csv, const std::string& key) {
  const std::string needle = key + "=";
  for (const auto& line : csv.manifest) {
    const auto pos = line.find(needle);
    if (pos != std::string::npos) return std::stod(line.substr(pos + needle.size()));
  }
  throw std::runtime_error("manifest key not found: " + key);
}

}  // namespace

TEST_CASE("first-passage table carries the closed law") {
  const auto r = run({"density", "--kind", "tau1", "--b", "-1", "--points",
                      "5", "--tmax", "5"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.manifest.size() == 5);
  CHECK(csv.header == "t,density,cdf");
  REQUIRE(csv.rows.size() == 5);
  CHECK(csv.rows[0][0] == doctest::Approx(1.0));
  CHECK(csv.rows[0][1] ==
        doctest::Approx(0.3989422804014327).epsilon(1e-10));
  CHECK(csv.rows[0][2] ==
        doctest::Approx(0.6681020012231707).epsilon(1e-10));
  for (const auto& row : csv.rows) {
    REQUIRE(row.size() == 3);
    for (double v : row) CHECK(std::isfinite(v));
  }
  CHECK(manifest_contains(csv, "# command: passage_cli density"));
  CHECK(manifest_contains(csv, "b=-1"));
}

TEST_CASE("reruns differ only in the timestamp line") {
  const std::vector<std::string> args = {"density", "--kind", "t2",
                                         "--b",     "-0.5",   "--points",
                                         "12",      "--tmax", "3"};
  const auto first = split_lines(run(args).out);
  const auto second = split_lines(run(args).out);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i].rfind("# timestamp:", 0) == 0) {
      CHECK(second[i].rfind("# timestamp:", 0) == 0);
    } else {
      CHECK(first[i] == second[i]);
    }
  }
}

TEST_CASE("usage and domain errors exit with code 2") {
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"density"}).code == 2);
  CHECK(run({"density", "--kind", "nope"}).code == 2);
  CHECK(run({"density", "--kind", "tau1", "--points", "0"}).code == 2);
  CHECK(run({"density", "--kind", "tau1", "--tmin", "3", "--tmax", "1"})
            .code == 2);
  CHECK(run({"figure", "7"}).code == 2);
  CHECK(run({"reduce", "--process", "gbm", "--z", "-1"}).code == 2);
  CHECK(run({"reduce", "--process", "ou", "--z", "2", "--s0", "1"}).code ==
        2);

  // Repeated crossings need a slope pointing back at the start.
  const auto nonrec = run({"density", "--kind", "t2", "--b", "1"});
  CHECK(nonrec.code == 2);
  CHECK(nonrec.err.find("error") != std::string::npos);

  const auto bare = run({});
  CHECK(bare.code == 2);
  CHECK(bare.out.find("Usage") != std::string::npos);
}

TEST_CASE("help and version exit cleanly") {
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("density") != std::string::npos);
  CHECK(run({"density", "--help"}).code == 0);
  const auto version = run({"--version"});
  CHECK(version.code == 0);
  CHECK(version.out == library_version() + "\n");
}

TEST_CASE("figure tables have the advertised shape") {
  const auto r = run({"figure", "1"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.header == "b,defect,gamma");
  REQUIRE(csv.rows.size() == 31);
  CHECK(csv.rows.front()[0] == doctest::Approx(-3.0));
  CHECK(csv.rows.back()[0] == 0.0);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    CHECK(csv.rows[i][1] <= csv.rows[i][2] + 1e-12);
    if (i > 0) CHECK(csv.rows[i][1] <= csv.rows[i - 1][1] + 1e-12);
  }
  CHECK(csv.rows.back()[1] == doctest::Approx(0.0).epsilon(1e-9));

  const auto r4 = run({"figure", "4"});
  REQUIRE(r4.code == 0);
  const auto csv4 = parse_csv(r4.out);
  CHECK(csv4.header == "t,f_tau2,f_IG");
  CHECK(csv4.rows.size() == 150);
}

TEST_CASE("last-zero grid is symmetric at zero slope") {
  const auto r = run({"density", "--kind", "psi", "--b", "0", "--t", "2",
                      "--points", "9"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 9);
  CHECK(csv.rows[4][0] == doctest::Approx(1.0));
  for (int k = 0; k < 4; ++k) {
    const auto& low = csv.rows[static_cast<std::size_t>(k)];
    const auto& high = csv.rows[static_cast<std::size_t>(8 - k)];
    CHECK(low[0] + high[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(low[1] == doctest::Approx(high[1]).epsilon(1e-12));
  }
}

TEST_CASE("n-th passage table records the defect in the manifest") {
  const auto r = run({"density", "--kind", "taun", "--n", "2", "--b", "-0.5",
                      "--points", "10", "--tmax", "5"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.header == "t,density");
  CHECK(csv.rows.size() == 10);
  CHECK(manifest_contains(csv, "n=2"));
  // The law's tabulated defect approximates the exact double integral to
  // its internal grid accuracy.
  CHECK(manifest_value(csv, "atom") ==
        doctest::Approx(0.4297068256973324).epsilon(2e-3));
}

TEST_CASE("reduce prints the transformed problem") {
  const auto cir = run({"reduce", "--process", "cir", "--z", "0.25",
                        "--barrier", "1"});
  REQUIRE(cir.code == 0);
  CHECK(cir.out.find("x = 1, a = 2, b = 0") != std::string::npos);
  CHECK(cir.out.find("clock: identity") != std::string::npos);
  CHECK(cir.out.find("recurrent: yes") != std::string::npos);

  // mu_prime equal to the log-drift r - sigma^2/2 gives a flat slope.
  const auto gbm = run({"reduce", "--process", "gbm", "--z", "1", "--r",
                        "0.1", "--sigma", "0.2", "--s0", "0.5", "--muprime",
                        "0.08"});
  REQUIRE(gbm.code == 0);
  CHECK(gbm.out.find("b = 0") != std::string::npos);

  const auto ou = run({"reduce", "--process", "ou", "--z", "0", "--mu", "1",
                       "--sigma", "1", "--s0", "1"});
  REQUIRE(ou.code == 0);
  CHECK(ou.out.find("clock: rho(t) = 0.5 (e^{2 t} - 1)") !=
        std::string::npos);
}

TEST_CASE("reduce can emit the transformed density") {
  const auto r = run({"reduce", "--process", "ou", "--z", "0", "--mu", "1",
                      "--sigma", "1.4142135623730951", "--s0", "1",
                      "--emit-density", "--points", "8", "--tmax", "2"});
  REQUIRE(r.code == 0);
  // The CSV follows the human-readable restatement lines.
  const auto start = r.out.find("# command:");
  REQUIRE(start != std::string::npos);
  const auto csv = parse_csv(r.out.substr(start));
  CHECK(csv.header == "t,density");
  REQUIRE(csv.rows.size() == 8);
  for (const auto& row : csv.rows) {
    CHECK(row[1] >= 0.0);
    CHECK(std::isfinite(row[1]));
  }
  CHECK(manifest_contains(csv, "process=ou"));
  CHECK(manifest_value(csv, "atom") == 0.0);
}

TEST_CASE("tables can be written to a file") {
  const auto path = std::filesystem::temp_directory_path() /
                    "passage_cli_test_table.csv";
  const auto r = run({"figure", "2", "--output", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("wrote 150 rows") != std::string::npos);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string first_line;
  std::getline(in, first_line);
  CHECK(first_line.rfind("# command:", 0) == 0);
  in.close();
  std::filesystem::remove(path);

  const auto bad = run({"figure", "2", "--output", "/nonexistent/dir/x.csv"});
  CHECK(bad.code == 2);
}

TEST_CASE("manifest writer rejects malformed tables") {
  Table ragged;
  ragged.columns = {"a", "b"};
  ragged.rows = {{1.0, 2.0}, {3.0}};
  std::ostringstream sink;
  CHECK_THROWS_AS(write_csv(sink, RunManifest{}, ragged),
                  std::invalid_argument);
  Table empty;
  CHECK_THROWS_AS(write_csv(sink, RunManifest{}, empty),
                  std::invalid_argument);
}

TEST_CASE("numbers render compactly") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-3.0) == "-3");
  CHECK(format_number(0.3173105078629141) == "0.317310507863");
  CHECK(std::stod(format_number(1e-12)) == doctest::Approx(1e-12));
}
