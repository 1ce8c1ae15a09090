// Drives the installed binary through its file interfaces: flag validation,
// exit codes, manifests, determinism, and the simulate/exact agreement.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>

#include "reclass/csv.hpp"

using namespace reclass;
namespace fs = std::filesystem;

namespace {

const std::string cli = RECLASS_CLI_PATH;

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("reclass_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args) {
  const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("solve reproduces the headline numbers with a measured g") {
  Sandbox box;
  const std::string out = box.path("solve.json");
  REQUIRE(run_cli("solve --alpha 0.024 --beta 0.4 --w0 1.25 --g 1.079 --out " + out) == 0);
  const auto payload = nlohmann::json::parse(slurp(out));
  CHECK(payload["g"].get<double>() > 1.07);
  CHECK(payload["g"].get<double>() < 1.08);
  CHECK(payload["decline_time_T"].get<double>() == doctest::Approx(5.06).epsilon(0.01));
  CHECK(payload["reclass_proportion_V"].get<double>() == doctest::Approx(0.055).epsilon(0.01));
  CHECK(payload["class_per_patent_W"].get<double>() == doctest::Approx(4.11).epsilon(0.01));
  CHECK(payload["manifest"]["command"] == "solve");
}

TEST_CASE("exit codes distinguish validation, numerical, and I/O failures") {
  Sandbox box;
  CHECK(run_cli("solve --alpha 1.5 --beta 0.4") == 1);
  CHECK(run_cli("solve --alpha 0.02") != 0);  // missing required flag
  CHECK(run_cli("fit-beta --in " + box.path("missing.csv")) == 3);
  CHECK(run_cli("simulate --alpha 0.9 --beta 0 --horizon 1500 --out " + box.path("m.csv")) == 2);
  // malformed inputs: an event stream lacking its columns is an I/O failure
  const std::string bad = box.path("bad.csv");
  write_text_atomic(bad, "a,b\n1,2\n");
  CHECK(run_cli("fit-beta --in " + bad) == 3);
  CHECK(run_cli("regress --groups " + bad + " --spec recent") == 3);
}

TEST_CASE("diff honors filing-year bounds") {
  Sandbox box;
  const std::string e1 = box.path("y1.csv");
  const std::string e2 = box.path("y2.csv");
  write_text_atomic(e1,
                    "family_id,filing_year,codes\n"
                    "F1,1965,A01B1/00\n"
                    "F2,1990,A01B1/00\n");
  write_text_atomic(e2,
                    "family_id,filing_year,codes\n"
                    "F1,1965,A01B1/00;B02C1/00\n"
                    "F2,1990,A01B1/00;B02C1/00\n");
  const std::string d = box.path("yd.csv");
  REQUIRE(run_cli("diff --earlier " + e1 + " --later " + e2 +
                  " --level subclass --min-year 1970 --max-year 2019 --out " + d) == 0);
  const CsvTable table = read_csv(d);
  for (const auto& row : table.rows) CHECK(parse_year(row[1]) == 1990);
}

TEST_CASE("a zero horizon yields a single-row matrix") {
  Sandbox box;
  const std::string out = box.path("m0.csv");
  REQUIRE(run_cli("simulate --alpha 0.05 --beta 0.5 --horizon 0 --out " + out) == 0);
  const CsvTable table = read_csv(out);
  REQUIRE(table.rows.size() == 1);
  CHECK(parse_real(table.rows[0][2]) == 1.0);
}

TEST_CASE("simulated totals equal the closed-form totals") {
  Sandbox box;
  const std::string sim_out = box.path("matrix.csv");
  const std::string exact_out = box.path("exact.csv");
  REQUIRE(run_cli("simulate --alpha 0.05 --beta 0.5 --horizon 25 --out " + sim_out) == 0);
  REQUIRE(run_cli("exact --alpha 0.05 --beta 0.5 --horizon 25 --out " + exact_out) == 0);

  const CsvTable matrix = read_csv(sim_out);
  std::map<long long, double> totals;
  for (const auto& row : matrix.rows) totals[parse_year(row[1])] += parse_real(row[2]);
  const CsvTable exact = read_csv(exact_out);
  REQUIRE(exact.rows.size() == 26);
  for (const auto& row : exact.rows) {
    const long long t = parse_year(row[0]);
    CHECK(totals.at(t) == doctest::Approx(parse_real(row[1])).epsilon(1e-9));
  }
}

TEST_CASE("identical flags produce byte-identical outputs") {
  Sandbox box;
  const std::string a = box.path("a.csv");
  const std::string b = box.path("b.csv");
  const std::string flags = "fixtures snapshot-pair --seed 7 --add-rate 0.05 --out-later ";
  REQUIRE(run_cli(flags + box.path("la.csv") + " --out-earlier " + a) == 0);
  REQUIRE(run_cli(flags + box.path("lb.csv") + " --out-earlier " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(box.path("la.csv")) == slurp(box.path("lb.csv")));
}

TEST_CASE("csv outputs carry a manifest sidecar") {
  Sandbox box;
  const std::string out = box.path("exact.csv");
  REQUIRE(run_cli("exact --alpha 0.05 --beta 0 --horizon 3 --out " + out) == 0);
  const auto manifest = nlohmann::json::parse(slurp(out + ".manifest.json"));
  CHECK(manifest["command"] == "exact");
  CHECK(manifest["parameters"]["alpha"].get<double>() == 0.05);
  CHECK(manifest["outputs"][0] == out);
}

TEST_CASE("diff resolves editions through a label manifest") {
  Sandbox box;
  const std::string e1 = box.path("m1.csv");
  const std::string e2 = box.path("m2.csv");
  REQUIRE(run_cli("fixtures snapshot-pair --seed 5 --out-earlier " + e1 + " --out-later " + e2) ==
          0);
  std::ofstream manifest(box.path("editions.txt"));
  manifest << "2019=" << e1 << "\n2023=" << e2 << "\n";
  manifest.close();
  const std::string d = box.path("md.csv");
  REQUIRE(run_cli("diff --manifest " + box.path("editions.txt") +
                  " --earlier-label 2019 --later-label 2023 --level subclass --out " + d) == 0);
  CHECK(!read_csv(d).rows.empty());
}

TEST_CASE("simulate can emit reclassification events alongside the matrix") {
  Sandbox box;
  const std::string m = box.path("m.csv");
  const std::string ev = box.path("ev.csv");
  REQUIRE(run_cli("simulate --alpha 0.025 --beta 0.4 --horizon 40 --out " + m + " --events-out " +
                  ev + " --windows 30,35") == 0);
  const CsvTable events = read_csv(ev);
  REQUIRE(events.rows.size() == 30 + 35);
  const std::string fit = box.path("fit.json");
  REQUIRE(run_cli("fit-beta --in " + ev + " --out " + fit) == 0);
  CHECK(nlohmann::json::parse(slurp(fit))["beta_hat"].get<double>() ==
        doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("diff of an edition against itself is all zeros") {
  Sandbox box;
  const std::string e1 = box.path("e1.csv");
  const std::string d = box.path("d.csv");
  REQUIRE(run_cli("fixtures snapshot-pair --seed 3 --out-earlier " + e1 + " --out-later " +
                  box.path("e2.csv")) == 0);
  REQUIRE(run_cli("diff --earlier " + e1 + " --later " + e1 + " --level subclass --out " + d) == 0);
  for (const auto& row : read_csv(d).rows) {
    CHECK(parse_real(row[2]) == 0.0);
    CHECK(parse_real(row[3]) == 0.0);
  }
}

TEST_CASE("snapshot pipeline round-trips the planted beta through files") {
  Sandbox box;
  const std::string e1 = box.path("r1.csv");
  const std::string e2 = box.path("r2.csv");
  const std::string d = box.path("rd.csv");
  const std::string ev = box.path("rr.csv");
  const std::string fit = box.path("fit.json");
  REQUIRE(run_cli("fixtures reclass-series --beta 0.4 --edition-year 2019 --out-earlier " + e1 +
                  " --out-later " + e2) == 0);
  REQUIRE(run_cli("diff --earlier " + e1 + " --later " + e2 + " --level subclass --out " + d) == 0);
  REQUIRE(run_cli("rates --diff " + d + " --window-start 2020 --out " + ev) == 0);
  REQUIRE(run_cli("fit-beta --in " + ev + " --out " + fit) == 0);
  const auto payload = nlohmann::json::parse(slurp(fit));
  CHECK(payload["beta_hat"].get<double>() == doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("count-table fixture feeds estimate-alpha through files") {
  Sandbox box;
  const std::string counts = box.path("counts.csv");
  const std::string est = box.path("est.json");
  REQUIRE(run_cli("fixtures count-table --alpha 0.025 --beta 0.4 --w0 1.25 --out " + counts) == 0);
  REQUIRE(run_cli("estimate-alpha --counts " + counts + " --beta 0.4 --year 30 --out " + est) == 0);
  const auto payload = nlohmann::json::parse(slurp(est));
  CHECK(payload["alpha_hat"].get<double>() == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(payload["w0_hat"].get<double>() == doctest::Approx(1.25).epsilon(1e-6));
}

TEST_CASE("groups and regress recover a planted proportional effect") {
  // classes planted with growth proportional to their classification load
  Sandbox box;
  const std::string snap = box.path("snap.csv");
  {
    CsvTable table;
    table.header = {"family_id", "filing_year", "codes"};
    long long serial = 0;
    // sections A and B, four groups each, growth rising with carried codes
    for (int section = 0; section < 2; ++section) {
      for (int group = 0; group < 4; ++group) {
        const char sec = static_cast<char>('A' + section);
        const std::string base = std::string(1, sec) + "0" + std::to_string(group + 1) + "B";
        const double ratio = 1.02 + 0.01 * group;
        double count = 40.0;
        for (long long year = 2000; year <= 2014; ++year) {
          const long long n = std::llround(count);
          for (long long i = 0; i < n; ++i) {
            std::string codes = base + "1/00";
            for (int extra = 0; extra < group; ++extra) {
              codes += ";" + std::string(1, sec) + "9" + std::to_string(extra + 1) + "Z1/00";
            }
            table.rows.push_back({"F" + std::to_string(serial++), std::to_string(year), codes});
          }
          count *= ratio;
        }
      }
    }
    write_text_atomic(snap, to_csv_text(table));
  }
  const std::string groups = box.path("groups.csv");
  const std::string reg = box.path("reg.json");
  REQUIRE(run_cli("groups --snapshot " + snap + " --level subclass --years 2000:2014 "
                  "--recent 2012,2013,2014 --out " + groups) == 0);
  REQUIRE(run_cli("regress --groups " + groups + " --spec yearavg --out " + reg) == 0);
  const auto payload = nlohmann::json::parse(slurp(reg));
  for (const auto& section : {"A", "B"}) {
    const auto& coef = payload["sections"][section]["coefficients"][1];
    REQUIRE(coef["name"] == "year_av_class_per_family");
    CHECK(coef["estimate"].get<double>() > 0.0);
  }
}
