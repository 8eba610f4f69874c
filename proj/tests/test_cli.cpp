#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "raman/cli.hpp"
#include "raman/model.hpp"

namespace fs = std::filesystem;
using doctest::Approx;
using raman::cli::kExitNumerical;
using raman::cli::kExitOk;
using raman::cli::kExitUsage;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args, const raman::cli::Hooks& hooks = {}) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = raman::cli::run(args, out, err, hooks);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  }
  std::vector<double> values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.at(c));
    return v;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Table parse(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line);
    } else if (t.header.empty()) {
      t.header = split(line);
    } else {
      std::vector<double> row;
      for (const auto& c : split(line)) {
        char* end = nullptr;
        const double v = std::strtod(c.c_str(), &end);
        row.push_back(end != c.c_str() && *end == '\0' ? v : std::nan(""));
      }
      t.rows.push_back(row);
    }
  }
  return t;
}

std::string report_value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  }
  return {};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("raman_cli_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("usage") {
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"noise-scan", "--mu", "abc"}).code == kExitUsage);
  CHECK(run({"noise-scan", "--unknown-flag", "1"}).code == kExitUsage);
}

TEST_CASE("noise-scan") {
  SUBCASE("mu = 1 is flat at the quantum gain") {
    const Run r = run({"noise-scan", "--mu", "1", "--G", "2", "--points", "8"});
    REQUIRE(r.code == kExitOk);
    const Table t = parse(r.out);
    CHECK(t.header == std::vector<std::string>{"phi_rad", "variance_linear", "variance_db"});
    REQUIRE(t.rows.size() == 8);
    for (double v : t.values("variance_linear")) CHECK(v == Approx(7.0).epsilon(1e-12));
    CHECK(std::any_of(t.comments.begin(), t.comments.end(),
                      [](const std::string& c) { return c.rfind("# uncorrelated_reference = 7", 0) == 0; }));
  }
  SUBCASE("minimum about 3 dB below the reference") {
    const Run r = run({"noise-scan", "--mu", "1.09", "--gq-db", "15", "--L1", "0.1", "--L2", "0.1", "--points", "64"});
    REQUIRE(r.code == kExitOk);
    const auto db = parse(r.out).values("variance_db");
    CHECK(*std::min_element(db.begin(), db.end()) == Approx(15.0 - 3.0).epsilon(0.02));
  }
  SUBCASE("identical configuration gives identical bytes") {
    const std::vector<std::string> args{"noise-scan", "--mu", "1.3", "--gq", "20", "--L1", "0.2", "--seed", "9"};
    CHECK(run(args).out == run(args).out);
  }
  SUBCASE("errors name the field") {
    Run r = run({"noise-scan", "--mu", "0.5"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--mu") != std::string::npos);
    r = run({"noise-scan", "--L2", "1.5"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--L2") != std::string::npos);
    CHECK(run({"noise-scan", "--G", "2", "--gq", "3"}).code == kExitUsage);
    CHECK(run({"noise-scan", "--points", "1"}).code == kExitUsage);
  }
}

TEST_CASE("gain-sweep") {
  SUBCASE("single mu = 1 point") {
    const Run r = run({"gain-sweep", "--sweep", "mu", "--from", "1", "--to", "1", "--points", "1", "--gq", "32"});
    REQUIRE(r.code == kExitOk);
    const Table t = parse(r.out);
    CHECK(t.header == std::vector<std::string>{"sweep_value", "gq_linear", "R_linear", "R_db"});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][t.column("R_linear")] == Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("gq sweep approaches the extrapolated correlation") {
    const Run r = run({"gain-sweep", "--sweep", "gq", "--mu", "1.2", "--L1", "0.1", "--L2", "0.2", "--from", "2", "--to",
                       "1e6", "--points", "6", "--spacing", "log"});
    REQUIRE(r.code == kExitOk);
    const auto R = parse(r.out).values("R_linear");
    const double target = raman::model::correlation_from_params(1.2, 0.1, 0.2) / 2.0;
    for (std::size_t i = 1; i < R.size(); ++i) CHECK(std::abs(R[i] - target) < std::abs(R[i - 1] - target));
    CHECK(std::abs(R.back() - target) < 1e-6);
  }
  SUBCASE("pump-power sweep") {
    const Run r = run({"gain-sweep", "--sweep", "pump-power", "--pump-scale", "0.5", "--from", "0", "--to", "1",
                       "--points", "3", "--gq", "32", "--L1", "0.1", "--L2", "0.1"});
    REQUIRE(r.code == kExitOk);
    const auto R = parse(r.out).values("R_linear");
    CHECK(R[0] == Approx(1.0));
    CHECK(R[2] < R[1]);
    CHECK(R[1] < R[0]);
  }
  SUBCASE("bad range") {
    CHECK(run({"gain-sweep", "--from", "0.5", "--to", "2"}).code == kExitUsage);
    CHECK(run({"gain-sweep", "--sweep", "gq", "--from", "-1", "--to", "2", "--spacing", "log"}).code == kExitUsage);
    CHECK(run({"gain-sweep", "--sweep", "nope"}).code == kExitUsage);
  }
}

TEST_CASE("fit") {
  TempDir tmp;
  SUBCASE("gain-sweep output round-trips through fit") {
    const std::string csv = tmp.file("sweep.csv");
    REQUIRE(run({"gain-sweep", "--sweep", "gq", "--mu", "1.5", "--L1", "0.2", "--L2", "0.3", "--from", "2", "--to", "64",
                 "--points", "8", "--spacing", "log", "--out", csv})
                .code == kExitOk);
    const Run r = run({"fit", csv});
    REQUIRE(r.code == kExitOk);
    CHECK(std::stod(report_value(r.out, "mu_hat")) == Approx(1.5).epsilon(1e-6));
    CHECK(std::stod(report_value(r.out, "L1_hat")) == Approx(0.2).epsilon(1e-5));
    CHECK(std::stod(report_value(r.out, "L2_hat")) == Approx(0.3).epsilon(1e-5));
    CHECK(std::stod(report_value(r.out, "correlation_x_plus")) ==
          Approx(raman::model::correlation_from_params(1.5, 0.2, 0.3)).epsilon(1e-8));

    const Run c = run({"fit", "--in", csv, "--format", "csv"});
    REQUIRE(c.code == kExitOk);
    const Table t = parse(c.out);
    CHECK(t.header.at(0) == "label");
    CHECK(run({"fit", csv, "--seed", "3"}).out == run({"fit", csv, "--seed", "3"}).out);
  }
  SUBCASE("vacuum dataset") {
    const std::string csv = tmp.file("vac.csv");
    write(csv, "gq_linear,R_linear\n2,1\n4,1\n8,1\n16,1\n32,1\n");
    const Run r = run({"fit", csv});
    REQUIRE(r.code == kExitOk);
    CHECK(std::abs(std::stod(report_value(r.out, "correlation_db"))) < 0.01);
  }
  SUBCASE("headline-regime dataset") {
    const std::string csv = tmp.file("headline.csv");
    REQUIRE(run({"gain-sweep", "--sweep", "gq", "--mu", "1.15", "--L1", "0.1", "--L2", "0.15", "--from", "31.62", "--to",
                 "1000", "--points", "4", "--spacing", "log", "--out", csv})
                .code == kExitOk);
    const Run r = run({"fit", csv, "--bootstrap", "100"});
    REQUIRE(r.code == kExitOk);
    CHECK(std::stod(report_value(r.out, "correlation_db")) == Approx(-4.0).epsilon(0.125));
    CHECK_FALSE(report_value(r.out, "correlation_db_ci95").empty());
  }
  SUBCASE("several labels and shared losses") {
    const std::string csv = tmp.file("multi.csv");
    std::ostringstream s;
    s << "label,gq_linear,R_linear\n";
    for (double mu : {1.2, 1.4}) {
      for (double gq : {2.0, 4.0, 8.0, 16.0, 32.0}) {
        s << "mu" << mu << ',' << gq << ',' << raman::model::closed_form_R(mu, 0.1, 0.2, gq) << '\n';
      }
    }
    write(csv, s.str());
    const Run r = run({"fit", csv, "--shared-losses"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("dataset: mu1.2") != std::string::npos);
    CHECK(r.out.find("dataset: mu1.4") != std::string::npos);
  }
  SUBCASE("parse errors carry the line number") {
    const std::string csv = tmp.file("bad.csv");
    write(csv, "# header next\ngq_linear,R_linear\n2,0.9\n4,zz\n");
    const Run r = run({"fit", csv});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("line 4") != std::string::npos);
  }
  SUBCASE("insufficient data") {
    const std::string csv = tmp.file("short.csv");
    write(csv, "gq_linear,R_linear\n2,0.9\n4,0.8\n8,0.7\n");
    const Run r = run({"fit", csv});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find(">= 4") != std::string::npos);
    CHECK(run({"fit", tmp.file("missing.csv")}).code == kExitUsage);
    CHECK(run({"fit"}).code == kExitUsage);
  }
}

TEST_CASE("correlation") {
  Run r = run({"correlation", "--mu", "1"});
  REQUIRE(r.code == kExitOk);
  Table t = parse(r.out);
  CHECK(t.rows.at(0).at(t.column("x_plus")) == Approx(2.0));

  r = run({"correlation", "--R", "0.5", "--gq", "32"});
  REQUIRE(r.code == kExitOk);
  t = parse(r.out);
  CHECK(t.rows.size() == 1);
  CHECK(t.rows.at(0).at(t.column("x_plus")) == Approx(1.0));
  CHECK(t.rows.at(0).at(t.column("db")) == Approx(-3.0103).epsilon(1e-4));
  CHECK(run({"correlation", "--R", "-1"}).code == kExitUsage);
}

TEST_CASE("fringes") {
  SUBCASE("zero seed points to noise-scan") {
    const Run r = run({"fringes", "--mu", "1.5", "--G", "2"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("noise-scan") != std::string::npos);
  }
  SUBCASE("nu = 0 is flat") {
    const Run r = run({"fringes", "--mu", "1", "--G", "2", "--seed-amplitude", "1", "--points", "16"});
    REQUIRE(r.code == kExitOk);
    const auto I = parse(r.out).values("intensity");
    for (double v : I) CHECK(v == Approx(I.front()).epsilon(1e-12));
  }
  SUBCASE("balanced lossless gains give full visibility with the maximum at zero") {
    const Run r = run({"fringes", "--mu", "30", "--G", "30", "--seed-amplitude", "1", "--points", "32"});
    REQUIRE(r.code == kExitOk);
    const Table t = parse(r.out);
    CHECK(t.header == std::vector<std::string>{"phi_rad", "intensity", "background"});
    const auto I = t.values("intensity");
    CHECK(std::max_element(I.begin(), I.end()) == I.begin());
    const double hi = *std::max_element(I.begin(), I.end());
    const double lo = *std::min_element(I.begin(), I.end());
    CHECK((hi - lo) / (hi + lo) > 0.99);
  }
}

TEST_CASE("oracle-check") {
  SUBCASE("vacuum battery") {
    const Run r = run({"oracle-check", "--battery", "vacuum"});
    CHECK(r.code == kExitOk);
    CHECK(std::stod(report_value(r.out, "max_deviation")) < 1e-12);
    CHECK(report_value(r.out, "result") == "PASS");
  }
  SUBCASE("corrupted engine is caught") {
    raman::cli::Hooks hooks;
    hooks.engine = [](const raman::fock::CascadeCircuit& c) { return raman::oracle::gaussian_variance(c) * (1.0 + 1e-5); };
    const Run r = run({"oracle-check", "--battery", "vacuum"}, hooks);
    CHECK(r.code == kExitNumerical);
    CHECK(report_value(r.out, "result") == "FAIL");
  }
  SUBCASE("truncation cap too small") {
    const Run r = run({"oracle-check", "--n-max-start", "8", "--n-max-cap", "8"});
    CHECK(r.code == kExitNumerical);
    CHECK(r.err.find("truncation") != std::string::npos);
  }
  SUBCASE("bad options") {
    CHECK(run({"oracle-check", "--n-max-start", "40", "--n-max-cap", "20"}).code == kExitUsage);
    CHECK(run({"oracle-check", "--battery", "huge"}).code == kExitUsage);
  }
}

TEST_CASE("config files") {
  TempDir tmp;
  const std::string cfg = tmp.file("run.cfg");
  write(cfg, "# scenario\nmu = 1.3\nL1 = 0.2   # Stokes loss\ngq = 20\n\npoints = 4\n");
  const Run from_file = run({"noise-scan", "--config", cfg});
  REQUIRE(from_file.code == kExitOk);
  const Run flags = run({"noise-scan", "--mu", "1.3", "--L1", "0.2", "--gq", "20", "--points", "4"});
  CHECK(parse(from_file.out).rows == parse(flags.out).rows);

  const Run override = run({"noise-scan", "--config", cfg, "--L1", "0"});
  REQUIRE(override.code == kExitOk);
  CHECK(override.out.find("# L1 = 0\n") != std::string::npos);

  write(cfg, "mu = 1.3\nnot_a_key = 2\n");
  Run r = run({"noise-scan", "--config", cfg});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("line 2") != std::string::npos);

  write(cfg, "mu 1.3\n");
  CHECK(run({"noise-scan", "--config", cfg}).code == kExitUsage);
  write(cfg, "mu = oops\n");
  CHECK(run({"noise-scan", "--config", cfg}).code == kExitUsage);
  CHECK(run({"noise-scan", "--config", tmp.file("none.cfg")}).code == kExitUsage);
}

TEST_CASE("--out writes the same bytes as standard output") {
  TempDir tmp;
  const std::string path = tmp.file("scan.csv");
  const std::vector<std::string> base{"noise-scan", "--mu", "1.2", "--gq", "10", "--points", "5"};
  std::vector<std::string> with_out = base;
  with_out.insert(with_out.end(), {"--out", path});
  REQUIRE(run(with_out).code == kExitOk);
  CHECK(slurp(path) == run(base).out);
  CHECK(run({"noise-scan", "--out", tmp.file("no/such/dir.csv")}).code == kExitUsage);
}
