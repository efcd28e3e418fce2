#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "paqs/formats.hpp"
#include "paqs/gateway.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int exit_code;
  std::string err;
};

const fs::path& work_root() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / "paqs-cli-tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path data(const std::string& name) { return fs::path(PAQS_TEST_DATA) / name; }

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

Run cli(const std::vector<std::string>& args) {
  const char* exe = std::getenv("PAQS_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "PAQS_CLI must point at the paqs executable");
  std::string cmd = quote(exe);
  for (const auto& a : args) cmd += " " + quote(a);
  const fs::path err = work_root() / "stderr.txt";
  cmd += " >/dev/null 2>" + quote(err.string());
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing ", p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path out_dir(const std::string& name) { return work_root() / name; }

double column_sum(const fs::path& csv, std::size_t col, bool header) {
  const auto t = paqs::formats::read_csv(csv);
  double sum = 0;
  for (std::size_t r = header ? 1 : 0; r < t.rows.size(); ++r) {
    double v = 0;
    REQUIRE(paqs::formats::try_parse_double(t.rows[r][col], v));
    sum += v;
  }
  return sum;
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

void check_manifest(const fs::path& dir, const std::string& subcommand) {
  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["tool"] == "paqs");
  CHECK(m["subcommand"] == subcommand);
  CHECK(m["output_dir"] == fs::absolute(dir).string());
  CHECK(m["versions"]["library"].is_string());
  CHECK(m.contains("seed"));
  CHECK(m["parameters"].is_object());
  for (const auto& a : m["artifacts"]) CHECK_MESSAGE(fs::exists(dir / a.get<std::string>()), a);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("qw at z = 0 leaves the photon where it was injected") {
    const fs::path out = out_dir("qw-line3");
    const Run r = cli({"qw", "--positions", data("line3.csv").string(), "--inject", "1", "--z", "0", "--resolution",
                        "quick", "--out", out.string()});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(slurp(out / "results.csv") == "1.0\n0.0\n0.0\n");
    check_manifest(out, "qw");
  }

  TEST_CASE("qw writes every artifact for the 21 x 21 lattice") {
    const fs::path out = out_dir("qw-21");
    const Run r = cli({"qw", "--lattice", "21,21,15um,15um", "--inject", "221", "--z", "5cm", "--resolution", "quick",
                        "--out", out.string()});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(line_count(out / "results.csv") == 441);
    CHECK(column_sum(out / "results.csv", 0, false) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(line_count(out / "hamiltonian.csv") == 441);
    CHECK(line_count(out / "raster.csv") == 100);
    const std::string png = slurp(out / "raster.png");
    CHECK(png.substr(1, 3) == "PNG");
    check_manifest(out, "qw");
  }

  TEST_CASE("usage errors exit with 2") {
    CHECK(cli({"qw", "--inject", "1", "--z", "1cm"}).exit_code == 2);
    CHECK(cli({"qw", "--lattice", "2,2,15um,15um", "--positions", data("line3.csv").string(), "--inject", "1", "--z",
                "1cm"})
              .exit_code == 2);
    const Run bare = cli({"qw", "--lattice", "2,2,15,15", "--inject", "1", "--z", "1cm"});
    CHECK(bare.exit_code == 2);
    CHECK(bare.err.find("unit") != std::string::npos);
    CHECK(cli({"qw", "--lattice", "2,2,15um,15um", "--inject", "1", "--z", "1"}).exit_code == 2);
    CHECK(cli({"qw", "--lattice", "2,2,15um,15um", "--inject", "9", "--z", "1cm"}).exit_code == 2);
    CHECK(cli({"nonsense"}).exit_code == 2);
  }

  TEST_CASE("malformed input files exit with 3 and point at the cell") {
    const Run r = cli({"qw", "--positions", data("bad_positions.csv").string(), "--inject", "1", "--z", "1cm", "--out",
                        out_dir("bad").string()});
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("bad_positions.csv:3:2") != std::string::npos);
    const Run dup = cli({"qw", "--positions", data("duplicate_label.csv").string(), "--inject", "1", "--z", "1cm",
                          "--out", out_dir("dup").string()});
    CHECK(dup.exit_code == 3);
    CHECK(dup.err.find("duplicate label 2") != std::string::npos);
    CHECK(cli({"qw", "--positions", "/nonexistent.csv", "--inject", "1", "--z", "1cm"}).exit_code == 3);
  }

  TEST_CASE("qsw with zero amplitude writes the same results as qw") {
    const fs::path a = out_dir("qsw0-qw"), b = out_dir("qsw0-qsw");
    REQUIRE(cli({"qw", "--lattice", "5,5,12um,12um", "--inject", "13", "--z", "5mm", "--resolution", "quick", "--out",
                  a.string()})
                .exit_code == 0);
    REQUIRE(cli({"qsw", "--lattice", "5,5,12um,12um", "--inject", "13", "--z", "5mm", "--amplitude", "0/mm",
                  "--realizations", "7", "--out", b.string()})
                .exit_code == 0);
    CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
  }

  TEST_CASE("qsw example run, reproducibility and thread independence") {
    auto run = [](const std::string& name, const std::string& threads) {
      const fs::path out = out_dir(name);
      const Run r = cli({"qsw", "--lattice", "5,5,12um,12um", "--inject", "13", "--z", "5mm", "--amplitude", "1/mm",
                          "--z-interval", "0.1mm", "--realizations", "40", "--seed", "11", "--watch", "1,13",
                          "--z-range", "2mm..5mm", "--threads", threads, "--out", out.string()});
      REQUIRE_MESSAGE(r.exit_code == 0, r.err);
      return out;
    };
    const fs::path a = run("qsw-a", "1"), b = run("qsw-b", "1"), c = run("qsw-c", "8");
    CHECK(line_count(a / "series.csv") == 101);
    CHECK(slurp(a / "series.csv").rfind("z_cm,1,13\n", 0) == 0);
    CHECK(column_sum(a / "results.csv", 0, false) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(line_count(a / "profile.csv") == 51);
    for (const char* f : {"results.csv", "series.csv", "profile.csv"}) {
      CHECK(slurp(a / f) == slurp(b / f));
      CHECK(slurp(a / f) == slurp(c / f));
    }
    check_manifest(a, "qsw");
    CHECK(json::parse(slurp(a / "manifest.json"))["seed"] == 11);
  }

  TEST_CASE("qsw rejects negative amplitudes and bad watch labels") {
    CHECK(cli({"qsw", "--lattice", "2,2,12um,12um", "--inject", "1", "--z", "1mm", "--amplitude", "-1/mm"}).exit_code ==
          2);
    CHECK(cli({"qsw", "--lattice", "2,2,12um,12um", "--inject", "1", "--z", "1mm", "--amplitude", "1/mm", "--watch",
                "7"})
              .exit_code == 2);
  }

  TEST_CASE("multi-particle example writes the full output set") {
    const fs::path out = out_dir("multi-c");
    const Run r = cli({"multi", "--positions", data("line9_appc.csv").string(), "--state", "|100010001>", "--stats",
                        "bosonic", "--z", "10mm", "--watch", "|000020001>", "--watch", "|3,1;5,1;8,1>", "--watch",
                        "|1,1;8,1;9,1>", "--out", out.string()});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(line_count(out / "distribution.csv") == 166);
    CHECK(column_sum(out / "distribution.csv", 1, true) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(column_sum(out / "marginal.csv", 0, false) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(line_count(out / "correlation.csv") == 9);
    CHECK(line_count(out / "series.csv") == 101);
    CHECK(slurp(out / "series.csv").rfind("z_cm,|000020001>,|001010010>,|100000011>\n", 0) == 0);
    check_manifest(out, "multi");
  }

  TEST_CASE("a single photon looks the same under every statistics") {
    std::vector<std::string> outputs;
    for (const char* stats : {"bosonic", "fermionic", "distinguishable"}) {
      const fs::path out = out_dir(std::string("multi-n1-") + stats);
      REQUIRE(cli({"multi", "--lattice", "3,1,15um,15um", "--state", "|010>", "--stats", stats, "--z", "3mm", "--out",
                    out.string()})
                  .exit_code == 0);
      outputs.push_back(slurp(out / "distribution.csv"));
      CHECK_FALSE(fs::exists(out / "correlation.csv"));
    }
    CHECK(outputs[0] == outputs[1]);
    CHECK(outputs[0] == outputs[2]);
  }

  TEST_CASE("fermions refuse a doubly occupied input") {
    const Run r = cli({"multi", "--lattice", "3,1,15um,15um", "--state", "|200>", "--stats", "fermionic", "--z", "1mm",
                        "--out", out_dir("multi-pauli").string()});
    CHECK(r.exit_code == 4);
    CHECK(r.err.find("Pauli") != std::string::npos);
  }

  TEST_CASE("boson sampling default scenario") {
    const fs::path out = out_dir("boson-d");
    const Run r = cli({"boson", "--style", "reck", "--modes", "12", "--random-seed", "7", "--state", "|000000000111>",
                        "--out", out.string()});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(line_count(out / "distribution.csv") == 365);
    CHECK(column_sum(out / "distribution.csv", 1, true) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(line_count(out / "parameters.csv") == 67);
    CHECK(line_count(out / "unitary.csv") == 12);
    check_manifest(out, "boson");
  }

  TEST_CASE("boson sampling from a parameter file and from an imported matrix") {
    const fs::path out = out_dir("boson-hom");
    REQUIRE(cli({"boson", "--modes", "2", "--params", data("hom_params.csv").string(), "--state", "|11>", "--out",
                  out.string()})
                .exit_code == 0);
    const auto t = paqs::formats::read_csv(out / "distribution.csv");
    REQUIRE(t.rows.size() == 4);
    double p = 1;
    REQUIRE(paqs::formats::try_parse_double(t.rows[2][1], p));
    CHECK(t.rows[2][0] == "|11>");
    CHECK(p <= 1e-12);

    const fs::path reimport = out_dir("boson-reimport");
    REQUIRE(cli({"boson", "--unitary", (out / "unitary.csv").string(), "--modes", "2", "--state", "|11>", "--out",
                  reimport.string()})
                .exit_code == 0);
    CHECK(slurp(reimport / "distribution.csv") == slurp(out / "distribution.csv"));

    const Run bad = cli({"boson", "--unitary", data("shear_unitary.csv").string(), "--modes", "2", "--state", "|11>",
                          "--out", out_dir("boson-shear").string()});
    CHECK(bad.exit_code == 4);
    CHECK(bad.err.find("max |UU^dagger - I| = 1") != std::string::npos);
    CHECK(cli({"boson", "--modes", "2", "--random-seed", "1", "--params", data("hom_params.csv").string(), "--state",
                "|11>"})
              .exit_code == 2);
  }

  TEST_CASE("permanent benchmark report") {
    const fs::path out = out_dir("bench");
    REQUIRE(cli({"bench-permanent", "--n-range", "2..6", "--trials", "2", "--out", out.string()}).exit_code == 0);
    const auto t = paqs::formats::read_csv(out / "bench.csv");
    CHECK(t.rows.size() == 1 + 5 * 6);
    CHECK(cli({"bench-permanent", "--n-range", "6..2"}).exit_code == 2);
  }

  TEST_CASE("replaying a manifest reproduces every artifact") {
    const fs::path first = out_dir("replay-src");
    REQUIRE(cli({"qsw", "--lattice", "3,3,12um,12um", "--inject", "5", "--z", "2mm", "--amplitude", "0.8/mm",
                  "--realizations", "6", "--seed", "5", "--watch", "5", "--out", first.string()})
                .exit_code == 0);
    const fs::path second = out_dir("replay-dst");
    const Run r = cli({"replay", (first / "manifest.json").string(), "--out", second.string()});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    for (const char* f : {"results.csv", "series.csv", "profile.csv", "hamiltonian.csv", "positions.csv"})
      CHECK(slurp(first / f) == slurp(second / f));
    CHECK(cli({"replay", data("line3.csv").string()}).exit_code == 3);
  }

  TEST_CASE("gateway and CLI agree on the same scenario") {
    const fs::path out = out_dir("parity");
    REQUIRE(cli({"qw", "--lattice", "4,3,13um,15um", "--inject", "6", "--z", "7mm", "--resolution", "quick", "--out",
                  out.string()})
                .exit_code == 0);
    const json req = {{"layout", {{"lattice", {{"nx", 4}, {"ny", 3}, {"dx_um", 13}, {"dy_um", 15}}}}},
                      {"inject", 6},
                      {"z_cm", 0.7}};
    const auto res = paqs::gateway::dispatch({"POST", "/api/v1/qw", {}, req.dump()});
    REQUIRE(res.status == 200);
    const auto probs = json::parse(res.body)["probabilities"].get<std::vector<double>>();
    const auto file = paqs::formats::parse_results(paqs::formats::read_csv(out / "results.csv"));
    CHECK(file.probs == probs);
  }
}
