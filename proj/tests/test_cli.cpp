// Drives the installed CLI binary end to end through temp files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lpembed/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

using namespace lpembed;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lpembed_cli_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(LPEMBED_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("gen then check-k reports the witness on a simplex") {
  TempDir dir;
  const std::string config = dir.file("simplex.json");
  const std::string report = dir.file("report.json");
  REQUIRE(run("gen --family simplex --n 3 --N 3 --p 2 --out " + config) == 0);
  REQUIRE(run("check-k --in " + config + " --report " + report) == 0);
  const json r = json::parse(read_text(report));
  CHECK(r["property_k"] == true);
  CHECK(r["witness"] == json::array({1, 2, 3}));
}

TEST_CASE("jacobian subcommand reports full rank for a gaussian draw") {
  TempDir dir;
  const std::string config = dir.file("g.json");
  const std::string report = dir.file("rank.json");
  REQUIRE(run("gen --family gaussian --n 3 --N 3 --p 2.5 --seed 4 --out " +
              config) == 0);
  REQUIRE(run("jacobian --in " + config + " --report " + report) == 0);
  const json r = json::parse(read_text(report));
  CHECK(r["full_rank"] == true);
  CHECK(r["numeric_rank"] == 3);
  CHECK(r["mode"] == "derivative");
}

TEST_CASE("realize converges on a perturbed target and writes a trace") {
  TempDir dir;
  const std::string base = dir.file("base.json");
  REQUIRE(run("gen --family simplex --n 3 --N 3 --p 2 --out " + base) == 0);

  UpperTriangularMatrix target(3, EntryKind::PthPower);
  target.at(0, 1) = 2.01;
  target.at(0, 2) = 2.0;
  target.at(1, 2) = 2.0;
  const std::string target_path = dir.file("target.json");
  save_distance_matrix(target, target_path);

  const std::string out = dir.file("realized.json");
  const std::string trace = dir.file("trace.csv");
  const std::string report = dir.file("report.json");
  REQUIRE(run("realize --base " + base + " --target " + target_path +
              " --out " + out + " --trace " + trace + " --report " + report) ==
          0);
  const json r = json::parse(read_text(report));
  CHECK(r["converged"] == true);
  CHECK(r["residual_inf_norm"].get<double>() <= 1e-9);
  CHECK(read_text(trace).rfind("iteration,residual\n", 0) == 0);

  const Configuration realized = load_configuration(out);
  CHECK(std::abs(power_distance_matrix(realized).at(0, 1) - 2.01) <= 1e-9);
}

TEST_CASE("realize maps validation problems to exit 2 and stalls to exit 3") {
  TempDir dir;
  const std::string base = dir.file("base.json");
  REQUIRE(run("gen --family simplex --n 3 --N 3 --p 2 --out " + base) == 0);

  UpperTriangularMatrix bad(3, EntryKind::PthPower);
  bad.at(0, 1) = -1.0;
  bad.at(0, 2) = 2.0;
  bad.at(1, 2) = 2.0;
  const std::string bad_path = dir.file("bad.json");
  // Entry validation lives in the loader, so write the file by hand.
  write_text_atomic(bad_path,
                    "{\"n\": 3, \"kind\": \"pth_power\", "
                    "\"entries\": [-1.0, 2.0, 2.0]}\n");
  CHECK(run("realize --base " + base + " --target " + bad_path) == 2);

  UpperTriangularMatrix far(3, EntryKind::PthPower);
  far.at(0, 1) = 40.0;
  far.at(0, 2) = 2.0;
  far.at(1, 2) = 2.0;
  const std::string far_path = dir.file("far.json");
  save_distance_matrix(far, far_path);
  CHECK(run("realize --base " + base + " --target " + far_path +
            " --max-iter 1") == 3);
}

TEST_CASE("fold shrinks a padded simplex back to three coordinates") {
  TempDir dir;
  const std::string in = dir.file("wide.json");
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(3, 8);
  pts.leftCols(3) = Eigen::MatrixXd::Identity(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int k = 3; k < 8; ++k) pts(i, k) = 0.01 * (i + 1) * (k - 2);
  }
  save_configuration({PExponent(2.0), pts}, in);

  const std::string out = dir.file("folded.json");
  const std::string report = dir.file("report.json");
  REQUIRE(run("fold --in " + in + " --out " + out + " --report " + report) ==
          0);
  const json r = json::parse(read_text(report));
  CHECK(r["output_dim"].get<int>() <= 8);
  CHECK(r["distance_defect_inf_norm"].get<double>() <= 1e-9);
}

TEST_CASE("embed pipeline: exact oracle embeds exactly, tiny cap exits 4") {
  TempDir dir;
  const std::string config = dir.file("simplex.json");
  REQUIRE(run("gen --family simplex --n 3 --N 3 --p 2 --out " + config) == 0);

  const std::string exact = dir.file("exact.json");
  REQUIRE(run("gen-norm --kind lp_exact --N 3 --p 2 --out " + exact) == 0);
  const std::string report = dir.file("embed.json");
  REQUIRE(run("embed --in " + config + " --oracle " + exact + " --report " +
              report) == 0);
  const json r = json::parse(read_text(report));
  CHECK(r["converged"] == true);
  CHECK(r["max_isometry_defect"].get<double>() <= 1e-12);

  const std::string wide = dir.file("wide.json");
  REQUIRE(run("gen-norm --kind weighted_p --N 3 --p 2 --delta 0.5 --seed 3 "
              "--out " + wide) == 0);
  CHECK(run("embed --in " + config + " --oracle " + wide + " --cap 1e-4") == 4);
}

TEST_CASE("deterministic replays are byte-identical") {
  TempDir dir;
  const std::string csv_a = dir.file("a.csv");
  const std::string csv_b = dir.file("b.csv");
  const std::string rep_a = dir.file("a.json");
  const std::string rep_b = dir.file("b.json");
  const std::string flags =
      "survey --n-list 2,3 --N-list 3 --p-list 1.5,2 --trials 40 --seed 9 "
      "--deterministic";
  REQUIRE(run(flags + " --out " + csv_a + " --report " + rep_a) == 0);
  REQUIRE(run(flags + " --out " + csv_b + " --report " + rep_b) == 0);
  CHECK(read_text(csv_a) == read_text(csv_b));
  // The report embeds its own output path, so compare after masking it.
  json ja = json::parse(read_text(rep_a));
  json jb = json::parse(read_text(rep_b));
  ja["parameters"].erase("out");
  jb["parameters"].erase("out");
  CHECK(ja.dump() == jb.dump());
}

TEST_CASE("line-probe emits a grid trace and a zero count") {
  TempDir dir;
  const std::string a = dir.file("a.json");
  const std::string b = dir.file("b.json");
  REQUIRE(run("gen --family triangular --n 3 --p 2 --seed 5 --out " + a) == 0);
  // A scaled copy stays in the same region: orderings are scale-invariant.
  Configuration cb = load_configuration(a);
  cb.points *= 1.25;
  save_configuration(cb, b);

  const std::string trace = dir.file("probe.csv");
  const std::string report = dir.file("probe.json");
  REQUIRE(run("line-probe --a " + a + " --b " + b + " --samples 500 --trace " +
              trace + " --report " + report) == 0);
  const json r = json::parse(read_text(report));
  CHECK(r["zeros_isolated"] == true);
  CHECK(r["g_at_zero"].get<double>() != 0.0);
  CHECK(read_text(trace).rfind("t,g\n", 0) == 0);
}

TEST_CASE("unknown flags and missing files are validation errors") {
  TempDir dir;
  CHECK(run("check-k --in " + dir.file("missing.json")) == 2);
  CHECK(run("gen --n 3 --out " + dir.file("x.json") + " --family nosuch") == 2);
}
