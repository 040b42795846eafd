#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lpembed/io.hpp"
#include "lpembed/rng.hpp"

#include <cstdio>
#include <filesystem>

using namespace lpembed;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("configuration files round-trip bitwise") {
  Rng rng(1);
  Eigen::MatrixXd pts(3, 4);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 4; ++k) pts(i, k) = rng.gaussian() * 1e3;
  }
  pts(0, 0) = 0.1;  // not exactly representable
  pts(1, 1) = -1.0 / 3.0;
  const Configuration config{PExponent(2.5), pts};

  const std::string path = temp_path("lpembed_config_roundtrip.json");
  save_configuration(config, path);
  const Configuration loaded = load_configuration(path);
  CHECK(loaded.points == config.points);
  CHECK(static_cast<double>(loaded.p) == static_cast<double>(config.p));
  std::remove(path.c_str());
}

TEST_CASE("distance matrices round-trip bitwise") {
  UpperTriangularMatrix u(4, EntryKind::Raw);
  Rng rng(2);
  for (int idx = 0; idx < u.size(); ++idx) u[idx] = rng.uniform(0.1, 7.0);
  const std::string path = temp_path("lpembed_dist_roundtrip.json");
  save_distance_matrix(u, path);
  const UpperTriangularMatrix loaded = load_distance_matrix(path);
  CHECK(loaded.kind() == u.kind());
  CHECK(loaded.entries() == u.entries());
  std::remove(path.c_str());
}

TEST_CASE("oracle files round-trip bitwise for every kind") {
  const std::string path = temp_path("lpembed_oracle_roundtrip.json");
  for (OracleKind kind : {OracleKind::LpExact, OracleKind::WeightedP,
                          OracleKind::LinearDistortion}) {
    const NormOracle oracle =
        make_norm_oracle(kind, 3, PExponent(2.5), 0.01, 77);
    save_norm_oracle(oracle, path);
    const NormOracle loaded = load_norm_oracle(path);
    CHECK(loaded.kind() == oracle.kind());
    CHECK(loaded.delta() == oracle.delta());
    CHECK(loaded.weights() == oracle.weights());
    CHECK(loaded.matrix() == oracle.matrix());
    // Same norm, evaluated on a fresh direction.
    Eigen::VectorXd y(3);
    y << 0.3, -1.7, 0.9;
    CHECK(loaded.evaluate(y) == oracle.evaluate(y));
  }
  std::remove(path.c_str());
}

TEST_CASE("malformed inputs carry a diagnostic") {
  const std::string path = temp_path("lpembed_bad_input.json");
  write_text_atomic(path, "{\"p\": 2.0}\n");
  CHECK_THROWS_WITH_AS(load_configuration(path), doctest::Contains("points"),
                       PreconditionError);
  write_text_atomic(path, "not even json\n");
  CHECK_THROWS_AS(load_configuration(path), PreconditionError);
  write_text_atomic(path, "{\"n\": 3, \"kind\": \"nope\", \"entries\": []}\n");
  CHECK_THROWS_WITH_AS(load_distance_matrix(path), doctest::Contains("kind"),
                       PreconditionError);
  std::remove(path.c_str());
}

TEST_CASE("digest is stable and content-sensitive") {
  json a = {{"p", 2.0}, {"points", {{0.0, 1.0}, {1.0, 0.0}}}};
  json b = a;
  CHECK(digest(a) == digest(b));
  b["points"][0][0] = 1e-17;
  CHECK(digest(a) != digest(b));
  CHECK(digest(a).size() == 16);
}

TEST_CASE("atomic writes leave no temp file behind") {
  const std::string path = temp_path("lpembed_atomic.txt");
  write_text_atomic(path, "payload");
  CHECK(read_text(path) == "payload");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::remove(path.c_str());
}

TEST_CASE("csv emission uses full precision") {
  std::vector<SurveyCell> table{{3, 4, 2.5, 100, 1.0},
                                {4, 4, 1.5, 100, 0.75}};
  const std::string csv = survey_csv(table);
  CHECK(csv == "n,N,p,trials,frequency\n3,4,2.5,100,1\n4,4,1.5,100,0.75\n");

  std::vector<TracePoint> trace{{0, 0.125}, {1, 0.0009765625}};
  CHECK(trace_csv(trace) == "iteration,residual\n0,0.125\n1,0.0009765625\n");

  // 17 significant digits: enough to reproduce any double bitwise.
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(std::stod(format_double(0.97)) == 0.97);

  DensityReport density;
  density.in_g_count = 1;
  density.full_rank = {1, 0};
  density.smallest_retained = {0.5, 0.0};
  CHECK(density_csv(density) ==
        "trial,full_rank,smallest_retained\n0,1,0.5\n1,0,0\n");
}
