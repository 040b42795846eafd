#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lpembed/embedding.hpp"
#include "lpembed/rng.hpp"

#include <cmath>

using namespace lpembed;

namespace {

Configuration simplex(int n, double p) {
  return {PExponent(p), Eigen::MatrixXd::Identity(n, n)};
}

// Fresh sample check of evaluate(y) <= ||y||_p <= (1+delta) evaluate(y).
void check_sandwich(const NormOracle& oracle, uint64_t seed,
                    int samples = 10000) {
  Rng rng = Rng::substream(seed, 0xabc);
  Eigen::VectorXd y(oracle.dim());
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < oracle.dim(); ++k) y[k] = rng.gaussian();
    const double lp = lp_norm(y, oracle.p());
    const double e = oracle.evaluate(y);
    CHECK(e <= lp * (1.0 + 1e-12));
    CHECK(lp <= (1.0 + oracle.delta()) * e * (1.0 + 1e-12));
  }
}

}  // namespace

TEST_CASE("exact oracle is the lp norm with zero slack") {
  const NormOracle oracle = NormOracle::lp_exact(4, PExponent(2.5));
  CHECK(oracle.delta() == 0.0);
  Rng rng(3);
  Eigen::VectorXd y(4);
  for (int s = 0; s < 100; ++s) {
    for (int k = 0; k < 4; ++k) y[k] = rng.gaussian();
    CHECK(oracle.evaluate(y) == lp_norm(y, 2.5));
  }
}

TEST_CASE("weighted oracle with all weights at the floor is a pure rescale") {
  const double delta = 0.05;
  const double p = 2.5;
  const double floor = std::pow(1.0 + delta, -p);
  const NormOracle oracle =
      NormOracle::weighted_p(3, PExponent(p), {floor, floor, floor}, delta);
  Rng rng(4);
  Eigen::VectorXd y(3);
  for (int s = 0; s < 100; ++s) {
    for (int k = 0; k < 3; ++k) y[k] = rng.gaussian();
    CHECK(oracle.evaluate(y) ==
          doctest::Approx(lp_norm(y, p) / (1.0 + delta)).epsilon(1e-13));
  }
  check_sandwich(oracle, 11);
}

TEST_CASE("weighted oracle rejects weights outside the band") {
  CHECK_THROWS_AS(
      NormOracle::weighted_p(2, PExponent(2.0), {1.2, 0.9}, 0.1),
      PreconditionError);
  CHECK_THROWS_AS(
      NormOracle::weighted_p(2, PExponent(2.0), {0.5, 0.9}, 0.01),
      PreconditionError);
}

TEST_CASE("linear distortion certifies a small slack for a mild matrix") {
  Rng rng(5);
  Eigen::MatrixXd r(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) r(i, k) = rng.uniform(-1.0, 1.0);
  }
  const Eigen::MatrixXd t = Eigen::MatrixXd::Identity(3, 3) + 0.001 * r;
  const NormOracle oracle = NormOracle::linear_distortion(3, PExponent(2.0), t, 9);
  CHECK(oracle.delta() <= 0.01);
  CHECK(oracle.delta() > 0.0);
  check_sandwich(oracle, 12);
}

TEST_CASE("singular distortion matrices are refused") {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(3, 3);
  t(0, 0) = 1.0;
  CHECK_THROWS_AS(NormOracle::linear_distortion(3, PExponent(2.0), t, 1),
                  PreconditionError);
}

TEST_CASE("generated oracles hold the sandwich on fresh samples") {
  for (double p : {2.0, 2.5}) {
    for (double delta : {1e-3, 1e-2}) {
      for (uint64_t seed : {1ull, 2ull, 3ull}) {
        const NormOracle weighted = make_norm_oracle(
            OracleKind::WeightedP, 3, PExponent(p), delta, seed);
        CHECK(weighted.delta() == delta);
        check_sandwich(weighted, seed + 100, 2000);

        const NormOracle distorted = make_norm_oracle(
            OracleKind::LinearDistortion, 3, PExponent(p), delta, seed);
        CHECK(distorted.delta() <= delta);
        check_sandwich(distorted, seed + 200, 2000);
      }
    }
  }
}

TEST_CASE("oracles behave like norms on sampled vectors") {
  Rng rng(61);
  for (OracleKind kind : {OracleKind::LpExact, OracleKind::WeightedP,
                          OracleKind::LinearDistortion}) {
    const NormOracle oracle =
        make_norm_oracle(kind, 4, PExponent(2.5), 0.01, 13);
    Eigen::VectorXd y(4), z(4);
    for (int s = 0; s < 200; ++s) {
      for (int k = 0; k < 4; ++k) {
        y[k] = rng.gaussian();
        z[k] = rng.gaussian();
      }
      const double alpha = rng.uniform(-3.0, 3.0);
      CHECK(oracle.evaluate(alpha * y) ==
            doctest::Approx(std::abs(alpha) * oracle.evaluate(y))
                .epsilon(1e-12));
      CHECK(oracle.evaluate(y + z) <=
            oracle.evaluate(y) + oracle.evaluate(z) + 1e-12);
    }
  }
}

TEST_CASE("fixed-point map vanishes under the exact oracle") {
  const Configuration x = simplex(3, 2.0);
  const NormOracle oracle = NormOracle::lp_exact(3, PExponent(2.0));
  std::vector<double> rho(3, 0.01);
  const std::vector<double> phi = fixed_point_map(x, oracle, rho, 0.1);
  for (double v : phi) CHECK(std::abs(v) <= 1e-9);
}

TEST_CASE("fixed-point map at zero measures the norm gap and stays in bounds") {
  const Configuration x = simplex(3, 2.5);
  const NormOracle oracle =
      make_norm_oracle(OracleKind::WeightedP, 3, PExponent(2.5), 0.01, 7);
  const UpperTriangularMatrix raw = distance_matrix(x);
  std::vector<double> rho(3, 0.0);
  const std::vector<double> phi = fixed_point_map(x, oracle, rho, 0.1);
  const double factor = oracle.delta() / (1.0 + oracle.delta());
  for (int idx = 0; idx < 3; ++idx) {
    CHECK(phi[idx] >= -1e-8);
    CHECK(phi[idx] <= factor * raw[idx] + 1e-8);
  }
}

TEST_CASE("fixed-point map keeps its bounds along random perturbations") {
  Rng rng(21);
  const Configuration x = simplex(3, 2.0);
  const NormOracle oracle =
      make_norm_oracle(OracleKind::LinearDistortion, 3, PExponent(2.0), 0.01, 3);
  const UpperTriangularMatrix raw = distance_matrix(x);
  const double factor = oracle.delta() / (1.0 + oracle.delta());
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> rho(3);
    for (double& v : rho) v = rng.uniform(0.0, 0.05);
    const std::vector<double> phi = fixed_point_map(x, oracle, rho, 0.05);
    for (int idx = 0; idx < 3; ++idx) {
      CHECK(phi[idx] >= -1e-8);
      CHECK(phi[idx] <= factor * (raw[idx] + rho[idx]) + 1e-8);
    }
  }
}

TEST_CASE("embedding under the exact oracle is the identity") {
  const Configuration x = simplex(3, 2.0);
  const EmbeddingResult result =
      embed_into_norm(x, NormOracle::lp_exact(3, PExponent(2.0)));
  REQUIRE(result.converged);
  CHECK(result.max_isometry_defect <= 1e-12);
  for (double v : result.state.rho) CHECK(std::abs(v) <= 1e-12);
  CHECK(verify_embedding(result, 1e-12));
}

TEST_CASE("weighted oracle embedding hits the simplex distances") {
  const double p = 2.5;
  const Configuration x = simplex(3, p);
  const NormOracle oracle =
      make_norm_oracle(OracleKind::WeightedP, 3, PExponent(p), 0.005, 19);
  const EmbeddingResult result = embed_into_norm(x, oracle);
  REQUIRE(result.converged);
  CHECK(result.state.residual <= 1e-9);
  CHECK(result.max_isometry_defect <= 1e-8);
  CHECK(result.phi_bound_violation <= 1e-8);
  const double expected = std::pow(2.0, 1.0 / p);
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const Eigen::VectorXd diff =
          (result.points.row(i) - result.points.row(j)).transpose();
      CHECK(oracle.evaluate(diff) == doctest::Approx(expected).epsilon(1e-8));
    }
  }
  CHECK(verify_embedding(result, 1e-8));
}

TEST_CASE("oversized slack with a tiny cap raises a capacity error") {
  const Configuration x = simplex(3, 2.0);
  const NormOracle oracle = make_norm_oracle(
      OracleKind::WeightedP, 3, PExponent(2.0), 0.5, 23);
  CHECK_THROWS_AS(
      embed_into_norm(x, oracle, {}, 200, /*epsilon_cap_override=*/1e-4),
      CapacityError);
}

TEST_CASE("verification fails after tampering with a point") {
  const Configuration x = simplex(3, 2.0);
  const NormOracle oracle =
      make_norm_oracle(OracleKind::WeightedP, 3, PExponent(2.0), 0.001, 31);
  EmbeddingResult result = embed_into_norm(x, oracle);
  REQUIRE(result.converged);
  CHECK(verify_embedding(result, 1e-8));
  result.points(0, 0) += 0.1;
  CHECK_FALSE(verify_embedding(result, 1e-8));
}

TEST_CASE("degradation with growing slack is recorded") {
  const Configuration x = simplex(3, 2.0);
  for (double delta : {0.0, 0.001, 0.01}) {
    const NormOracle oracle =
        make_norm_oracle(OracleKind::WeightedP, 3, PExponent(2.0), delta, 47);
    const EmbeddingResult result = embed_into_norm(x, oracle);
    CHECK(result.converged);
    MESSAGE("delta=", delta, " defect=", result.max_isometry_defect,
            " evaluations=", result.state.iterations);
  }
}

TEST_CASE("configurations without a witness are refused") {
  Eigen::MatrixXd pts(2, 2);
  pts << 1, 1, 1, 1;  // coincident points
  const Configuration x{PExponent(2.0), pts};
  CHECK_THROWS_AS(embed_into_norm(x, NormOracle::lp_exact(2, PExponent(2.0))),
                  PreconditionError);
}
