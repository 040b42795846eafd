#pragma once

#include "lpembed/realization.hpp"
#include "lpembed/types.hpp"

#include <cstdint>

namespace lpembed {

enum class OracleKind { LpExact, LinearDistortion, WeightedP };

// A computable norm on R^dim certified against the l_p norm with slack delta:
//   evaluate(y) <= ||y||_p <= (1 + delta) * evaluate(y).
// WeightedP certifies analytically from the weight range; LinearDistortion is
// certified by direction sampling at construction and rescaled so the
// comparison above holds with margin on both sides.
class NormOracle {
 public:
  // Placeholder state; use the factories below for a usable oracle.
  NormOracle() = default;

  static NormOracle lp_exact(int dim, PExponent p);

  // evaluate(y) = (sum_k w_k |y_k|^p)^(1/p); weights must lie in
  // [(1+delta)^-p, 1].
  static NormOracle weighted_p(int dim, PExponent p,
                               std::vector<double> weights, double delta);

  // evaluate(y) = ||T y||_p / scale. The certificate samples 10^4 seeded
  // directions, takes the measured ratio slack s = max/min - 1, declares
  // delta = 2s, and splits the doubled slack geometrically around the
  // measured band when choosing the scale.
  static NormOracle linear_distortion(int dim, PExponent p, Eigen::MatrixXd t,
                                      uint64_t cert_seed);

  // Deserialization path: wraps an already-rescaled matrix together with the
  // slack certified at construction time, without re-sampling, so a file
  // round-trip reproduces the oracle exactly.
  static NormOracle linear_distortion_prescaled(int dim, PExponent p,
                                                Eigen::MatrixXd t,
                                                double delta);

  double evaluate(const Eigen::VectorXd& y) const;

  OracleKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double p() const { return p_; }
  double delta() const { return delta_; }
  const std::vector<double>& weights() const { return weights_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  OracleKind kind_ = OracleKind::LpExact;
  int dim_ = 0;
  PExponent p_{2.0};
  double delta_ = 0.0;
  std::vector<double> weights_;  // WeightedP payload
  Eigen::MatrixXd matrix_;       // LinearDistortion payload, already rescaled
};

// Seeded generator for the three oracle kinds. `delta` is the requested
// slack: LpExact ignores it, WeightedP attains it exactly (one weight is
// pinned to the lower bound), LinearDistortion calibrates the distortion
// magnitude until the certified slack lands at or below the request.
NormOracle make_norm_oracle(OracleKind kind, int dim, PExponent p,
                            double delta, uint64_t seed);

// State of the fixed-point search over perturbation vectors in
// [0, epsilon_cap]^pair_count(n).
struct FixedPointState {
  std::vector<double> rho;
  double epsilon_cap = 0.0;
  double residual = 0.0;  // inf-norm of rho - phi(rho)
  int iterations = 0;     // phi evaluations spent
};

// One application of the fixed-point map: realize the raw distances
// ||x_i - x_j|| + rho_ij, measure the realized points in the oracle norm,
// and return the per-pair shortfall
//   phi(rho)_ij = ||x_i - x_j|| + rho_ij - ||y_i - y_j||_E.
// Entries lie in [0, delta/(1+delta) * (||x_i - x_j|| + rho_ij)] up to solver
// tolerance. Throws PreconditionError when the inner realization fails.
std::vector<double> fixed_point_map(const Configuration& x,
                                    const NormOracle& oracle,
                                    const std::vector<double>& rho,
                                    double epsilon_cap,
                                    const SolveOptions& opts = {},
                                    const CoordinateSubset* witness = nullptr);

struct EmbeddingResult {
  Configuration source;  // the l_p configuration that was embedded
  NormOracle oracle;
  Eigen::MatrixXd points;  // n x dim embedded points
  UpperTriangularMatrix e_norm_distances{2, EntryKind::Raw};
  UpperTriangularMatrix target_distances{2, EntryKind::Raw};
  double max_isometry_defect = 0.0;
  FixedPointState state;
  bool converged = false;
  // Largest violation of the phi bounds seen over all evaluations.
  double phi_bound_violation = 0.0;
};

// Finds rho* with ||rho* - phi(rho*)||_inf <= opts.residual_tolerance by
// damped iteration (damping halved on residual increase, floor 1/64, with a
// componentwise secant fallback once the iteration stalls) and returns the
// realized points, whose oracle-norm distances match the l_p distances of x.
// epsilon_cap defaults to half the estimated perturbation radius; pass
// epsilon_cap_override > 0 to skip that estimate. Throws CapacityError when
// the oracle slack exceeds what the cap admits, i.e. when
// delta * max_distance > epsilon_cap.
EmbeddingResult embed_into_norm(const Configuration& x,
                                const NormOracle& oracle,
                                const SolveOptions& opts = {},
                                int max_outer = 200,
                                double epsilon_cap_override = 0.0,
                                int radius_trials = 16);

// Recomputes both distance matrices from the stored points with fresh
// arithmetic and confirms the isometry defect stays within tolerance.
bool verify_embedding(const EmbeddingResult& result, double tolerance);

}  // namespace lpembed
