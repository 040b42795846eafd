#include "lpembed/embedding.hpp"

#include "lpembed/rng.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lpembed {

namespace {

constexpr int kCertSamples = 10000;
constexpr uint64_t kRadiusSeed = 0x7261646975736564ull;  // embed's internal seed

// Measured ratio band of ||T y||_p / ||y||_p over seeded directions.
std::pair<double, double> ratio_band(const Eigen::MatrixXd& t, double p,
                                     uint64_t seed) {
  const int dim = static_cast<int>(t.cols());
  Rng rng = Rng::substream(seed, 0x6f7261636c65ull);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  Eigen::VectorXd y(dim);
  for (int s = 0; s < kCertSamples; ++s) {
    for (int k = 0; k < dim; ++k) y[k] = rng.gaussian();
    const double denom = lp_norm(y, p);
    if (denom == 0.0) continue;
    const double ratio = lp_norm(t * y, p) / denom;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo, hi};
}

}  // namespace

NormOracle NormOracle::lp_exact(int dim, PExponent p) {
  if (dim < 1) throw DimensionError("oracle dimension must be >= 1");
  NormOracle o;
  o.kind_ = OracleKind::LpExact;
  o.dim_ = dim;
  o.p_ = p;
  o.delta_ = 0.0;
  return o;
}

NormOracle NormOracle::weighted_p(int dim, PExponent p,
                                  std::vector<double> weights, double delta) {
  if (dim < 1) throw DimensionError("oracle dimension must be >= 1");
  if (static_cast<int>(weights.size()) != dim) {
    throw DimensionError("weight count must equal the dimension");
  }
  if (delta < 0.0) throw PreconditionError("delta must be nonnegative");
  const double floor = std::pow(1.0 + delta, -static_cast<double>(p));
  for (double w : weights) {
    if (!(w >= floor * (1.0 - 1e-12) && w <= 1.0 + 1e-12)) {
      throw PreconditionError("weights must lie in [(1+delta)^-p, 1]");
    }
  }
  NormOracle o;
  o.kind_ = OracleKind::WeightedP;
  o.dim_ = dim;
  o.p_ = p;
  o.delta_ = delta;
  o.weights_ = std::move(weights);
  return o;
}

NormOracle NormOracle::linear_distortion(int dim, PExponent p,
                                         Eigen::MatrixXd t,
                                         uint64_t cert_seed) {
  if (dim < 1) throw DimensionError("oracle dimension must be >= 1");
  if (t.rows() != dim || t.cols() != dim) {
    throw DimensionError("distortion matrix must be dim x dim");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(t);
  if (!lu.isInvertible()) {
    throw PreconditionError("distortion matrix is singular");
  }

  const auto [lo, hi] = ratio_band(t, p, cert_seed);
  const double slack = hi / lo - 1.0;
  // Declare twice the measured slack and place the scale so both sides of
  // the comparison keep a geometric margin of sqrt((1+2s)/(1+s)).
  const double margin = std::sqrt((1.0 + 2.0 * slack) / (1.0 + slack));
  NormOracle o;
  o.kind_ = OracleKind::LinearDistortion;
  o.dim_ = dim;
  o.p_ = p;
  o.delta_ = 2.0 * slack;
  o.matrix_ = t / (hi * margin);
  return o;
}

NormOracle NormOracle::linear_distortion_prescaled(int dim, PExponent p,
                                                   Eigen::MatrixXd t,
                                                   double delta) {
  if (dim < 1) throw DimensionError("oracle dimension must be >= 1");
  if (t.rows() != dim || t.cols() != dim) {
    throw DimensionError("distortion matrix must be dim x dim");
  }
  if (delta < 0.0) throw PreconditionError("delta must be nonnegative");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(t);
  if (!lu.isInvertible()) {
    throw PreconditionError("distortion matrix is singular");
  }
  NormOracle o;
  o.kind_ = OracleKind::LinearDistortion;
  o.dim_ = dim;
  o.p_ = p;
  o.delta_ = delta;
  o.matrix_ = std::move(t);
  return o;
}

double NormOracle::evaluate(const Eigen::VectorXd& y) const {
  if (static_cast<int>(y.size()) != dim_) {
    throw DimensionError("oracle evaluated on a vector of wrong dimension");
  }
  switch (kind_) {
    case OracleKind::LpExact:
      return lp_norm(y, p_);
    case OracleKind::WeightedP: {
      double sum = 0.0;
      for (int k = 0; k < dim_; ++k) {
        sum += weights_[k] * std::pow(std::abs(y[k]), static_cast<double>(p_));
      }
      return std::pow(sum, 1.0 / p_);
    }
    case OracleKind::LinearDistortion:
      return lp_norm(matrix_ * y, p_);
  }
  throw PreconditionError("unknown oracle kind");
}

NormOracle make_norm_oracle(OracleKind kind, int dim, PExponent p, double delta,
                            uint64_t seed) {
  if (delta < 0.0) throw PreconditionError("delta must be nonnegative");
  switch (kind) {
    case OracleKind::LpExact:
      return NormOracle::lp_exact(dim, p);
    case OracleKind::WeightedP: {
      Rng rng = Rng::substream(seed, 0x77656967687473ull);
      const double floor = std::pow(1.0 + delta, -static_cast<double>(p));
      std::vector<double> w(dim);
      for (int k = 0; k < dim; ++k) w[k] = rng.uniform(floor, 1.0);
      // Pin one weight to the lower bound so the certificate is exact.
      w[rng.next() % dim] = floor;
      return NormOracle::weighted_p(dim, p, std::move(w), delta);
    }
    case OracleKind::LinearDistortion: {
      if (delta == 0.0) {
        return NormOracle::linear_distortion(
            dim, p, Eigen::MatrixXd::Identity(dim, dim), seed);
      }
      Rng rng = Rng::substream(seed, 0x646973746f7274ull);
      Eigen::MatrixXd r(dim, dim);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) r(i, j) = rng.uniform(-1.0, 1.0);
      }
      // The certified slack scales nearly linearly in alpha at this size;
      // calibrate down until the certificate lands at or below the request.
      double alpha = delta / (4.0 * dim);
      NormOracle candidate = NormOracle::lp_exact(dim, p);
      for (int attempt = 0; attempt < 60; ++attempt) {
        candidate = NormOracle::linear_distortion(
            dim, p, Eigen::MatrixXd::Identity(dim, dim) + alpha * r, seed);
        if (candidate.delta() <= delta) {
          if (candidate.delta() >= 0.05 * delta || attempt >= 40) break;
          alpha *= 1.5;
        } else {
          alpha *= 0.5;
        }
      }
      if (candidate.delta() > delta) {
        throw PreconditionError("distortion calibration failed to land under "
                                "the requested delta");
      }
      return candidate;
    }
  }
  throw PreconditionError("unknown oracle kind");
}

namespace {

struct PhiEvaluation {
  std::vector<double> phi;
  Eigen::MatrixXd points;
  double bound_violation = 0.0;
};

PhiEvaluation evaluate_phi(const Configuration& x, const NormOracle& oracle,
                           const std::vector<double>& rho,
                           const UpperTriangularMatrix& raw,
                           const SolveOptions& opts,
                           const CoordinateSubset& witness) {
  const int n = x.n();
  UpperTriangularMatrix target(n, EntryKind::Raw);
  for (int idx = 0; idx < target.size(); ++idx) {
    target[idx] = raw[idx] + rho[idx];
  }
  RealizationResult realized = realize_perturbation(x, target, opts, &witness);
  if (!realized.converged) {
    std::ostringstream os;
    os << "perturbation realization failed inside the fixed-point map "
       << "(residual " << realized.residual_inf_norm << ")";
    throw PreconditionError(os.str());
  }

  PhiEvaluation eval;
  eval.points = realized.configuration.points;
  eval.phi.resize(target.size());
  const double delta = oracle.delta();
  const double factor = delta / (1.0 + delta);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int idx = pair_index(n, i, j);
      const Eigen::VectorXd diff =
          (eval.points.row(i) - eval.points.row(j)).transpose();
      const double value = raw[idx] + rho[idx] - oracle.evaluate(diff);
      eval.phi[idx] = value;
      const double upper = factor * (raw[idx] + rho[idx]);
      eval.bound_violation = std::max(eval.bound_violation, -value);
      eval.bound_violation = std::max(eval.bound_violation, value - upper);
    }
  }
  return eval;
}

double inf_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t idx = 0; idx < a.size(); ++idx) {
    m = std::max(m, std::abs(a[idx] - b[idx]));
  }
  return m;
}

}  // namespace

std::vector<double> fixed_point_map(const Configuration& x,
                                    const NormOracle& oracle,
                                    const std::vector<double>& rho,
                                    double epsilon_cap, const SolveOptions& opts,
                                    const CoordinateSubset* witness) {
  x.validate();
  opts.validate();
  if (oracle.dim() != x.dim()) {
    throw DimensionError("oracle dimension does not match the configuration");
  }
  if (static_cast<int>(rho.size()) != pair_count(x.n())) {
    throw DimensionError("perturbation vector must have pair_count(n) entries");
  }
  for (double v : rho) {
    if (!(v >= -1e-12 && v <= epsilon_cap * (1.0 + 1e-12))) {
      throw PreconditionError("perturbation entries must lie in [0, cap]");
    }
  }
  CoordinateSubset m;
  if (witness != nullptr) {
    witness->validate(x.dim());
    m = *witness;
  } else {
    PropertyKResult k = has_property_k(x);
    if (!k.found) {
      throw PreconditionError(
          "configuration has no full-rank projection witness");
    }
    m = k.witness;
  }
  const UpperTriangularMatrix raw = distance_matrix(x);
  return evaluate_phi(x, oracle, rho, raw, opts, m).phi;
}

EmbeddingResult embed_into_norm(const Configuration& x, const NormOracle& oracle,
                                const SolveOptions& opts, int max_outer,
                                double epsilon_cap_override, int radius_trials) {
  x.validate();
  opts.validate();
  if (max_outer < 1) throw PreconditionError("max_outer must be >= 1");
  if (oracle.dim() != x.dim()) {
    throw DimensionError("oracle dimension does not match the configuration");
  }
  PropertyKResult k = has_property_k(x);
  if (!k.found) {
    throw PreconditionError(
        "configuration has no full-rank projection witness; embedding is "
        "out of reach for this method");
  }

  // Inner realizations run well below the outer tolerance so the fixed-point
  // certificate is not noise-limited.
  SolveOptions inner = opts;
  inner.residual_tolerance =
      std::max(1e-13, opts.residual_tolerance * 1e-3);

  const UpperTriangularMatrix raw = distance_matrix(x);
  const int pairs = raw.size();
  double max_distance = 0.0;
  for (int idx = 0; idx < pairs; ++idx) {
    max_distance = std::max(max_distance, raw[idx]);
  }

  const double cap =
      epsilon_cap_override > 0.0
          ? epsilon_cap_override
          : 0.5 * estimate_perturbation_radius(x, radius_trials, kRadiusSeed,
                                               inner, &k.witness);
  // phi maps [0, cap]^pairs into itself iff delta * max_distance <= cap.
  if (oracle.delta() * max_distance > cap) {
    std::ostringstream os;
    os << "oracle slack delta = " << oracle.delta()
       << " needs a perturbation budget of at least "
       << oracle.delta() * max_distance << " but the cap is " << cap;
    throw CapacityError(os.str());
  }

  EmbeddingResult result;
  result.source = x;
  result.oracle = oracle;
  result.state.epsilon_cap = cap;

  auto clamp_box = [&](std::vector<double>& v) {
    for (double& e : v) e = std::clamp(e, 0.0, cap);
  };

  std::vector<double> rho(pairs, 0.0);
  PhiEvaluation eval = evaluate_phi(x, oracle, rho, raw, inner, k.witness);
  result.phi_bound_violation = eval.bound_violation;
  double residual = inf_diff(rho, eval.phi);
  int evaluations = 1;

  std::vector<double> prev_rho;
  std::vector<double> prev_h;
  double lambda = 1.0;
  int stall = 0;

  while (residual > opts.residual_tolerance && evaluations < max_outer) {
    std::vector<double> h(pairs);
    for (int idx = 0; idx < pairs; ++idx) h[idx] = rho[idx] - eval.phi[idx];

    std::vector<double> next(pairs);
    if (stall >= 5 && !prev_rho.empty()) {
      // Componentwise secant on rho - phi(rho) once damping stops helping.
      for (int idx = 0; idx < pairs; ++idx) {
        const double dh = h[idx] - prev_h[idx];
        if (std::abs(dh) > 1e-300) {
          next[idx] = rho[idx] - h[idx] * (rho[idx] - prev_rho[idx]) / dh;
        } else {
          next[idx] = eval.phi[idx];
        }
      }
    } else {
      for (int idx = 0; idx < pairs; ++idx) {
        next[idx] = (1.0 - lambda) * rho[idx] + lambda * eval.phi[idx];
      }
    }
    clamp_box(next);

    PhiEvaluation next_eval = evaluate_phi(x, oracle, next, raw, inner, k.witness);
    ++evaluations;
    result.phi_bound_violation =
        std::max(result.phi_bound_violation, next_eval.bound_violation);
    const double next_residual = inf_diff(next, next_eval.phi);

    if (next_residual < residual) {
      prev_rho = rho;
      prev_h = h;
      rho = std::move(next);
      eval = std::move(next_eval);
      residual = next_residual;
      stall = 0;
      lambda = std::min(1.0, lambda * 2.0);
    } else if (lambda > 1.0 / 64.0) {
      lambda *= 0.5;
      ++stall;
    } else {
      ++stall;
      if (stall > 12) break;  // no progress left to make
    }
  }

  result.state.rho = rho;
  result.state.residual = residual;
  result.state.iterations = evaluations;
  result.points = eval.points;

  const int n = x.n();
  result.e_norm_distances = UpperTriangularMatrix(n, EntryKind::Raw);
  result.target_distances = raw;
  double defect = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd diff =
          (result.points.row(i) - result.points.row(j)).transpose();
      const double e_dist = oracle.evaluate(diff);
      result.e_norm_distances.at(i, j) = e_dist;
      defect = std::max(defect, std::abs(e_dist - raw.at(i, j)));
    }
  }
  result.max_isometry_defect = defect;
  // Both certificates must hold on their own.
  result.converged = residual <= opts.residual_tolerance && defect <= 1e-8;
  return result;
}

bool verify_embedding(const EmbeddingResult& result, double tolerance) {
  const int n = result.source.n();
  if (result.points.rows() != n) return false;
  const UpperTriangularMatrix targets = distance_matrix(result.source);
  double defect = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd diff =
          (result.points.row(i) - result.points.row(j)).transpose();
      defect = std::max(
          defect, std::abs(result.oracle.evaluate(diff) - targets.at(i, j)));
    }
  }
  return defect <= tolerance;
}

}  // namespace lpembed
