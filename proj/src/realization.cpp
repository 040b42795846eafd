#include "lpembed/realization.hpp"

#include "lpembed/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lpembed {

void SolveOptions::validate() const {
  if (max_iterations < 1) throw PreconditionError("max_iterations must be >= 1");
  if (!(residual_tolerance > 0.0)) {
    throw PreconditionError("residual_tolerance must be positive");
  }
  if (!(step_damping > 0.0 && step_damping <= 1.0)) {
    throw PreconditionError("step_damping must lie in (0, 1]");
  }
  if (regularization < 0.0) {
    throw PreconditionError("regularization must be nonnegative");
  }
}

namespace {

Eigen::VectorXd residual_vector(const Configuration& x,
                                const UpperTriangularMatrix& target) {
  const UpperTriangularMatrix current = power_distance_matrix(x);
  Eigen::VectorXd r(target.size());
  for (int idx = 0; idx < target.size(); ++idx) {
    r[idx] = target[idx] - current[idx];
  }
  return r;
}

// Minimum-norm least-squares step, or Tikhonov-regularized normal equations
// when reg > 0 (useful near the tie set where the Jacobian degrades).
Eigen::VectorXd solve_step(const JacobianMatrix& jac, const Eigen::VectorXd& r,
                           double reg) {
  if (reg > 0.0) {
    Eigen::MatrixXd gram = jac.m * jac.m.transpose();
    gram.diagonal().array() += reg;
    return jac.m.transpose() * gram.ldlt().solve(r);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      jac.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  return svd.solve(r);
}

std::vector<int8_t> sign_pattern(const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  const int dim = static_cast<int>(pts.cols());
  std::vector<int8_t> pattern;
  pattern.reserve(static_cast<size_t>(pair_count(n)) * dim);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < dim; ++k) {
        const double d = pts(i, k) - pts(j, k);
        pattern.push_back(d > 0.0 ? 1 : (d < 0.0 ? -1 : 0));
      }
    }
  }
  return pattern;
}

int count_flips(const std::vector<int8_t>& a, const std::vector<int8_t>& b) {
  int flips = 0;
  for (size_t idx = 0; idx < a.size(); ++idx) flips += a[idx] != b[idx];
  return flips;
}

void check_pth_power_target(const UpperTriangularMatrix& target,
                            const UpperTriangularMatrix& base_pth) {
  if (target.kind() != EntryKind::PthPower) {
    throw PreconditionError("target must carry p-th-power entries");
  }
  for (int idx = 0; idx < target.size(); ++idx) {
    if (!std::isfinite(target[idx])) {
      throw PreconditionError("target has a non-finite entry");
    }
    if (target[idx] < 0.0) {
      throw PreconditionError("p-th-power targets cannot be negative");
    }
    if (target[idx] == 0.0 && base_pth[idx] > 0.0) {
      throw PreconditionError(
          "zero target entry on a pair with nonzero base distance");
    }
  }
}

CoordinateSubset resolve_witness(const Configuration& base,
                                 const CoordinateSubset* witness,
                                 double tolerance) {
  if (witness != nullptr) {
    witness->validate(base.dim());
    if (witness->size() != base.n()) {
      throw DimensionError("witness subset must have exactly n coordinates");
    }
    return *witness;
  }
  PropertyKResult k = has_property_k(base, SearchStrategy::Exhaustive, tolerance);
  if (!k.found) {
    throw PreconditionError(
        "base configuration has no full-rank projection witness");
  }
  return k.witness;
}

}  // namespace

RealizationResult realize_distance_matrix(const Configuration& base,
                                          const UpperTriangularMatrix& target,
                                          const SolveOptions& opts) {
  base.validate();
  opts.validate();
  if (target.n() != base.n()) {
    throw DimensionError("target pair matrix does not match point count");
  }
  check_pth_power_target(target, power_distance_matrix(base));
  if (!rank_test(distance_jacobian(base)).full_rank) {
    throw PreconditionError(
        "base configuration fails the full-rank test; the local inverse "
        "is undefined there");
  }

  RealizationResult result;
  Configuration current = base;
  Eigen::VectorXd r = residual_vector(current, target);
  double res = r.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
  result.trace.push_back({0, res});

  Configuration best = current;
  double best_res = res;
  int iterations = 0;

  while (res > opts.residual_tolerance && iterations < opts.max_iterations) {
    const JacobianMatrix jac = distance_jacobian(current);
    const Eigen::VectorXd step = solve_step(jac, r, opts.regularization);

    // Backtracking: halve the step until the residual drops, 30 tries.
    double lambda = opts.step_damping;
    bool accepted = false;
    Configuration trial = current;
    Eigen::VectorXd r_trial;
    double res_trial = 0.0;
    for (int halving = 0; halving <= 30; ++halving) {
      trial.points = current.points;
      for (int l = 0; l < current.n(); ++l) {
        for (int k = 0; k < current.dim(); ++k) {
          trial.points(l, k) +=
              lambda * step[JacobianMatrix::column(current.dim(), l, k)];
        }
      }
      r_trial = residual_vector(trial, target);
      res_trial = r_trial.cwiseAbs().maxCoeff();
      if (res_trial < res) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;  // stalled; report the best iterate found

    result.tie_crossings +=
        count_flips(sign_pattern(current.points), sign_pattern(trial.points));
    current = trial;
    r = r_trial;
    res = res_trial;
    ++iterations;
    result.trace.push_back({iterations, res});
    if (res < best_res) {
      best = current;
      best_res = res;
    }
  }

  result.converged = res <= opts.residual_tolerance;
  result.configuration = result.converged ? current : best;
  result.residual_inf_norm = result.converged ? res : best_res;
  result.iterations_used = iterations;
  return result;
}

RealizationResult realize_perturbation(const Configuration& base,
                                       const UpperTriangularMatrix& raw_target,
                                       const SolveOptions& opts,
                                       const CoordinateSubset* witness) {
  base.validate();
  opts.validate();
  if (raw_target.kind() != EntryKind::Raw) {
    throw PreconditionError("perturbation targets carry raw distances");
  }
  if (raw_target.n() != base.n()) {
    throw DimensionError("target pair matrix does not match point count");
  }
  for (int idx = 0; idx < raw_target.size(); ++idx) {
    if (!(raw_target[idx] > 0.0) || !std::isfinite(raw_target[idx])) {
      throw PreconditionError("raw targets must be strictly positive");
    }
  }
  const CoordinateSubset m = resolve_witness(base, witness, kDefaultRankTolerance);

  const double p = base.p;
  const int n = base.n();
  const Configuration head = project(base, m);
  const UpperTriangularMatrix head_pth = power_distance_matrix(head);
  const UpperTriangularMatrix base_pth = power_distance_matrix(base);

  // Push the raw perturbation into the p-th-power scale on the witness block:
  // target^p = base^p + excess, so the block target is head^p + excess.
  UpperTriangularMatrix block_target(n, EntryKind::PthPower);
  for (int idx = 0; idx < block_target.size(); ++idx) {
    const double excess = std::pow(raw_target[idx], p) - base_pth[idx];
    const double v = head_pth[idx] + excess;
    if (v < 0.0) {
      throw PreconditionError(
          "perturbation too large: projected block target went negative");
    }
    block_target[idx] = v;
  }

  RealizationResult inner = realize_distance_matrix(head, block_target, opts);

  RealizationResult result;
  Eigen::MatrixXd pts = base.points;
  for (int k = 0; k < m.size(); ++k) {
    pts.col(m.indices[k]) = inner.configuration.points.col(k);
  }
  result.configuration = Configuration{base.p, std::move(pts)};
  const UpperTriangularMatrix realized = distance_matrix(result.configuration);
  double raw_res = 0.0;
  for (int idx = 0; idx < realized.size(); ++idx) {
    raw_res = std::max(raw_res, std::abs(realized[idx] - raw_target[idx]));
  }
  result.residual_inf_norm = raw_res;
  result.iterations_used = inner.iterations_used;
  result.tie_crossings = inner.tie_crossings;
  result.trace = std::move(inner.trace);
  result.converged = inner.converged &&
                     raw_res <= std::pow(opts.residual_tolerance, 1.0 / p);
  return result;
}

Configuration reduce_dimension(const Configuration& x, const SolveOptions& opts,
                               const CoordinateSubset* witness) {
  x.validate();
  opts.validate();
  const int n = x.n();
  const int d = x.dim();
  const CoordinateSubset m = resolve_witness(x, witness, kDefaultRankTolerance);

  // Reindex coordinates so the witness block comes first; a coordinate
  // permutation is an isometry, so distances are untouched.
  std::vector<int> order = m.indices;
  std::vector<char> in_witness(d, 0);
  for (int k : m.indices) in_witness[k] = 1;
  for (int k = 0; k < d; ++k) {
    if (!in_witness[k]) order.push_back(k);
  }
  Eigen::MatrixXd reordered(n, d);
  for (int k = 0; k < d; ++k) reordered.col(k) = x.points.col(order[k]);
  const Configuration xp{x.p, std::move(reordered)};

  Eigen::MatrixXd head_pts = xp.points.leftCols(n);
  const Configuration head{x.p, head_pts};
  const UpperTriangularMatrix head_pth = power_distance_matrix(head);
  const UpperTriangularMatrix reference = distance_matrix(x);

  double best_residual = std::numeric_limits<double>::infinity();
  const double p = x.p;
  for (int n_target = n; n_target <= d; ++n_target) {
    // Tail mass beyond the candidate dimension folds into the head block.
    UpperTriangularMatrix block_target(n, EntryKind::PthPower);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double tail = 0.0;
        for (int k = n_target; k < d; ++k) {
          tail += std::pow(std::abs(xp.points(i, k) - xp.points(j, k)), p);
        }
        block_target.at(i, j) = head_pth.at(i, j) + tail;
      }
    }

    const RealizationResult solved =
        realize_distance_matrix(head, block_target, opts);
    best_residual = std::min(best_residual, solved.residual_inf_norm);
    if (!solved.converged) continue;
    if (!rank_test(distance_jacobian(solved.configuration)).full_rank) continue;

    Eigen::MatrixXd out(n, n_target);
    out.leftCols(n) = solved.configuration.points;
    if (n_target > n) {
      out.rightCols(n_target - n) = xp.points.middleCols(n, n_target - n);
    }
    Configuration folded{x.p, std::move(out)};

    const UpperTriangularMatrix folded_dist = distance_matrix(folded);
    bool isometric = true;
    for (int idx = 0; idx < reference.size(); ++idx) {
      const double scale = std::max(reference[idx], 1e-300);
      if (std::abs(folded_dist[idx] - reference[idx]) > 1e-9 * scale) {
        isometric = false;
        break;
      }
    }
    if (isometric) return folded;
  }

  std::ostringstream os;
  os << "no dimension in [" << n << ", " << d
     << "] realized the folded distances";
  throw FoldingError(os.str(), best_residual);
}

double estimate_perturbation_radius(const Configuration& base, int trials,
                                    uint64_t seed, const SolveOptions& opts,
                                    const CoordinateSubset* witness) {
  base.validate();
  opts.validate();
  if (trials < 1) throw PreconditionError("radius estimation needs trials >= 1");
  const CoordinateSubset m = resolve_witness(base, witness, kDefaultRankTolerance);

  const UpperTriangularMatrix raw = distance_matrix(base);
  const int pairs = raw.size();
  double min_d = raw[0];
  for (int idx = 1; idx < pairs; ++idx) min_d = std::min(min_d, raw[idx]);
  if (!(min_d > 0.0)) {
    throw PreconditionError("coincident points admit no perturbation radius");
  }

  // Fixed per-trial directions, scaled by the radius under test, so a longer
  // trial prefix at the same seed can only shrink the all-pass radius.
  std::vector<std::vector<double>> directions(trials);
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, static_cast<uint64_t>(t));
    directions[t].resize(pairs);
    for (int idx = 0; idx < pairs; ++idx) {
      directions[t][idx] = rng.uniform(-1.0, 1.0);
    }
  }

  double eps = 0.5 * min_d;
  for (int level = 0; level < 60; ++level, eps *= 0.5) {
    bool all_ok = true;
    for (int t = 0; t < trials && all_ok; ++t) {
      UpperTriangularMatrix target(raw.n(), EntryKind::Raw);
      for (int idx = 0; idx < pairs; ++idx) {
        target[idx] = std::max(raw[idx] + eps * directions[t][idx],
                               1e-12 * raw[idx]);
      }
      try {
        all_ok = realize_perturbation(base, target, opts, &m).converged;
      } catch (const PreconditionError&) {
        all_ok = false;
      }
    }
    if (all_ok) return eps;
  }
  return 0.0;
}

}  // namespace lpembed
