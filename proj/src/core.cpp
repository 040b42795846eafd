#include "lpembed/core.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <numeric>
#include <sstream>

namespace lpembed {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::string tie_message(const TieLocation& t) {
  std::ostringstream os;
  os << "points " << t.i + 1 << " and " << t.j + 1
     << " share coordinate " << t.k + 1;
  return os.str();
}

// Advances a strictly increasing combination in lexicographic order.
bool next_combination(std::vector<int>& comb, int dim) {
  const int n = static_cast<int>(comb.size());
  for (int k = n - 1; k >= 0; --k) {
    if (comb[k] < dim - (n - k)) {
      ++comb[k];
      for (int j = k + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

UpperTriangularMatrix power_distance_matrix(const Configuration& config) {
  config.validate();
  const int n = config.n();
  const double p = config.p;
  UpperTriangularMatrix out(n, EntryKind::PthPower);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (int k = 0; k < config.dim(); ++k) {
        sum += std::pow(std::abs(config.points(i, k) - config.points(j, k)), p);
      }
      out.at(i, j) = sum;
    }
  }
  return out;
}

UpperTriangularMatrix distance_matrix(const Configuration& config) {
  UpperTriangularMatrix pth = power_distance_matrix(config);
  UpperTriangularMatrix out(config.n(), EntryKind::Raw);
  const double inv_p = 1.0 / config.p;
  for (int idx = 0; idx < pth.size(); ++idx) {
    out[idx] = std::pow(pth[idx], inv_p);
  }
  return out;
}

JacobianMatrix distance_jacobian(const Configuration& config) {
  config.validate();
  const double p = config.p;
  if (p <= 1.0) {
    throw PreconditionError(
        "distance_jacobian requires p > 1; use sign_jacobian for p = 1");
  }
  const int n = config.n();
  const int dim = config.dim();
  JacobianMatrix jac;
  jac.n = n;
  jac.dim = dim;
  jac.m = Eigen::MatrixXd::Zero(pair_count(n), n * dim);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int row = pair_index(n, i, j);
      for (int k = 0; k < dim; ++k) {
        const double d = config.points(i, k) - config.points(j, k);
        if (d == 0.0) continue;  // sgn(0) = 0
        const double g = p * std::pow(std::abs(d), p - 1.0) * sgn(d);
        jac.m(row, JacobianMatrix::column(dim, i, k)) = g;
        jac.m(row, JacobianMatrix::column(dim, j, k)) = -g;
      }
    }
  }
  return jac;
}

JacobianMatrix sign_jacobian(const Configuration& config) {
  config.validate();
  if (auto tie = find_coordinate_tie(config)) {
    throw DegenerateInputError("sign_jacobian needs a tie-free configuration: " +
                               tie_message(*tie));
  }
  const int n = config.n();
  const int dim = config.dim();
  JacobianMatrix jac;
  jac.n = n;
  jac.dim = dim;
  jac.m = Eigen::MatrixXd::Zero(pair_count(n), n * dim);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int row = pair_index(n, i, j);
      for (int k = 0; k < dim; ++k) {
        const double s = sgn(config.points(i, k) - config.points(j, k));
        jac.m(row, JacobianMatrix::column(dim, i, k)) = s;
        jac.m(row, JacobianMatrix::column(dim, j, k)) = -s;
      }
    }
  }
  return jac;
}

RankReport rank_test(const JacobianMatrix& jac, double tolerance) {
  if (tolerance <= 0.0 || tolerance >= 1.0) {
    throw PreconditionError("rank tolerance must lie in (0, 1)");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac.m);
  const Eigen::VectorXd& sigma = svd.singularValues();
  RankReport report;
  report.tolerance_used = tolerance;
  report.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
  const double cutoff = sigma.size() > 0 ? tolerance * sigma[0] : 0.0;
  for (double s : report.singular_values) {
    if (s > cutoff && s > 0.0) ++report.numeric_rank;
  }
  report.full_rank = report.numeric_rank == pair_count(jac.n);
  return report;
}

PropertyKResult has_property_k(const Configuration& config,
                               SearchStrategy strategy, double tolerance) {
  config.validate();
  const int n = config.n();
  const int dim = config.dim();
  if (dim < n) {
    throw DimensionError("projection witness needs dim >= n");
  }
  if (config.p <= 1.0) {
    throw PreconditionError("projection witness test requires p > 1");
  }

  auto passes = [&](const std::vector<int>& comb) {
    CoordinateSubset subset{comb};
    return rank_test(distance_jacobian(project(config, subset)), tolerance)
        .full_rank;
  };

  std::vector<int> greedy_pick;
  if (strategy == SearchStrategy::Greedy) {
    // Dispersion score: variance of the n values in each coordinate.
    std::vector<std::pair<double, int>> scored(dim);
    for (int k = 0; k < dim; ++k) {
      const double mean = config.points.col(k).mean();
      const double var =
          (config.points.col(k).array() - mean).square().sum() / n;
      scored[k] = {-var, k};
    }
    std::sort(scored.begin(), scored.end());
    greedy_pick.resize(n);
    for (int k = 0; k < n; ++k) greedy_pick[k] = scored[k].second;
    std::sort(greedy_pick.begin(), greedy_pick.end());
    if (passes(greedy_pick)) {
      return {true, CoordinateSubset{greedy_pick}};
    }
  }

  std::vector<int> comb(n);
  std::iota(comb.begin(), comb.end(), 0);
  do {
    if (comb == greedy_pick) continue;  // already tested
    if (passes(comb)) {
      return {true, CoordinateSubset{comb}};
    }
  } while (next_combination(comb, dim));
  return {false, {}};
}

Configuration make_triangular_config(int n, const std::vector<double>& tail,
                                     PExponent p) {
  if (n < 2) throw PreconditionError("triangular family needs n >= 2");
  if (static_cast<int>(tail.size()) != pair_count(n)) {
    throw DimensionError("triangular family needs pair_count(n) coefficients");
  }
  Eigen::MatrixXd pts = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double c = tail[pair_index(n, i, j)];
      if (!std::isfinite(c)) {
        throw PreconditionError("triangular coefficients must be finite");
      }
      pts(i, j) = c;
    }
  }
  return {p, std::move(pts)};
}

NormalizedOrder normalize_point_order(const Configuration& config) {
  config.validate();
  const int n = config.n();
  if (config.dim() != n) {
    throw DimensionError("point-order normalization needs dim == n");
  }
  if (auto tie = find_coordinate_tie(config)) {
    throw DegenerateInputError("cannot order a tied configuration: " +
                               tie_message(*tie));
  }

  // Slot j takes the still-unplaced point with the largest coordinate j.
  PermutationMap perm;
  perm.pi.assign(n, -1);
  std::vector<char> used(n, 0);
  for (int j = 0; j < n; ++j) {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      if (best < 0 || config.points(i, j) > config.points(best, j)) best = i;
    }
    perm.pi[j] = best;
    used[best] = 1;
  }
  return {perm, apply_point_permutation(perm, config)};
}

Configuration gram_schmidt_rotate(const Configuration& config) {
  config.validate();
  if (config.p != 2.0) {
    throw PreconditionError("gram_schmidt_rotate requires p = 2");
  }
  const int n = config.n();
  const int dim = config.dim();
  if (dim < n) {
    throw LinearDependenceError("n points in dimension < n cannot be "
                                "linearly independent");
  }

  // Classical Gram-Schmidt with one re-orthogonalization pass; positive
  // pivots fix the sign of the rotation.
  Eigen::MatrixXd q(dim, n);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = config.points.row(i).transpose();
    const double input_norm = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < i; ++j) {
        const double c = q.col(j).dot(v);
        r(j, i) += c;
        v -= c * q.col(j);
      }
    }
    r(i, i) = v.norm();
    if (!(r(i, i) > 1e-12 * std::max(input_norm, 1e-300))) {
      throw LinearDependenceError("points are numerically linearly dependent");
    }
    q.col(i) = v / r(i, i);
  }

  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) pts(i, j) = r(j, i);
  }
  return {config.p, std::move(pts)};
}

}  // namespace lpembed
