#include "lpembed/types.hpp"

#include <algorithm>
#include <numeric>

namespace lpembed {

std::pair<int, int> pair_at(int n, int index) {
  int i = 0;
  int row_len = n - 1;
  while (index >= row_len) {
    index -= row_len;
    ++i;
    --row_len;
  }
  return {i, i + 1 + index};
}

void Configuration::validate() const {
  if (n() < 2) throw PreconditionError("configuration needs n >= 2 points");
  if (dim() < 1) throw PreconditionError("configuration needs dim >= 1");
  if (!points.allFinite()) {
    throw PreconditionError("configuration has non-finite coordinates");
  }
}

Configuration pad_dimension(const Configuration& config, int dim) {
  if (dim < config.dim()) {
    throw DimensionError("pad_dimension cannot shrink a configuration");
  }
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(config.n(), dim);
  pts.leftCols(config.dim()) = config.points;
  return {config.p, std::move(pts)};
}

void UpperTriangularMatrix::validate() const {
  for (double v : entries_) {
    if (!std::isfinite(v)) {
      throw PreconditionError("pair matrix has a non-finite entry");
    }
    if (v < 0.0) {
      throw PreconditionError("pair matrix has a negative entry");
    }
  }
}

bool PermutationMap::is_identity() const {
  for (int i = 0; i < size(); ++i) {
    if (pi[i] != i) return false;
  }
  return true;
}

PermutationMap PermutationMap::inverse() const {
  PermutationMap inv;
  inv.pi.assign(pi.size(), 0);
  for (int i = 0; i < size(); ++i) inv.pi[pi[i]] = i;
  return inv;
}

void PermutationMap::validate() const {
  std::vector<int> seen(pi.size(), 0);
  for (int v : pi) {
    if (v < 0 || v >= size() || seen[v]++) {
      throw PreconditionError("permutation is not a bijection");
    }
  }
}

Configuration apply_point_permutation(const PermutationMap& perm,
                                      const Configuration& config) {
  if (perm.size() != config.n()) {
    throw DimensionError("permutation size does not match point count");
  }
  Eigen::MatrixXd pts(config.n(), config.dim());
  for (int i = 0; i < config.n(); ++i) pts.row(i) = config.points.row(perm.pi[i]);
  return {config.p, std::move(pts)};
}

UpperTriangularMatrix apply_pair_permutation(const PermutationMap& perm,
                                             const UpperTriangularMatrix& u) {
  if (perm.size() != u.n()) {
    throw DimensionError("permutation size does not match pair matrix");
  }
  UpperTriangularMatrix out(u.n(), u.kind());
  for (int i = 0; i < u.n(); ++i) {
    for (int j = i + 1; j < u.n(); ++j) {
      const int a = std::min(perm.pi[i], perm.pi[j]);
      const int b = std::max(perm.pi[i], perm.pi[j]);
      out.at(i, j) = u.at(a, b);
    }
  }
  return out;
}

void CoordinateSubset::validate(int dim) const {
  for (int k = 0; k < size(); ++k) {
    if (indices[k] < 0 || indices[k] >= dim) {
      throw DimensionError("coordinate index out of range");
    }
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw PreconditionError("coordinate subset must be strictly increasing");
    }
  }
}

Configuration project(const Configuration& config,
                      const CoordinateSubset& subset) {
  subset.validate(config.dim());
  Eigen::MatrixXd pts(config.n(), subset.size());
  for (int k = 0; k < subset.size(); ++k) {
    pts.col(k) = config.points.col(subset.indices[k]);
  }
  return {config.p, std::move(pts)};
}

std::optional<TieLocation> find_coordinate_tie(const Configuration& config) {
  const double band =
      kTieBand * (1.0 + config.points.cwiseAbs().maxCoeff());
  for (int i = 0; i < config.n(); ++i) {
    for (int j = i + 1; j < config.n(); ++j) {
      for (int k = 0; k < config.dim(); ++k) {
        if (std::abs(config.points(i, k) - config.points(j, k)) <= band) {
          return TieLocation{i, j, k};
        }
      }
    }
  }
  return std::nullopt;
}

double lp_norm(const Eigen::VectorXd& v, double p) {
  double sum = 0.0;
  for (int k = 0; k < v.size(); ++k) sum += std::pow(std::abs(v[k]), p);
  return std::pow(sum, 1.0 / p);
}

}  // namespace lpembed
