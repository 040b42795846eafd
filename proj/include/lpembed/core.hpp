#pragma once

#include "lpembed/types.hpp"

namespace lpembed {

// Entry (i,j) = sum_k |x_i^k - x_j^k|^p.
UpperTriangularMatrix power_distance_matrix(const Configuration& config);

// Entry (i,j) = (sum_k |x_i^k - x_j^k|^p)^(1/p); genuine distances.
UpperTriangularMatrix distance_matrix(const Configuration& config);

// Jacobian of the p-th-power distance map. Row (i,j), column (l,k) holds
// p * |x_i^k - x_j^k|^(p-1) * sgn(x_i^k - x_j^k) * (delta_il - delta_jl),
// with sgn(0) = 0. Requires p > 1; use sign_jacobian for p = 1.
JacobianMatrix distance_jacobian(const Configuration& config);

// p = 1 limit of the distance Jacobian: entries are bare signs. Rank
// diagnostics only. Requires a tie-free configuration.
JacobianMatrix sign_jacobian(const Configuration& config);

// Numeric rank via SVD: singular values above tolerance * sigma_max are
// retained; full_rank means the retained count reaches pair_count(n).
RankReport rank_test(const JacobianMatrix& jac,
                     double tolerance = kDefaultRankTolerance);

enum class SearchStrategy { Exhaustive, Greedy };

struct PropertyKResult {
  bool found = false;
  CoordinateSubset witness;  // meaningful only when found
};

// Searches for a size-n coordinate subset whose projection has a full-rank
// distance Jacobian. Exhaustive enumerates subsets lexicographically; Greedy
// first probes the n coordinates with the largest dispersion across points,
// then falls back to the exhaustive scan. Both agree on the boolean answer.
PropertyKResult has_property_k(const Configuration& config,
                               SearchStrategy strategy = SearchStrategy::Exhaustive,
                               double tolerance = kDefaultRankTolerance);

// Builds the unit-diagonal triangular family in R^n: point i is e_i plus the
// given coefficients on coordinates j > i, supplied in lexicographic pair
// order. These configurations always pass rank_test at full rank.
Configuration make_triangular_config(int n, const std::vector<double>& tail,
                                     PExponent p);

struct NormalizedOrder {
  PermutationMap perm;
  Configuration config;
};

// Reorders points so that each point dominates its own slot's coordinate:
// after reordering, x_i^i > x_j^i for all i < j. Requires a tie-free square
// configuration (dim == n). The returned permutation satisfies the exact
// reindexing identity checked by apply_pair_permutation.
NormalizedOrder normalize_point_order(const Configuration& config);

// p = 2 only. Applies the orthogonal map sending the (linearly independent)
// points onto a triangular frame: output point i is supported on coordinates
// 0..i with a positive pivot. Pairwise distances are preserved and the output
// has a full-rank projection witness on the first n coordinates.
Configuration gram_schmidt_rotate(const Configuration& config);

}  // namespace lpembed
