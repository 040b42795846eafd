#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Index conventions, used everywhere:
//   * point pairs (i, j), 0 <= i < j < n, are enumerated lexicographically:
//     (0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1);
//   * Jacobian columns are point-major: column l*dim + k differentiates with
//     respect to coordinate k of point l.

namespace lpembed {

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto its exit-code taxonomy: precondition and
// validation failures exit 2, non-convergence exits 3, capacity exits 4.
// ---------------------------------------------------------------------------

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two points share a coordinate value where the operation requires none.
class DegenerateInputError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class DimensionError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class LinearDependenceError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Dimension folding found no target dimension that realizes the distances.
class FoldingError : public std::runtime_error {
 public:
  FoldingError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual(best_residual) {}
  double best_residual = 0.0;
};

// The oracle's equivalence slack exceeds what the perturbation budget admits.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Scalars and small helpers
// ---------------------------------------------------------------------------

// Default relative threshold for numeric rank: singular values above
// tolerance * sigma_max are retained.
inline constexpr double kDefaultRankTolerance = 1e-10;

// Coordinates of two points count as tied when they differ by no more than
// this times (1 + max coordinate magnitude).
inline constexpr double kTieBand = 1e-12;

// Norm exponent. Valid range is [1, inf); the distance Jacobian additionally
// requires p > 1.
struct PExponent {
  double value = 2.0;

  PExponent() = default;
  PExponent(double v) : value(v) {
    if (!std::isfinite(v) || v < 1.0) {
      throw PreconditionError("exponent p must satisfy 1 <= p < inf, got " +
                              std::to_string(v));
    }
  }
  operator double() const { return value; }
};

inline int pair_count(int n) { return n * (n - 1) / 2; }

// Lexicographic index of the pair (i, j), 0 <= i < j < n.
inline int pair_index(int n, int i, int j) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

// Inverse of pair_index.
std::pair<int, int> pair_at(int n, int index);

// ---------------------------------------------------------------------------
// Configuration: an ordered tuple of n points in R^dim plus the exponent p.
// ---------------------------------------------------------------------------

struct Configuration {
  PExponent p{2.0};
  Eigen::MatrixXd points;  // n rows, dim columns

  Configuration() = default;
  Configuration(PExponent p_, Eigen::MatrixXd pts)
      : p(p_), points(std::move(pts)) {}

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }

  // n >= 2, dim >= 1, all coordinates finite.
  void validate() const;
};

// Appends zero coordinates until the configuration lives in R^dim.
Configuration pad_dimension(const Configuration& config, int dim);

// ---------------------------------------------------------------------------
// Pairwise values indexed by (i, j), i < j.
// ---------------------------------------------------------------------------

enum class EntryKind { PthPower, Raw };

class UpperTriangularMatrix {
 public:
  UpperTriangularMatrix(int n, EntryKind kind)
      : n_(n), kind_(kind), entries_(pair_count(n), 0.0) {
    if (n < 2) throw PreconditionError("pair matrix needs n >= 2");
  }

  int n() const { return n_; }
  EntryKind kind() const { return kind_; }
  int size() const { return static_cast<int>(entries_.size()); }

  double& at(int i, int j) { return entries_[pair_index(n_, i, j)]; }
  double at(int i, int j) const { return entries_[pair_index(n_, i, j)]; }
  double& operator[](int index) { return entries_[index]; }
  double operator[](int index) const { return entries_[index]; }

  std::vector<double>& entries() { return entries_; }
  const std::vector<double>& entries() const { return entries_; }

  // All entries finite and nonnegative.
  void validate() const;

 private:
  int n_;
  EntryKind kind_;
  std::vector<double> entries_;
};

// ---------------------------------------------------------------------------
// Jacobian of the p-th-power pairwise distance map.
// ---------------------------------------------------------------------------

struct JacobianMatrix {
  int n = 0;    // point count (pair_count(n) rows)
  int dim = 0;  // ambient dimension (n*dim columns)
  Eigen::MatrixXd m;

  int rows() const { return static_cast<int>(m.rows()); }
  int cols() const { return static_cast<int>(m.cols()); }
  static int column(int dim, int l, int k) { return l * dim + k; }
};

struct RankReport {
  std::vector<double> singular_values;  // nonincreasing
  int numeric_rank = 0;
  bool full_rank = false;
  double tolerance_used = 0.0;
};

// ---------------------------------------------------------------------------
// Point reordering and the induced pair reindexing.
// ---------------------------------------------------------------------------

// pi[i] names the source slot moved into slot i, so the reordered tuple is
// (x_{pi[0]}, ..., x_{pi[n-1]}).
struct PermutationMap {
  std::vector<int> pi;

  int size() const { return static_cast<int>(pi.size()); }
  bool is_identity() const;
  PermutationMap inverse() const;
  void validate() const;
};

Configuration apply_point_permutation(const PermutationMap& perm,
                                      const Configuration& config);

// Pulls pair values along the reordering: output (i,j) entry reads the input
// entry of the unordered pair {pi[i], pi[j]}.
UpperTriangularMatrix apply_pair_permutation(const PermutationMap& perm,
                                             const UpperTriangularMatrix& u);

// ---------------------------------------------------------------------------
// Coordinate subsets and projections.
// ---------------------------------------------------------------------------

struct CoordinateSubset {
  std::vector<int> indices;  // strictly increasing, 0-based

  int size() const { return static_cast<int>(indices.size()); }
  void validate(int dim) const;
};

Configuration project(const Configuration& config,
                      const CoordinateSubset& subset);

struct TieLocation {
  int i = 0, j = 0, k = 0;
};

// First (i, j, k) with |x_i^k - x_j^k| inside the tie band, if any.
std::optional<TieLocation> find_coordinate_tie(const Configuration& config);

// (sum_k |v_k|^p)^(1/p)
double lp_norm(const Eigen::VectorXd& v, double p);

}  // namespace lpembed
