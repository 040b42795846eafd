#pragma once

#include "lpembed/core.hpp"
#include "lpembed/types.hpp"

#include <cstdint>

namespace lpembed {

struct SolveOptions {
  int max_iterations = 100;
  double residual_tolerance = 1e-9;  // absolute, on p-th-power entries
  double step_damping = 1.0;         // in (0, 1]
  double regularization = 0.0;       // added to the normal equations

  void validate() const;
};

struct TracePoint {
  int iteration = 0;
  double residual = 0.0;
};

struct RealizationResult {
  Configuration configuration;
  double residual_inf_norm = 0.0;
  int iterations_used = 0;
  bool converged = false;
  // (pair, coordinate) sign flips observed between accepted iterates.
  int tie_crossings = 0;
  std::vector<TracePoint> trace;
};

// Gauss-Newton inversion of the p-th-power distance map near `base`. Each
// step solves the linearized system in the least-squares sense (minimum-norm
// via SVD; Tikhonov-regularized normal equations when opts.regularization is
// positive) and backtracks by halving the step on residual increase, at most
// 30 halvings. Requires base to pass rank_test at full rank. Target entries
// must be nonnegative, with zeros only on pairs whose base distance is zero.
// Non-convergence is reported through the result, not thrown.
RealizationResult realize_distance_matrix(const Configuration& base,
                                          const UpperTriangularMatrix& target,
                                          const SolveOptions& opts = {});

// Realizes a raw (un-powered) target distance matrix near `base` by solving
// on the witness block only: the target is converted to p-th-power excesses,
// the projected block is solved with realize_distance_matrix, and every
// coordinate outside the witness subset is copied from `base` unchanged.
// Requires a full-rank projection witness (recomputed when not supplied) and
// strictly positive target entries. The reported residual is on the raw
// distance scale.
RealizationResult realize_perturbation(const Configuration& base,
                                       const UpperTriangularMatrix& raw_target,
                                       const SolveOptions& opts = {},
                                       const CoordinateSubset* witness = nullptr);

// Folds a configuration into the smallest dimension N, n <= N <= dim, that
// still realizes all pairwise distances: coordinates are permuted so the
// witness subset comes first, then for each candidate N the discarded tail
// mass is pushed into the leading n x n block and re-realized there. The
// output preserves every pairwise distance to 1e-9 relative and keeps a
// full-rank witness on its first n coordinates. Throws FoldingError (with the
// best residual achieved) when no candidate dimension converges.
Configuration reduce_dimension(const Configuration& x,
                               const SolveOptions& opts = {},
                               const CoordinateSubset* witness = nullptr);

// Halving search for a perturbation radius: the largest eps (from the search
// grid eps0, eps0/2, ...) such that `trials` seeded random perturbations of
// the raw distance matrix, each entry shifted inside (-eps, eps), all
// realize. A lower-bound witness, not the supremum. The per-trial shift
// directions depend only on (seed, trial), so enlarging `trials` can only
// shrink the returned radius.
double estimate_perturbation_radius(const Configuration& base, int trials,
                                    uint64_t seed,
                                    const SolveOptions& opts = {},
                                    const CoordinateSubset* witness = nullptr);

}  // namespace lpembed
