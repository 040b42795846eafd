#pragma once

#include "lpembed/core.hpp"
#include "lpembed/rng.hpp"
#include "lpembed/types.hpp"

#include <cstdint>

namespace lpembed {

enum class Distribution { StandardGaussian, UniformCube };

// Seeded draw of an n-point configuration in R^dim; coordinates are filled
// point-major so the draw is independent of execution order.
Configuration draw_configuration(int n, int dim, PExponent p,
                                 Distribution dist, Rng rng);

struct SampleCampaign {
  int n = 3;
  int dim = 3;
  PExponent p{2.0};
  int trials = 1000;
  uint64_t seed = 0;
  Distribution dist = Distribution::StandardGaussian;
};

struct DensityReport {
  int in_g_count = 0;
  std::vector<uint8_t> full_rank;         // per trial
  std::vector<double> smallest_retained;  // per trial: sigma_{pair_count(n)}
};

// Draws `trials` configurations with dim == n and counts how many pass the
// full-rank test. The OpenMP version distributes trials across threads; the
// serial version is the reference both must match bitwise (each trial draws
// from its own substream, and results land in trial-indexed slots).
DensityReport sample_rank_density_serial(const SampleCampaign& campaign,
                                         double tolerance = kDefaultRankTolerance);
DensityReport sample_rank_density(const SampleCampaign& campaign,
                                  double tolerance = kDefaultRankTolerance,
                                  int jobs = 0);

struct LineProbe {
  Configuration endpoint_a;
  Configuration endpoint_b;
  int samples = 10000;
};

struct LineProbeResult {
  std::vector<double> grid_t;
  std::vector<double> grid_g;
  double g_at_zero = 0.0;
  int zero_bracket_count = 0;
  std::vector<double> refined_zeros;
  // False when a near-zero plateau wider than two grid cells shows up.
  bool zeros_isolated = true;
};

// Tracks the determinant g(t) of the square partial-derivative system along
// the segment between two configurations in the same tie-free region (all
// pairwise coordinate orderings equal). Rows select the directions (point l,
// coordinate k) with k < l; columns are the lexicographic pairs. Sign changes
// are bracketed on the grid and refined by bisection to 1e-12 in t.
LineProbeResult line_probe_determinant(const LineProbe& probe);

// Square direction-selection matrix whose determinant the probe tracks,
// assembled directly from the derivative formula at one configuration.
Eigen::MatrixXd direction_selection_matrix(const Configuration& config);

struct SurveyCell {
  int n = 0;
  int dim = 0;
  double p = 2.0;
  int trials = 0;
  double frequency = 0.0;
};

// Frequency of the projection-witness property over seeded draws, one row
// per (n, dim, p) cell. Every dim must be >= every n requested.
std::vector<SurveyCell> property_k_survey_serial(
    const std::vector<int>& n_list, const std::vector<int>& dim_list,
    const std::vector<double>& p_list, int trials, uint64_t seed,
    Distribution dist = Distribution::StandardGaussian,
    double tolerance = kDefaultRankTolerance);
std::vector<SurveyCell> property_k_survey(
    const std::vector<int>& n_list, const std::vector<int>& dim_list,
    const std::vector<double>& p_list, int trials, uint64_t seed,
    Distribution dist = Distribution::StandardGaussian,
    double tolerance = kDefaultRankTolerance, int jobs = 0);

}  // namespace lpembed
