#include "lpembed/experiments.hpp"

#include <omp.h>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lpembed {

Configuration draw_configuration(int n, int dim, PExponent p, Distribution dist,
                                 Rng rng) {
  Eigen::MatrixXd pts(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) {
      pts(i, k) = dist == Distribution::StandardGaussian
                      ? rng.gaussian()
                      : rng.uniform(-1.0, 1.0);
    }
  }
  return {p, std::move(pts)};
}

namespace {

struct TrialOutcome {
  uint8_t full_rank = 0;
  double smallest_retained = 0.0;
};

TrialOutcome density_trial(const SampleCampaign& campaign, int trial,
                           double tolerance) {
  const Configuration config =
      draw_configuration(campaign.n, campaign.dim, campaign.p, campaign.dist,
                         Rng::substream(campaign.seed, trial));
  const RankReport report = rank_test(distance_jacobian(config), tolerance);
  TrialOutcome out;
  out.full_rank = report.full_rank ? 1 : 0;
  // The smallest singular value that must clear the threshold for full rank.
  out.smallest_retained =
      report.singular_values[pair_count(campaign.n) - 1];
  return out;
}

DensityReport collect(const std::vector<TrialOutcome>& outcomes) {
  DensityReport report;
  report.full_rank.resize(outcomes.size());
  report.smallest_retained.resize(outcomes.size());
  for (size_t t = 0; t < outcomes.size(); ++t) {
    report.full_rank[t] = outcomes[t].full_rank;
    report.smallest_retained[t] = outcomes[t].smallest_retained;
    report.in_g_count += outcomes[t].full_rank;
  }
  return report;
}

void check_campaign(const SampleCampaign& campaign) {
  if (campaign.trials < 1) throw PreconditionError("campaign needs trials >= 1");
  if (campaign.dim != campaign.n) {
    throw DimensionError("density sampling is defined for dim == n");
  }
}

}  // namespace

DensityReport sample_rank_density_serial(const SampleCampaign& campaign,
                                         double tolerance) {
  check_campaign(campaign);
  std::vector<TrialOutcome> outcomes(campaign.trials);
  for (int t = 0; t < campaign.trials; ++t) {
    outcomes[t] = density_trial(campaign, t, tolerance);
  }
  return collect(outcomes);
}

DensityReport sample_rank_density(const SampleCampaign& campaign,
                                  double tolerance, int jobs) {
  check_campaign(campaign);
  std::vector<TrialOutcome> outcomes(campaign.trials);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int t = 0; t < campaign.trials; ++t) {
    outcomes[t] = density_trial(campaign, t, tolerance);
  }
  return collect(outcomes);
}

namespace {

// Entry (sigma, rho) with sigma = (k, l) selecting the direction "coordinate k
// of point l" (k < l) and rho the lexicographic pair, both in row order.
void fill_selection_matrix(const Eigen::MatrixXd& pts, double p,
                           Eigen::MatrixXd& out) {
  const int n = static_cast<int>(pts.rows());
  int row = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l, ++row) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const int col = pair_index(n, i, j);
          double v = 0.0;
          if (i == l || j == l) {
            const double d = pts(i, k) - pts(j, k);
            if (d != 0.0) {
              const double mag = p * std::pow(std::abs(d), p - 1.0);
              const double s = d > 0.0 ? 1.0 : -1.0;
              v = mag * s * (i == l ? 1.0 : -1.0);
            }
          }
          out(row, col) = v;
        }
      }
    }
  }
}

double determinant_at(const LineProbe& probe, double t, Eigen::MatrixXd& work,
                      Eigen::MatrixXd& pts) {
  pts = (1.0 - t) * probe.endpoint_a.points + t * probe.endpoint_b.points;
  fill_selection_matrix(pts, probe.endpoint_a.p, work);
  return work.determinant();
}

}  // namespace

Eigen::MatrixXd direction_selection_matrix(const Configuration& config) {
  config.validate();
  if (config.dim() != config.n()) {
    throw DimensionError("direction selection needs dim == n");
  }
  const int pairs = pair_count(config.n());
  Eigen::MatrixXd out(pairs, pairs);
  fill_selection_matrix(config.points, config.p, out);
  return out;
}

LineProbeResult line_probe_determinant(const LineProbe& probe) {
  const Configuration& a = probe.endpoint_a;
  const Configuration& b = probe.endpoint_b;
  a.validate();
  b.validate();
  if (a.n() != b.n() || a.dim() != b.dim() || a.p != static_cast<double>(b.p)) {
    throw DimensionError("probe endpoints must share n, dim and p");
  }
  if (a.dim() != a.n()) {
    throw DimensionError("line probe needs dim == n");
  }
  if (probe.samples < 2) throw PreconditionError("probe needs samples >= 2");

  // Every coordinate-order relation must agree between the endpoints,
  // including ties (a tie at one endpoint must be a tie at the other), so
  // each entry of the system keeps one sign along the whole segment.
  for (int i = 0; i < a.n(); ++i) {
    for (int j = i + 1; j < a.n(); ++j) {
      for (int k = 0; k < a.dim(); ++k) {
        const double da = a.points(i, k) - a.points(j, k);
        const double db = b.points(i, k) - b.points(j, k);
        const int sa = da > 0.0 ? 1 : (da < 0.0 ? -1 : 0);
        const int sb = db > 0.0 ? 1 : (db < 0.0 ? -1 : 0);
        if (sa != sb) {
          std::ostringstream os;
          os << "endpoints lie in different regions: the order of points "
             << i + 1 << " and " << j + 1 << " differs at coordinate " << k + 1;
          throw PreconditionError(os.str());
        }
      }
    }
  }

  const int pairs = pair_count(a.n());
  Eigen::MatrixXd work(pairs, pairs);
  Eigen::MatrixXd pts(a.n(), a.dim());
  auto g = [&](double t) { return determinant_at(probe, t, work, pts); };

  LineProbeResult result;
  result.g_at_zero = g(0.0);
  // Hadamard scale of the row norms keeps the nonzero check dimensionless.
  fill_selection_matrix(a.points, a.p, work);
  double scale = 1.0;
  for (int r = 0; r < pairs; ++r) scale *= std::max(work.row(r).norm(), 1e-300);
  if (std::abs(result.g_at_zero) <= 1e-10 * scale) {
    throw PreconditionError(
        "determinant vanishes at the left endpoint; the probe needs "
        "linearly independent partials there");
  }

  result.grid_t.resize(probe.samples + 1);
  result.grid_g.resize(probe.samples + 1);
  double max_abs = 0.0;
  for (int s = 0; s <= probe.samples; ++s) {
    const double t = static_cast<double>(s) / probe.samples;
    result.grid_t[s] = t;
    result.grid_g[s] = g(t);
    max_abs = std::max(max_abs, std::abs(result.grid_g[s]));
  }

  for (int s = 0; s < probe.samples; ++s) {
    if (result.grid_g[s] == 0.0 ||
        (result.grid_g[s] > 0.0) == (result.grid_g[s + 1] > 0.0)) {
      continue;
    }
    ++result.zero_bracket_count;
    double lo = result.grid_t[s];
    double hi = result.grid_t[s + 1];
    double g_lo = result.grid_g[s];
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      const double g_mid = g(mid);
      if (g_mid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((g_mid > 0.0) == (g_lo > 0.0)) {
        lo = mid;
        g_lo = g_mid;
      } else {
        hi = mid;
      }
    }
    result.refined_zeros.push_back(0.5 * (lo + hi));
  }

  // Isolated zeros: no near-zero plateau wider than two grid cells.
  const double near_zero = 1e-9 * max_abs;
  int run = 0;
  for (int s = 0; s <= probe.samples; ++s) {
    run = std::abs(result.grid_g[s]) < near_zero ? run + 1 : 0;
    if (run > 2) {
      result.zeros_isolated = false;
      break;
    }
  }
  return result;
}

namespace {

struct SurveyPlan {
  std::vector<SurveyCell> cells;
};

SurveyPlan plan_survey(const std::vector<int>& n_list,
                       const std::vector<int>& dim_list,
                       const std::vector<double>& p_list, int trials) {
  if (trials < 1) throw PreconditionError("survey needs trials >= 1");
  SurveyPlan plan;
  for (int n : n_list) {
    for (int dim : dim_list) {
      if (dim < n) throw DimensionError("survey cells need dim >= n");
      for (double p : p_list) {
        plan.cells.push_back({n, dim, p, trials, 0.0});
      }
    }
  }
  return plan;
}

uint8_t survey_trial(const SurveyCell& cell, uint64_t seed, size_t cell_index,
                     int trial, Distribution dist, double tolerance) {
  Rng rng = Rng::substream(seed, cell_index).split(trial);
  const Configuration config =
      draw_configuration(cell.n, cell.dim, PExponent(cell.p), dist, rng);
  return has_property_k(config, SearchStrategy::Exhaustive, tolerance).found
             ? 1
             : 0;
}

}  // namespace

std::vector<SurveyCell> property_k_survey_serial(
    const std::vector<int>& n_list, const std::vector<int>& dim_list,
    const std::vector<double>& p_list, int trials, uint64_t seed,
    Distribution dist, double tolerance) {
  SurveyPlan plan = plan_survey(n_list, dim_list, p_list, trials);
  for (size_t c = 0; c < plan.cells.size(); ++c) {
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      hits += survey_trial(plan.cells[c], seed, c, t, dist, tolerance);
    }
    plan.cells[c].frequency = static_cast<double>(hits) / trials;
  }
  return plan.cells;
}

std::vector<SurveyCell> property_k_survey(const std::vector<int>& n_list,
                                          const std::vector<int>& dim_list,
                                          const std::vector<double>& p_list,
                                          int trials, uint64_t seed,
                                          Distribution dist, double tolerance,
                                          int jobs) {
  SurveyPlan plan = plan_survey(n_list, dim_list, p_list, trials);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  for (size_t c = 0; c < plan.cells.size(); ++c) {
    std::vector<uint8_t> hits(trials, 0);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int t = 0; t < trials; ++t) {
      hits[t] = survey_trial(plan.cells[c], seed, c, t, dist, tolerance);
    }
    int total = 0;
    for (uint8_t h : hits) total += h;
    plan.cells[c].frequency = static_cast<double>(total) / trials;
  }
  return plan.cells;
}

}  // namespace lpembed
