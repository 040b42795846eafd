// Compares the serial reference campaign loops against the OpenMP kernels
// and checks that both produce identical results.

#include "lpembed/experiments.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>

using namespace lpembed;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  int trials = argc > 1 ? std::atoi(argv[1]) : 20000;
  if (trials < 1) trials = 20000;

  SampleCampaign campaign;
  campaign.n = 4;
  campaign.dim = 4;
  campaign.p = PExponent(2.5);
  campaign.trials = trials;
  campaign.seed = 99;

  std::printf("density campaign: n=%d trials=%d threads=%d\n", campaign.n,
              campaign.trials, omp_get_max_threads());

  auto t0 = std::chrono::steady_clock::now();
  const DensityReport serial = sample_rank_density_serial(campaign);
  const double serial_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const DensityReport parallel = sample_rank_density(campaign);
  const double parallel_s = seconds_since(t0);

  const bool identical = serial.in_g_count == parallel.in_g_count &&
                         serial.full_rank == parallel.full_rank &&
                         serial.smallest_retained == parallel.smallest_retained;
  std::printf("  serial   %8.3fs  (in-G %d/%d)\n", serial_s, serial.in_g_count,
              campaign.trials);
  std::printf("  parallel %8.3fs  (in-G %d/%d)\n", parallel_s,
              parallel.in_g_count, campaign.trials);
  std::printf("  speedup  %8.2fx  outputs %s\n", serial_s / parallel_s,
              identical ? "identical" : "DIFFER");

  const std::vector<int> n_list{3, 4};
  const std::vector<int> dim_list{4};
  const std::vector<double> p_list{1.5, 2.0};
  const int survey_trials = std::max(1, trials / 40);

  std::printf("witness survey: %zu cells x %d trials\n",
              n_list.size() * dim_list.size() * p_list.size(), survey_trials);

  t0 = std::chrono::steady_clock::now();
  const auto table_serial =
      property_k_survey_serial(n_list, dim_list, p_list, survey_trials, 7);
  const double survey_serial_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto table_parallel =
      property_k_survey(n_list, dim_list, p_list, survey_trials, 7);
  const double survey_parallel_s = seconds_since(t0);

  bool survey_identical = table_serial.size() == table_parallel.size();
  for (size_t c = 0; survey_identical && c < table_serial.size(); ++c) {
    survey_identical = table_serial[c].frequency == table_parallel[c].frequency;
  }
  std::printf("  serial   %8.3fs\n", survey_serial_s);
  std::printf("  parallel %8.3fs\n", survey_parallel_s);
  std::printf("  speedup  %8.2fx  outputs %s\n",
              survey_serial_s / survey_parallel_s,
              survey_identical ? "identical" : "DIFFER");

  return identical && survey_identical ? 0 : 1;
}
