// Command-line front end: generate configurations, test projection
// witnesses, realize distance matrices, fold dimensions, build norm oracles,
// embed, survey, and probe determinants along segments.
//
// Exit codes: 0 success, 2 validation or precondition failure,
// 3 non-convergence, 4 capacity (the oracle slack exceeds the perturbation
// budget).

#include <CLI11.hpp>

#include "lpembed/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <string>
#include <vector>

using namespace lpembed;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitCapacity = 4;

std::string timestamp_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

json base_report(const std::string& command, json parameters,
                 bool deterministic) {
  json report;
  report["command"] = command;
  report["parameters"] = std::move(parameters);
  if (!deterministic) report["timestamp"] = timestamp_now();
  return report;
}

void emit_report(const json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text_atomic(path, text);
  }
}

std::vector<int> witness_1based(const CoordinateSubset& subset) {
  std::vector<int> out;
  out.reserve(subset.indices.size());
  for (int k : subset.indices) out.push_back(k + 1);
  return out;
}

json pair_table(const UpperTriangularMatrix& lp_dist,
                const UpperTriangularMatrix& e_dist) {
  json rows = json::array();
  for (int i = 0; i < lp_dist.n(); ++i) {
    for (int j = i + 1; j < lp_dist.n(); ++j) {
      json row;
      row["i"] = i + 1;
      row["j"] = j + 1;
      row["lp_distance"] = lp_dist.at(i, j);
      row["e_distance"] = e_dist.at(i, j);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

struct SolverFlags {
  double tol = 1e-9;
  int max_iter = 100;
  double damping = 1.0;
  double reg = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tol", tol, "residual tolerance");
    cmd->add_option("--max-iter", max_iter, "iteration cap");
    cmd->add_option("--damping", damping, "initial step damping in (0,1]");
    cmd->add_option("--reg", reg, "normal-equation regularization");
  }

  SolveOptions options() const {
    SolveOptions opts;
    opts.residual_tolerance = tol;
    opts.max_iterations = max_iter;
    opts.step_damping = damping;
    opts.regularization = reg;
    return opts;
  }
};

// ---------------------------------------------------------------------------

int run_gen(const std::string& family, int n, int dim, double p, uint64_t seed,
            const std::string& out, const std::string& report_path,
            bool deterministic) {
  if (dim == 0) dim = n;
  Configuration config;
  if (family == "gaussian" || family == "cube") {
    config = draw_configuration(n, dim, PExponent(p),
                                family == "gaussian"
                                    ? Distribution::StandardGaussian
                                    : Distribution::UniformCube,
                                Rng::substream(seed, 0));
  } else if (family == "triangular") {
    Rng rng = Rng::substream(seed, 0);
    std::vector<double> tail(pair_count(n));
    for (double& t : tail) t = rng.uniform(-1.0, 1.0);
    config = pad_dimension(make_triangular_config(n, tail, PExponent(p)), dim);
  } else if (family == "simplex") {
    config = pad_dimension(
        {PExponent(p), Eigen::MatrixXd::Identity(n, n)}, dim);
  } else {
    throw PreconditionError("unknown family '" + family + "'");
  }
  save_configuration(config, out);

  json report = base_report(
      "gen",
      {{"family", family}, {"n", n}, {"N", dim}, {"p", p}, {"seed", seed},
       {"out", out}},
      deterministic);
  report["config_digest"] = digest(configuration_to_json(config));
  emit_report(report, report_path);
  return 0;
}

int run_check_k(const std::string& in, const std::string& strategy, double tol,
                const std::string& report_path, bool deterministic) {
  const Configuration config = load_configuration(in);
  const SearchStrategy search = strategy == "greedy"
                                    ? SearchStrategy::Greedy
                                    : SearchStrategy::Exhaustive;
  const PropertyKResult result = has_property_k(config, search, tol);

  json report = base_report(
      "check-k",
      {{"in", in}, {"strategy", strategy}, {"tol", tol}}, deterministic);
  report["config_digest"] = digest(configuration_to_json(config));
  report["property_k"] = result.found;
  if (result.found) report["witness"] = witness_1based(result.witness);
  emit_report(report, report_path);
  return 0;
}

int run_jacobian(const std::string& in, double tol,
                 const std::string& report_path, bool deterministic) {
  const Configuration config = load_configuration(in);
  const bool sign_mode = static_cast<double>(config.p) == 1.0;
  const JacobianMatrix jac =
      sign_mode ? sign_jacobian(config) : distance_jacobian(config);
  const RankReport rank = rank_test(jac, tol);

  json report = base_report("jacobian", {{"in", in}, {"tol", tol}},
                            deterministic);
  report["config_digest"] = digest(configuration_to_json(config));
  report["mode"] = sign_mode ? "sign" : "derivative";
  report["rows"] = jac.rows();
  report["cols"] = jac.cols();
  report["singular_values"] = rank.singular_values;
  report["numeric_rank"] = rank.numeric_rank;
  report["full_rank"] = rank.full_rank;
  emit_report(report, report_path);
  return 0;
}

int run_realize(const std::string& base_path, const std::string& target_path,
                const std::string& out, const std::string& report_path,
                const std::string& trace_path, const SolverFlags& flags,
                bool deterministic) {
  const Configuration base = load_configuration(base_path);
  const UpperTriangularMatrix target = load_distance_matrix(target_path);
  const SolveOptions opts = flags.options();

  const RealizationResult result =
      target.kind() == EntryKind::PthPower
          ? realize_distance_matrix(base, target, opts)
          : realize_perturbation(base, target, opts);

  if (!out.empty()) save_configuration(result.configuration, out);
  if (!trace_path.empty()) write_text_atomic(trace_path, trace_csv(result.trace));

  json report = base_report(
      "realize",
      {{"base", base_path}, {"target", target_path}, {"tol", flags.tol},
       {"max_iter", flags.max_iter}, {"damping", flags.damping},
       {"reg", flags.reg}},
      deterministic);
  report["base_digest"] = digest(configuration_to_json(base));
  report["target_digest"] = digest(distance_matrix_to_json(target));
  report["target_kind"] =
      target.kind() == EntryKind::PthPower ? "pth_power" : "raw";
  report["converged"] = result.converged;
  report["residual_inf_norm"] = result.residual_inf_norm;
  report["iterations_used"] = result.iterations_used;
  report["tie_crossings"] = result.tie_crossings;
  emit_report(report, report_path);
  return result.converged ? 0 : kExitNoConvergence;
}

int run_fold(const std::string& in, const std::string& out,
             const std::string& report_path, const SolverFlags& flags,
             bool deterministic) {
  const Configuration config = load_configuration(in);
  const Configuration folded = reduce_dimension(config, flags.options());
  save_configuration(folded, out);

  const UpperTriangularMatrix before = distance_matrix(config);
  const UpperTriangularMatrix after = distance_matrix(folded);
  double defect = 0.0;
  for (int idx = 0; idx < before.size(); ++idx) {
    defect = std::max(defect, std::abs(after[idx] - before[idx]));
  }

  json report = base_report(
      "fold",
      {{"in", in}, {"tol", flags.tol}, {"max_iter", flags.max_iter},
       {"damping", flags.damping}, {"reg", flags.reg}},
      deterministic);
  report["config_digest"] = digest(configuration_to_json(config));
  report["input_dim"] = config.dim();
  report["output_dim"] = folded.dim();
  report["distance_defect_inf_norm"] = defect;
  emit_report(report, report_path);
  return 0;
}

int run_gen_norm(const std::string& kind, int dim, double p, double delta,
                 uint64_t seed, const std::string& out,
                 const std::string& report_path, bool deterministic) {
  OracleKind parsed;
  if (kind == "lp_exact") {
    parsed = OracleKind::LpExact;
  } else if (kind == "weighted_p") {
    parsed = OracleKind::WeightedP;
  } else if (kind == "linear_distortion") {
    parsed = OracleKind::LinearDistortion;
  } else {
    throw PreconditionError("unknown oracle kind '" + kind + "'");
  }
  const NormOracle oracle = make_norm_oracle(parsed, dim, PExponent(p), delta,
                                             seed);
  save_norm_oracle(oracle, out);

  json report = base_report(
      "gen-norm",
      {{"kind", kind}, {"N", dim}, {"p", p}, {"delta", delta}, {"seed", seed}},
      deterministic);
  report["certified_delta"] = oracle.delta();
  report["oracle_digest"] = digest(norm_oracle_to_json(oracle));
  emit_report(report, report_path);
  return 0;
}

int run_embed(const std::string& in, const std::string& oracle_path,
              const std::string& out, const std::string& report_path,
              const SolverFlags& flags, int max_outer, double cap,
              int radius_trials, bool deterministic) {
  const Configuration config = load_configuration(in);
  const NormOracle oracle = load_norm_oracle(oracle_path);

  const EmbeddingResult result = embed_into_norm(
      config, oracle, flags.options(), max_outer, cap, radius_trials);

  if (!out.empty()) {
    save_configuration({config.p, result.points}, out);
  }

  json report = base_report(
      "embed",
      {{"in", in}, {"oracle", oracle_path}, {"tol", flags.tol},
       {"max_iter", flags.max_iter}, {"damping", flags.damping},
       {"reg", flags.reg}, {"max_outer", max_outer},
       {"cap_override", cap}, {"radius_trials", radius_trials}},
      deterministic);
  report["input_digest"] = digest(configuration_to_json(config));
  report["oracle_digest"] = digest(norm_oracle_to_json(oracle));
  report["converged"] = result.converged;
  report["epsilon_cap"] = result.state.epsilon_cap;
  report["rho_star"] = result.state.rho;
  report["fixed_point_residual"] = result.state.residual;
  report["iterations"] = result.state.iterations;
  report["max_isometry_defect"] = result.max_isometry_defect;
  report["phi_bound_violation"] = result.phi_bound_violation;
  report["pairs"] = pair_table(result.target_distances, result.e_norm_distances);
  emit_report(report, report_path);
  return result.converged ? 0 : kExitNoConvergence;
}

int run_survey(const std::vector<int>& n_list, const std::vector<int>& dim_list,
               const std::vector<double>& p_list, int trials, uint64_t seed,
               const std::string& dist_name, int jobs, const std::string& out,
               const std::string& report_path, bool deterministic) {
  const Distribution dist = dist_name == "cube" ? Distribution::UniformCube
                                                : Distribution::StandardGaussian;
  const std::vector<SurveyCell> table =
      property_k_survey(n_list, dim_list, p_list, trials, seed, dist,
                        kDefaultRankTolerance, jobs);
  write_text_atomic(out, survey_csv(table));

  json report = base_report(
      "survey",
      {{"n_list", n_list}, {"N_list", dim_list}, {"p_list", p_list},
       {"trials", trials}, {"seed", seed}, {"dist", dist_name}, {"out", out}},
      deterministic);
  json cells = json::array();
  for (const SurveyCell& cell : table) {
    cells.push_back({{"n", cell.n}, {"N", cell.dim}, {"p", cell.p},
                     {"frequency", cell.frequency}});
  }
  report["cells"] = std::move(cells);
  emit_report(report, report_path);
  return 0;
}

int run_line_probe(const std::string& a_path, const std::string& b_path,
                   int samples, const std::string& trace_path,
                   const std::string& report_path, bool deterministic) {
  LineProbe probe;
  probe.endpoint_a = load_configuration(a_path);
  probe.endpoint_b = load_configuration(b_path);
  probe.samples = samples;
  const LineProbeResult result = line_probe_determinant(probe);

  if (!trace_path.empty()) {
    write_text_atomic(trace_path, line_probe_csv(result));
  }

  json report = base_report(
      "line-probe", {{"a", a_path}, {"b", b_path}, {"samples", samples}},
      deterministic);
  report["g_at_zero"] = result.g_at_zero;
  report["zero_bracket_count"] = result.zero_bracket_count;
  report["refined_zeros"] = result.refined_zeros;
  report["zeros_isolated"] = result.zeros_isolated;
  emit_report(report, report_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite l_p configurations: rank tests, distance-matrix "
               "realization, dimension folding, and embeddings into "
               "(1+delta)-equivalent norms"};
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a configuration file");
  std::string gen_family = "gaussian";
  int gen_n = 3, gen_dim = 0;
  double gen_p = 2.0;
  uint64_t gen_seed = 0;
  std::string gen_out, gen_report;
  bool gen_det = false;
  gen->add_option("--family", gen_family,
                  "gaussian | cube | triangular | simplex");
  gen->add_option("--n", gen_n, "point count")->required();
  gen->add_option("--N", gen_dim, "ambient dimension (default n)");
  gen->add_option("--p", gen_p, "norm exponent");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output configuration path")->required();
  gen->add_option("--report", gen_report, "report path (stdout if omitted)");
  gen->add_flag("--deterministic", gen_det, "suppress the timestamp field");

  // check-k -------------------------------------------------------------
  auto* check = app.add_subcommand("check-k", "test for a projection witness");
  std::string check_in, check_strategy = "exhaustive", check_report;
  double check_tol = kDefaultRankTolerance;
  bool check_det = false;
  check->add_option("--in", check_in, "configuration path")->required();
  check->add_option("--strategy", check_strategy, "exhaustive | greedy");
  check->add_option("--tol", check_tol, "rank tolerance");
  check->add_option("--report", check_report, "report path");
  check->add_flag("--deterministic", check_det, "suppress the timestamp field");

  // jacobian ------------------------------------------------------------
  auto* jac = app.add_subcommand("jacobian", "rank report of the distance map");
  std::string jac_in, jac_report;
  double jac_tol = kDefaultRankTolerance;
  bool jac_det = false;
  jac->add_option("--in", jac_in, "configuration path")->required();
  jac->add_option("--tol", jac_tol, "rank tolerance");
  jac->add_option("--report", jac_report, "report path");
  jac->add_flag("--deterministic", jac_det, "suppress the timestamp field");

  // realize ---------------------------------------------------------------
  auto* realize = app.add_subcommand(
      "realize", "invert the distance map toward a target matrix");
  std::string realize_base, realize_target, realize_out, realize_report,
      realize_trace;
  SolverFlags realize_flags;
  bool realize_det = false;
  realize->add_option("--base", realize_base, "base configuration")->required();
  realize->add_option("--target", realize_target, "target distance matrix")
      ->required();
  realize->add_option("--out", realize_out, "output configuration path");
  realize->add_option("--report", realize_report, "report path");
  realize->add_option("--trace", realize_trace, "convergence trace CSV path");
  realize_flags.attach(realize);
  realize->add_flag("--deterministic", realize_det,
                    "suppress the timestamp field");

  // fold ------------------------------------------------------------------
  auto* fold = app.add_subcommand("fold",
                                  "reduce the ambient dimension isometrically");
  std::string fold_in, fold_out, fold_report;
  SolverFlags fold_flags;
  bool fold_det = false;
  fold->add_option("--in", fold_in, "configuration path")->required();
  fold->add_option("--out", fold_out, "output configuration path")->required();
  fold->add_option("--report", fold_report, "report path");
  fold_flags.attach(fold);
  fold->add_flag("--deterministic", fold_det, "suppress the timestamp field");

  // gen-norm ----------------------------------------------------------------
  auto* gen_norm = app.add_subcommand("gen-norm", "generate a norm oracle");
  std::string norm_kind = "weighted_p", norm_out, norm_report;
  int norm_dim = 3;
  double norm_p = 2.0, norm_delta = 0.0;
  uint64_t norm_seed = 0;
  bool norm_det = false;
  gen_norm->add_option("--kind", norm_kind,
                       "lp_exact | weighted_p | linear_distortion");
  gen_norm->add_option("--N", norm_dim, "dimension")->required();
  gen_norm->add_option("--p", norm_p, "norm exponent");
  gen_norm->add_option("--delta", norm_delta, "requested equivalence slack");
  gen_norm->add_option("--seed", norm_seed, "random seed");
  gen_norm->add_option("--out", norm_out, "output oracle path")->required();
  gen_norm->add_option("--report", norm_report, "report path");
  gen_norm->add_flag("--deterministic", norm_det,
                     "suppress the timestamp field");

  // embed ---------------------------------------------------------------
  auto* embed = app.add_subcommand("embed",
                                   "embed isometrically into the oracle norm");
  std::string embed_in, embed_oracle, embed_out, embed_report;
  SolverFlags embed_flags;
  int embed_max_outer = 200, embed_radius_trials = 16;
  double embed_cap = 0.0;
  bool embed_det = false;
  embed->add_option("--in", embed_in, "configuration path")->required();
  embed->add_option("--oracle", embed_oracle, "norm oracle path")->required();
  embed->add_option("--out", embed_out, "embedded points path");
  embed->add_option("--report", embed_report, "report path");
  embed_flags.attach(embed);
  embed->add_option("--max-outer", embed_max_outer,
                    "fixed-point evaluation cap");
  embed->add_option("--cap", embed_cap,
                    "perturbation cap override (skips the radius estimate)");
  embed->add_option("--radius-trials", embed_radius_trials,
                    "trials for the radius estimate");
  embed->add_flag("--deterministic", embed_det,
                  "suppress the timestamp field");

  // survey ----------------------------------------------------------------
  auto* survey = app.add_subcommand("survey",
                                    "witness frequency over seeded draws");
  std::vector<int> survey_n{3}, survey_dim{3};
  std::vector<double> survey_p{2.0};
  int survey_trials = 100, survey_jobs = 0;
  uint64_t survey_seed = 0;
  std::string survey_dist = "gaussian", survey_out, survey_report;
  bool survey_det = false;
  survey->add_option("--n-list", survey_n, "point counts")->delimiter(',');
  survey->add_option("--N-list", survey_dim, "ambient dimensions")
      ->delimiter(',');
  survey->add_option("--p-list", survey_p, "norm exponents")->delimiter(',');
  survey->add_option("--trials", survey_trials, "trials per cell");
  survey->add_option("--seed", survey_seed, "random seed");
  survey->add_option("--dist", survey_dist, "gaussian | cube");
  survey->add_option("--jobs", survey_jobs, "worker threads (0 = all)");
  survey->add_option("--out", survey_out, "CSV output path")->required();
  survey->add_option("--report", survey_report, "report path");
  survey->add_flag("--deterministic", survey_det,
                   "suppress the timestamp field");

  // line-probe ------------------------------------------------------------
  auto* probe = app.add_subcommand(
      "line-probe", "determinant of the direction system along a segment");
  std::string probe_a, probe_b, probe_trace, probe_report;
  int probe_samples = 10000;
  bool probe_det = false;
  probe->add_option("--a", probe_a, "left endpoint configuration")->required();
  probe->add_option("--b", probe_b, "right endpoint configuration")->required();
  probe->add_option("--samples", probe_samples, "grid size");
  probe->add_option("--trace", probe_trace, "t,g CSV path");
  probe->add_option("--report", probe_report, "report path");
  probe->add_flag("--deterministic", probe_det,
                  "suppress the timestamp field");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return run_gen(gen_family, gen_n, gen_dim, gen_p, gen_seed, gen_out,
                     gen_report, gen_det);
    }
    if (check->parsed()) {
      return run_check_k(check_in, check_strategy, check_tol, check_report,
                         check_det);
    }
    if (jac->parsed()) {
      return run_jacobian(jac_in, jac_tol, jac_report, jac_det);
    }
    if (realize->parsed()) {
      return run_realize(realize_base, realize_target, realize_out,
                         realize_report, realize_trace, realize_flags,
                         realize_det);
    }
    if (fold->parsed()) {
      return run_fold(fold_in, fold_out, fold_report, fold_flags, fold_det);
    }
    if (gen_norm->parsed()) {
      return run_gen_norm(norm_kind, norm_dim, norm_p, norm_delta, norm_seed,
                          norm_out, norm_report, norm_det);
    }
    if (embed->parsed()) {
      return run_embed(embed_in, embed_oracle, embed_out, embed_report,
                       embed_flags, embed_max_outer, embed_cap,
                       embed_radius_trials, embed_det);
    }
    if (survey->parsed()) {
      return run_survey(survey_n, survey_dim, survey_p, survey_trials,
                        survey_seed, survey_dist, survey_jobs, survey_out,
                        survey_report, survey_det);
    }
    if (probe->parsed()) {
      return run_line_probe(probe_a, probe_b, probe_samples, probe_trace,
                            probe_report, probe_det);
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const FoldingError& e) {
    std::cerr << "folding failed: " << e.what() << " (best residual "
              << e.best_residual << ")\n";
    return kExitNoConvergence;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
