#include "lpembed/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lpembed {

namespace {

double require_number(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number()) {
    throw PreconditionError(std::string("missing or non-numeric field '") +
                            field + "'");
  }
  return j[field].get<double>();
}

}  // namespace

json configuration_to_json(const Configuration& config) {
  json j;
  j["p"] = static_cast<double>(config.p);
  json pts = json::array();
  for (int i = 0; i < config.n(); ++i) {
    json row = json::array();
    for (int k = 0; k < config.dim(); ++k) row.push_back(config.points(i, k));
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  return j;
}

Configuration configuration_from_json(const json& j) {
  const double p = require_number(j, "p");
  if (!j.contains("points") || !j["points"].is_array() || j["points"].empty()) {
    throw PreconditionError("missing or empty field 'points'");
  }
  const auto& pts = j["points"];
  const size_t n = pts.size();
  if (!pts[0].is_array() || pts[0].empty()) {
    throw PreconditionError("'points' must hold arrays of numbers");
  }
  const size_t dim = pts[0].size();
  Eigen::MatrixXd m(n, dim);
  for (size_t i = 0; i < n; ++i) {
    if (!pts[i].is_array() || pts[i].size() != dim) {
      throw PreconditionError("point " + std::to_string(i + 1) +
                              " has inconsistent dimension");
    }
    for (size_t k = 0; k < dim; ++k) {
      if (!pts[i][k].is_number()) {
        throw PreconditionError("point " + std::to_string(i + 1) +
                                " coordinate " + std::to_string(k + 1) +
                                " is not a number");
      }
      m(i, k) = pts[i][k].get<double>();
    }
  }
  Configuration config{PExponent(p), std::move(m)};
  config.validate();
  return config;
}

json distance_matrix_to_json(const UpperTriangularMatrix& u) {
  json j;
  j["n"] = u.n();
  j["kind"] = u.kind() == EntryKind::PthPower ? "pth_power" : "raw";
  j["entries"] = u.entries();
  return j;
}

UpperTriangularMatrix distance_matrix_from_json(const json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw PreconditionError("missing integer field 'n'");
  }
  const int n = j["n"].get<int>();
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw PreconditionError("missing string field 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind != "pth_power" && kind != "raw") {
    throw PreconditionError("'kind' must be \"pth_power\" or \"raw\"");
  }
  UpperTriangularMatrix u(
      n, kind == "pth_power" ? EntryKind::PthPower : EntryKind::Raw);
  if (!j.contains("entries") || !j["entries"].is_array() ||
      static_cast<int>(j["entries"].size()) != u.size()) {
    throw PreconditionError("'entries' must hold exactly n(n-1)/2 numbers");
  }
  for (int idx = 0; idx < u.size(); ++idx) {
    if (!j["entries"][idx].is_number()) {
      throw PreconditionError("entry " + std::to_string(idx + 1) +
                              " is not a number");
    }
    u[idx] = j["entries"][idx].get<double>();
  }
  u.validate();
  return u;
}

json norm_oracle_to_json(const NormOracle& oracle) {
  json j;
  j["N"] = oracle.dim();
  j["p"] = oracle.p();
  j["delta"] = oracle.delta();
  switch (oracle.kind()) {
    case OracleKind::LpExact:
      j["kind"] = "lp_exact";
      break;
    case OracleKind::WeightedP:
      j["kind"] = "weighted_p";
      j["weights"] = oracle.weights();
      break;
    case OracleKind::LinearDistortion: {
      j["kind"] = "linear_distortion";
      json rows = json::array();
      for (int i = 0; i < oracle.dim(); ++i) {
        json row = json::array();
        for (int k = 0; k < oracle.dim(); ++k) {
          row.push_back(oracle.matrix()(i, k));
        }
        rows.push_back(std::move(row));
      }
      j["matrix"] = std::move(rows);
      break;
    }
  }
  return j;
}

NormOracle norm_oracle_from_json(const json& j) {
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw PreconditionError("missing string field 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (!j.contains("N") || !j["N"].is_number_integer()) {
    throw PreconditionError("missing integer field 'N'");
  }
  const int dim = j["N"].get<int>();
  const PExponent p(require_number(j, "p"));
  const double delta = require_number(j, "delta");
  if (kind == "lp_exact") {
    return NormOracle::lp_exact(dim, p);
  }
  if (kind == "weighted_p") {
    if (!j.contains("weights") || !j["weights"].is_array()) {
      throw PreconditionError("weighted_p oracle needs a 'weights' array");
    }
    std::vector<double> w = j["weights"].get<std::vector<double>>();
    return NormOracle::weighted_p(dim, p, std::move(w), delta);
  }
  if (kind == "linear_distortion") {
    if (!j.contains("matrix") || !j["matrix"].is_array() ||
        static_cast<int>(j["matrix"].size()) != dim) {
      throw PreconditionError("linear_distortion oracle needs a dim x dim "
                              "'matrix'");
    }
    Eigen::MatrixXd t(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(j["matrix"][i].size()) != dim) {
        throw PreconditionError("'matrix' row " + std::to_string(i + 1) +
                                " has wrong length");
      }
      for (int k = 0; k < dim; ++k) t(i, k) = j["matrix"][i][k].get<double>();
    }
    return NormOracle::linear_distortion_prescaled(dim, p, std::move(t), delta);
  }
  throw PreconditionError("unknown oracle kind '" + kind + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw PreconditionError("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

namespace {

json parse_file(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

}  // namespace

Configuration load_configuration(const std::string& path) {
  try {
    return configuration_from_json(parse_file(path));
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

void save_configuration(const Configuration& config, const std::string& path) {
  write_text_atomic(path, configuration_to_json(config).dump(2) + "\n");
}

UpperTriangularMatrix load_distance_matrix(const std::string& path) {
  try {
    return distance_matrix_from_json(parse_file(path));
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

void save_distance_matrix(const UpperTriangularMatrix& u,
                          const std::string& path) {
  write_text_atomic(path, distance_matrix_to_json(u).dump(2) + "\n");
}

NormOracle load_norm_oracle(const std::string& path) {
  try {
    return norm_oracle_from_json(parse_file(path));
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

void save_norm_oracle(const NormOracle& oracle, const std::string& path) {
  write_text_atomic(path, norm_oracle_to_json(oracle).dump(2) + "\n");
}

std::string digest(const json& j) {
  const std::string s = j.dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string survey_csv(const std::vector<SurveyCell>& table) {
  std::ostringstream os;
  os << "n,N,p,trials,frequency\n";
  for (const SurveyCell& cell : table) {
    os << cell.n << ',' << cell.dim << ',' << format_double(cell.p) << ','
       << cell.trials << ',' << format_double(cell.frequency) << '\n';
  }
  return os.str();
}

std::string line_probe_csv(const LineProbeResult& result) {
  std::ostringstream os;
  os << "t,g\n";
  for (size_t s = 0; s < result.grid_t.size(); ++s) {
    os << format_double(result.grid_t[s]) << ','
       << format_double(result.grid_g[s]) << '\n';
  }
  return os.str();
}

std::string trace_csv(const std::vector<TracePoint>& trace) {
  std::ostringstream os;
  os << "iteration,residual\n";
  for (const TracePoint& row : trace) {
    os << row.iteration << ',' << format_double(row.residual) << '\n';
  }
  return os.str();
}

std::string density_csv(const DensityReport& report) {
  std::ostringstream os;
  os << "trial,full_rank,smallest_retained\n";
  for (size_t t = 0; t < report.full_rank.size(); ++t) {
    os << t << ',' << static_cast<int>(report.full_rank[t]) << ','
       << format_double(report.smallest_retained[t]) << '\n';
  }
  return os.str();
}

}  // namespace lpembed
