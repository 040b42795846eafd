#pragma once

#include "lpembed/embedding.hpp"
#include "lpembed/experiments.hpp"
#include "lpembed/realization.hpp"
#include "lpembed/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace lpembed {

using json = nlohmann::json;

// Text formats. Doubles are emitted with shortest round-trip precision, so a
// save/load cycle reproduces every value bitwise.

json configuration_to_json(const Configuration& config);
Configuration configuration_from_json(const json& j);

json distance_matrix_to_json(const UpperTriangularMatrix& u);
UpperTriangularMatrix distance_matrix_from_json(const json& j);

json norm_oracle_to_json(const NormOracle& oracle);
NormOracle norm_oracle_from_json(const json& j);

Configuration load_configuration(const std::string& path);
void save_configuration(const Configuration& config, const std::string& path);

UpperTriangularMatrix load_distance_matrix(const std::string& path);
void save_distance_matrix(const UpperTriangularMatrix& u,
                          const std::string& path);

NormOracle load_norm_oracle(const std::string& path);
void save_norm_oracle(const NormOracle& oracle, const std::string& path);

// FNV-1a over the canonical serialization, as a hex string.
std::string digest(const json& j);

// Writes through a temp file in the same directory, then renames.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// CSV emission. Numbers use %.17g so replays are byte-identical.
std::string survey_csv(const std::vector<SurveyCell>& table);
std::string line_probe_csv(const LineProbeResult& result);
std::string trace_csv(const std::vector<TracePoint>& trace);
std::string density_csv(const DensityReport& report);
std::string format_double(double v);

}  // namespace lpembed
