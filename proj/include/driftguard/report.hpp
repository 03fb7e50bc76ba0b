#pragma once

#include <string>

#include <json.hpp>

#include "driftguard/experiment.hpp"

namespace driftguard::report {

inline constexpr const char* kSchema = "driftguard/1";

/// Config JSON <-> ExperimentConfig. Parsing starts from the defaults and
/// overrides only the keys present; unknown keys and ill-typed values raise
/// ConfigError.
nlohmann::json config_to_json(const experiment::ExperimentConfig& cfg);
experiment::ExperimentConfig config_from_json(const nlohmann::json& j);
experiment::ExperimentConfig load_config(const std::string& path);

nlohmann::json to_json(const experiment::RunReport& r);
experiment::RunReport from_json(const nlohmann::json& j);

/// Pretty-printed report text; byte-identical for identical reports.
std::string dump(const experiment::RunReport& r);

/// Human-readable summary: AA as a percentage, AF as a fraction, events, costs.
std::string summary(const experiment::RunReport& r);

/// Accuracy matrix as CSV (`t,i,accuracy` rows) for plotting.
std::string accuracy_csv(const experiment::RunReport& r);

}  // namespace driftguard::report
