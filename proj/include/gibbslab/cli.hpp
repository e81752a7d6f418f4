// Batch front end: config-driven experiment runner, oracle dumps, sampler
// dumps, and the verification suites. Exit codes: 0 success, 1 usage or
// validation error, 2 tolerance failure.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace gibbslab {

int run_cli(const std::vector<std::string>& args);

// Parses and validates an experiment config; unknown keys are rejected.
nlohmann::json load_config(const std::string& path, const std::vector<std::string>& overrides);
nlohmann::json validate_config(nlohmann::json cfg);

// Executes a validated config and returns the result record (with the
// resolved config, hashes, and version embedded). Curve CSVs are attached
// under "csv" so callers can write them out.
nlohmann::json run_experiment_config(const nlohmann::json& cfg);

// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

std::uint64_t config_hash(const nlohmann::json& cfg);

}  // namespace gibbslab
