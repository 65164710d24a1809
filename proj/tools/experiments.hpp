#pragma once

#include "qsim/config.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace qsim::experiments {

using Json = nlohmann::ordered_json;

struct RunResult {
    bool ok = false;
    Json summary;
};

/// Known experiments and their config-key schemas.
const std::map<std::string, config::KeyTable>& experiment_tables();
std::vector<std::string> experiment_names();

/// Runs one experiment: writes results.csv, summary.json and provenance.json
/// into cfg.out_dir and returns the summary with its overall pass flag.
RunResult run_experiment(const config::ExperimentConfig& cfg);

/// Parses + validates a config file (or empty defaults) for an experiment.
config::ExperimentConfig make_config(const std::string& experiment,
                                     const std::map<std::string, std::string>& raw,
                                     std::uint64_t seed,
                                     const std::filesystem::path& out_dir, int threads);

} // namespace qsim::experiments
