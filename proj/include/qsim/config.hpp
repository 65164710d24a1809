#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace qsim::config {

/// Key schema entry: default value plus an optional domain check.
struct KeySpec {
    std::string default_value;
    enum class Type { string, integer, unsigned_integer, real, positive_real, boolean } type =
        Type::string;
    std::string description;
};

using KeyTable = std::map<std::string, KeySpec>;

/// A fully-resolved experiment configuration. Every run is determined by
/// (experiment, values, seed); re-running reproduces artifacts byte for byte
/// at thread count 1.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> values;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    int threads = 1;

    const std::string& raw(const std::string& key) const;
    long long integer(const std::string& key) const;
    double real(const std::string& key) const;
    bool boolean(const std::string& key) const;
};

/// Parses the line-oriented "key = value" format with optional [section]
/// headers (keys inside a section become "section.key") and '#' comments.
/// Duplicate keys and malformed lines are reported with line numbers.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

/// Fills defaults from the key table, rejects unknown keys, checks domains.
ExperimentConfig validate_config(const std::string& experiment,
                                 const std::map<std::string, std::string>& raw,
                                 const KeyTable& table);

} // namespace qsim::config
