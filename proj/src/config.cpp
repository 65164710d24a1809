#include "qsim/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsim::config {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail_line(int line_no, std::size_t column, const std::string& why) {
    throw std::runtime_error("config line " + std::to_string(line_no) + ", column " +
                             std::to_string(column + 1) + ": " + why);
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail_line(line_no, line.find('['), "unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) fail_line(line_no, line.find('['), "empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail_line(line_no, 0, "expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) fail_line(line_no, 0, "empty key");
        if (!section.empty()) key = section + "." + key;
        if (out.count(key)) fail_line(line_no, 0, "duplicate key '" + key + "'");
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

void check_domain(const std::string& key, const std::string& value, KeySpec::Type type) {
    auto bad = [&](const std::string& why) {
        throw std::runtime_error("config key '" + key + "': " + why + " (got '" + value + "')");
    };
    std::size_t pos = 0;
    try {
        switch (type) {
            case KeySpec::Type::string:
                break;
            case KeySpec::Type::integer:
                (void)std::stoll(value, &pos);
                if (pos != value.size()) bad("expected an integer");
                break;
            case KeySpec::Type::unsigned_integer: {
                const long long v = std::stoll(value, &pos);
                if (pos != value.size() || v < 0) bad("expected a nonnegative integer");
                break;
            }
            case KeySpec::Type::real:
                (void)std::stod(value, &pos);
                if (pos != value.size()) bad("expected a real number");
                break;
            case KeySpec::Type::positive_real: {
                const double v = std::stod(value, &pos);
                if (pos != value.size() || !(v > 0.0)) bad("expected a positive real number");
                break;
            }
            case KeySpec::Type::boolean:
                if (value != "true" && value != "false") bad("expected true or false");
                break;
        }
    } catch (const std::invalid_argument&) {
        bad("unparseable value");
    } catch (const std::out_of_range&) {
        bad("value out of range");
    }
}

} // namespace

ExperimentConfig validate_config(const std::string& experiment,
                                 const std::map<std::string, std::string>& raw,
                                 const KeyTable& table) {
    std::string unknown;
    for (const auto& [key, value] : raw) {
        if (!table.count(key)) {
            if (!unknown.empty()) unknown += ", ";
            unknown += key;
        }
    }
    if (!unknown.empty())
        throw std::runtime_error("unknown config key(s) for experiment '" + experiment +
                                 "': " + unknown);
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    for (const auto& [key, spec] : table) {
        const auto it = raw.find(key);
        const std::string value = it == raw.end() ? spec.default_value : it->second;
        check_domain(key, value, spec.type);
        cfg.values[key] = value;
    }
    return cfg;
}

const std::string& ExperimentConfig::raw(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end())
        throw std::runtime_error("config key not declared for this experiment: " + key);
    return it->second;
}

long long ExperimentConfig::integer(const std::string& key) const {
    return std::stoll(raw(key));
}

double ExperimentConfig::real(const std::string& key) const {
    return std::stod(raw(key));
}

bool ExperimentConfig::boolean(const std::string& key) const {
    return raw(key) == "true";
}

} // namespace qsim::config
