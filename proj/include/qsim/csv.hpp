#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qsim::csv {

using Cell = std::variant<std::string, double, long long, unsigned long long>;

/// Minimal RFC-4180-style writer; doubles are printed with %.17g so files
/// round-trip and byte-compare across runs.
class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open CSV output: " + path);
    }

    void header(const std::vector<std::string>& columns) {
        columns_ = columns.size();
        write_row(std::vector<Cell>(columns.begin(), columns.end()));
    }

    void row(const std::vector<Cell>& cells) {
        if (columns_ && cells.size() != columns_)
            throw std::logic_error("CSV row width does not match header");
        write_row(cells);
    }

    static std::string format(const Cell& cell) {
        char buf[64];
        if (std::holds_alternative<double>(cell)) {
            std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(cell));
            return buf;
        }
        if (std::holds_alternative<long long>(cell)) {
            std::snprintf(buf, sizeof buf, "%lld", std::get<long long>(cell));
            return buf;
        }
        if (std::holds_alternative<unsigned long long>(cell)) {
            std::snprintf(buf, sizeof buf, "%llu", std::get<unsigned long long>(cell));
            return buf;
        }
        return quote(std::get<std::string>(cell));
    }

private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        q += '"';
        return q;
    }

    void write_row(const std::vector<Cell>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << format(cells[i]);
        }
        out_ << '\n';
    }

    std::ofstream out_;
    std::size_t columns_ = 0;
};

} // namespace qsim::csv
