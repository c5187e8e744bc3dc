#pragma once

#include "jch/observables.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// Plot-ready CSV/JSON emission and spectrum CSV ingestion. All numeric
// formatting goes through format_double so reruns are byte-identical.

namespace jch {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Tabular result with provenance metadata (config hash, seed).
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_row(std::vector<double> row) {
        if (row.size() != columns.size())
            throw std::runtime_error("Table: row width != column count");
        rows.push_back(std::move(row));
    }
};

inline void write_csv(const Table& table, std::ostream& out) {
    for (const auto& [k, v] : table.metadata) out << "# " << k << " = " << v << "\n";
    for (size_t i = 0; i < table.columns.size(); ++i)
        out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

inline void write_json(const Table& table, std::ostream& out) {
    out << "{\n  \"metadata\": {";
    for (size_t i = 0; i < table.metadata.size(); ++i)
        out << (i ? ", " : "") << "\"" << table.metadata[i].first << "\": \""
            << table.metadata[i].second << "\"";
    out << "},\n  \"columns\": [";
    for (size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? ", " : "") << "\"" << table.columns[i] << "\"";
    out << "],\n  \"rows\": [\n";
    for (size_t r = 0; r < table.rows.size(); ++r) {
        out << "    [";
        for (size_t i = 0; i < table.rows[r].size(); ++i)
            out << (i ? ", " : "") << format_double(table.rows[r][i]);
        out << "]" << (r + 1 < table.rows.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
}

inline void write_table(const Table& table, const std::string& path,
                        const std::string& format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (format == "csv")
        write_csv(table, out);
    else if (format == "json")
        write_json(table, out);
    else
        throw std::runtime_error("unknown output format: " + format);
}

/// Reads a spectrum CSV with header `detuning_khz,population`; `#` lines and
/// blank lines are skipped.
inline SpectrumData read_spectrum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spectrum file: " + path);
    SpectrumData data;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            std::string h = line;
            h.erase(std::remove_if(h.begin(), h.end(),
                                   [](char c) { return c == ' ' || c == '\r'; }),
                    h.end());
            if (h != "detuning_khz,population")
                throw std::runtime_error(path +
                                         ": expected header detuning_khz,population");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed row");
        data.detuning.push_back(khz_to_rad(std::stod(a)));
        data.population.push_back(std::stod(b));
    }
    if (data.detuning.empty())
        throw std::runtime_error(path + ": no data rows");
    return data;
}

}  // namespace jch
