#pragma once

// Typed tabular output shared by every CLI command: CSV with fixed
// scientific formatting and JSON with a meta block, both byte-reproducible.

#include "version.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace stochamp {

struct Cell {
    enum class Kind { real, integer, boolean, text };
    Kind kind = Kind::real;
    double number = 0.0;
    std::string string;

    static Cell real(double v) { return {Kind::real, v, {}}; }
    static Cell integer(long long v) { return {Kind::integer, static_cast<double>(v), {}}; }
    static Cell boolean(bool v) { return {Kind::boolean, v ? 1.0 : 0.0, {}}; }
    static Cell text(std::string v) { return {Kind::text, 0.0, std::move(v)}; }
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    explicit Table(std::vector<std::string> names) : columns(std::move(names)) {}

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw std::invalid_argument("Table: row width mismatch");
        rows.push_back(std::move(row));
    }
};

inline std::string format_scientific(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

inline void write_csv_text(const std::string& s, std::ostream& os) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        os << s;
        return;
    }
    os << '"';
    for (const char c : s) {
        if (c == '"') os << '"';
        os << c;
    }
    os << '"';
}

inline void write_csv(const Table& table, std::ostream& os) {
    for (size_t i = 0; i < table.columns.size(); ++i) {
        if (i) os << ',';
        write_csv_text(table.columns[i], os);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            switch (row[i].kind) {
                case Cell::Kind::real: os << format_scientific(row[i].number); break;
                case Cell::Kind::integer: os << static_cast<long long>(row[i].number); break;
                case Cell::Kind::boolean: os << (row[i].number != 0.0 ? 1 : 0); break;
                case Cell::Kind::text: write_csv_text(row[i].string, os); break;
            }
        }
        os << '\n';
    }
}

inline void write_json(const Table& table, const nlohmann::ordered_json& meta, std::ostream& os) {
    nlohmann::ordered_json doc;
    doc["meta"] = meta;
    doc["meta"]["version"] = kVersion;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (size_t i = 0; i < row.size(); ++i) {
            const std::string& name = table.columns[i];
            switch (row[i].kind) {
                case Cell::Kind::real:
                    if (std::isnan(row[i].number)) obj[name] = nullptr;
                    else obj[name] = row[i].number;
                    break;
                case Cell::Kind::integer: obj[name] = static_cast<long long>(row[i].number); break;
                case Cell::Kind::boolean: obj[name] = row[i].number != 0.0; break;
                case Cell::Kind::text: obj[name] = row[i].string; break;
            }
        }
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
}

}  // namespace stochamp
