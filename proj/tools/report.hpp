// Tabular output for the CLI in three formats. Tables keep raw doubles so JSON can
// carry full precision while table/CSV round to the requested digits.

#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "genbasis/linalg.hpp"
#include "json.hpp"

namespace cli {

using genbasis::Complex;

// monostate prints as n/a (JSON null)
using Cell = std::variant<std::monostate, std::string, long long, double, Complex>;

struct Section {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    Section& row(std::vector<Cell> r) {
        rows.push_back(std::move(r));
        return *this;
    }
};

enum class Format { Table, Csv, Json };

struct Report {
    std::vector<Section> sections;
    std::vector<std::string> notes;

    Section& add(std::string name, std::vector<std::string> columns) {
        sections.push_back({std::move(name), std::move(columns), {}});
        return sections.back();
    }

    // two-column key/value section
    Section& keys(std::string name) { return add(std::move(name), {"key", "value"}); }
};

inline std::string fixed(double x, int precision) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << x;
    std::string s = os.str();
    // no "-0.000"
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

inline std::string text(const Cell& c, int precision) {
    struct V {
        int p;
        std::string operator()(std::monostate) const { return "n/a"; }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(double v) const { return fixed(v, p); }
        std::string operator()(Complex z) const {
            std::string im = fixed(std::abs(z.imag()), p);
            const bool neg = z.imag() < 0 && im.find_first_not_of("0.") != std::string::npos;
            return fixed(z.real(), p) + (neg ? "-" : "+") + im + "i";
        }
    };
    return std::visit(V{precision}, c);
}

inline nlohmann::json to_json(const Cell& c) {
    struct V {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(const std::string& s) const { return s; }
        nlohmann::json operator()(long long v) const { return v; }
        nlohmann::json operator()(double v) const {
            if (std::isnan(v)) return nullptr;
            if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
            return v;
        }
        nlohmann::json operator()(Complex z) const { return nlohmann::json::array({z.real(), z.imag()}); }
    };
    return std::visit(V{}, c);
}

inline std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline void emit(const Report& r, Format f, int precision, std::ostream& out) {
    if (f == Format::Json) {
        nlohmann::json j;
        j["sections"] = nlohmann::json::array();
        for (const auto& s : r.sections) {
            nlohmann::json js;
            js["name"] = s.name;
            js["columns"] = s.columns;
            js["rows"] = nlohmann::json::array();
            for (const auto& row : s.rows) {
                nlohmann::json jr = nlohmann::json::array();
                for (const auto& c : row) jr.push_back(to_json(c));
                js["rows"].push_back(jr);
            }
            j["sections"].push_back(js);
        }
        j["notes"] = r.notes;
        out << j.dump(2) << "\n";
        return;
    }
    if (f == Format::Csv) {
        for (const auto& s : r.sections) {
            out << "# " << s.name << "\n";
            for (std::size_t k = 0; k < s.columns.size(); ++k) out << (k ? "," : "") << csv_field(s.columns[k]);
            out << "\n";
            for (const auto& row : s.rows) {
                for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_field(text(row[k], precision));
                out << "\n";
            }
        }
        for (const auto& n : r.notes) out << "# note: " << n << "\n";
        return;
    }
    bool first = true;
    for (const auto& s : r.sections) {
        if (!first) out << "\n";
        first = false;
        out << s.name << "\n";
        std::vector<std::vector<std::string>> cells;
        cells.push_back(s.columns);
        for (const auto& row : s.rows) {
            std::vector<std::string> t;
            for (const auto& c : row) t.push_back(text(c, precision));
            cells.push_back(std::move(t));
        }
        std::vector<std::size_t> width(s.columns.size(), 0);
        for (const auto& row : cells)
            for (std::size_t k = 0; k < row.size() && k < width.size(); ++k) width[k] = std::max(width[k], row[k].size());
        for (const auto& row : cells) {
            out << " ";
            for (std::size_t k = 0; k < row.size(); ++k) {
                out << " " << row[k];
                if (k + 1 < row.size()) out << std::string(width[k] - row[k].size(), ' ');
            }
            out << "\n";
        }
    }
    for (const auto& n : r.notes) out << "note: " << n << "\n";
}

}  // namespace cli
