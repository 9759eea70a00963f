// io.hpp — JSON file formats for pre-bases, matrices and Hamiltonian families.
//
// Complex numbers are two-element arrays [re, im]. A pre-basis file:
//
//   { "d": 2, "n": 3,
//     "labels": ["x0", "y", "plus"],            // optional
//     "vectors": [ [[1,0],[0,0]], ... ] }        // n vectors of d complex entries
//
// A family file holds θ(λ) = H0 + λ H1 with matrices as row arrays:
//
//   { "H0": [[[1,0],[0,0]], [[0,0],[1,0]]],
//     "H1": [[[0,0],[1,1]], [[1,-1],[0,0]]],
//     "lambda_min": -5, "lambda_max": 5,         // optional, default ±infinity
//     "description": "..." }                     // optional

#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "genbasis/detect.hpp"
#include "genbasis/linalg.hpp"
#include "genbasis/mobius.hpp"
#include "json.hpp"

namespace genbasis::io {

using json = nlohmann::json;

// Malformed input; the message names the offending field.
class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

namespace detail {
[[noreturn]] inline void fail(const std::string& field, const std::string& why) {
    throw ParseError("field '" + field + "': " + why);
}

inline const json& require(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(where.empty() ? key : where + "." + key, "missing");
    return *it;
}

inline double number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(field, "not finite");
    return x;
}

inline double bound(const json& j, const std::string& field) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "-inf") return -inf;
        if (s == "inf" || s == "+inf") return inf;
    }
    return number(j, field);
}
}  // namespace detail

inline Complex complex_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2) detail::fail(field, "expected [re, im]");
    return {detail::number(j[0], field + "[0]"), detail::number(j[1], field + "[1]")};
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline CVector vector_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) detail::fail(field, "expected a non-empty array of [re, im]");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k)
        v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k], field + "[" + std::to_string(k) + "]");
    return v;
}

inline json vector_to_json(const CVector& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_to_json(v(k)));
    return out;
}

inline CMatrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) detail::fail(field, "expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    CMatrix m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::string rf = field + "[" + std::to_string(r) + "]";
        const CVector row = vector_from_json(j[static_cast<std::size_t>(r)], rf);
        if (row.size() != rows) detail::fail(rf, "row length differs from the number of rows");
        m.row(r) = row.transpose();
    }
    return m;
}

inline json matrix_to_json(const CMatrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
    return out;
}

inline json parse(std::istream& in, const std::string& source) {
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(source + ": " + e.what());
    }
}

inline json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse(in, path);
}

// ------------------------------- pre-basis file ------------------------------

struct PreBasisFile {
    std::vector<CVector> vectors;  // normalized on load
    std::vector<std::string> labels;
    std::vector<std::string> warnings;

    PreBasis prebasis() const { return PreBasis(vectors); }
};

inline PreBasisFile prebasis_from_json(const json& j) {
    PreBasisFile f;
    const double dd = detail::number(detail::require(j, "d", ""), "d");
    const double nd = detail::number(detail::require(j, "n", ""), "n");
    if (dd < 1 || dd != std::floor(dd)) detail::fail("d", "expected a positive integer");
    if (nd < 1 || nd != std::floor(nd)) detail::fail("n", "expected a positive integer");
    const auto d = static_cast<Eigen::Index>(dd);
    const auto n = static_cast<std::size_t>(nd);
    const json& vs = detail::require(j, "vectors", "");
    if (!vs.is_array() || vs.size() != n)
        detail::fail("vectors", "expected " + std::to_string(n) + " vectors");
    for (std::size_t k = 0; k < n; ++k) {
        const std::string field = "vectors[" + std::to_string(k) + "]";
        CVector v = vector_from_json(vs[k], field);
        if (v.size() != d) detail::fail(field, "expected " + std::to_string(d) + " entries");
        const double norm = v.norm();
        if (norm == 0.0) detail::fail(field, "zero vector");
        if (std::abs(norm - 1.0) > 1e-6) {
            std::ostringstream os;
            os << field << " has norm " << norm << "; normalized on load";
            f.warnings.push_back(os.str());
        }
        f.vectors.push_back(v / norm);
    }
    if (const auto it = j.find("labels"); it != j.end()) {
        if (!it->is_array() || it->size() != n) detail::fail("labels", "expected " + std::to_string(n) + " strings");
        for (std::size_t k = 0; k < n; ++k) {
            if (!(*it)[k].is_string()) detail::fail("labels[" + std::to_string(k) + "]", "expected a string");
            f.labels.push_back((*it)[k].get<std::string>());
        }
    }
    return f;
}

inline json prebasis_to_json(const std::vector<CVector>& vectors, const std::vector<std::string>& labels = {}) {
    json out;
    out["d"] = vectors.empty() ? 0 : vectors.front().size();
    out["n"] = vectors.size();
    json vs = json::array();
    for (const auto& v : vectors) vs.push_back(vector_to_json(v));
    out["vectors"] = vs;
    if (!labels.empty()) out["labels"] = labels;
    return out;
}

// --------------------------------- family file -------------------------------

inline AffineHamiltonianFamily family_from_json(const json& j) {
    CMatrix h0 = matrix_from_json(detail::require(j, "H0", ""), "H0");
    CMatrix h1 = matrix_from_json(detail::require(j, "H1", ""), "H1");
    const double lo = j.contains("lambda_min") ? detail::bound(j["lambda_min"], "lambda_min") : -inf;
    const double hi = j.contains("lambda_max") ? detail::bound(j["lambda_max"], "lambda_max") : inf;
    std::string description;
    if (j.contains("description")) {
        if (!j["description"].is_string()) detail::fail("description", "expected a string");
        description = j["description"].get<std::string>();
    }
    return AffineHamiltonianFamily(std::move(h0), std::move(h1), lo, hi, std::move(description));
}

inline json family_to_json(const AffineHamiltonianFamily& f) {
    json out;
    out["H0"] = matrix_to_json(f.h0());
    out["H1"] = matrix_to_json(f.h1());
    auto b = [](double x) -> json {
        if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
        return x;
    };
    out["lambda_min"] = b(f.lambda_min());
    out["lambda_max"] = b(f.lambda_max());
    out["description"] = f.description();
    return out;
}

}  // namespace genbasis::io
