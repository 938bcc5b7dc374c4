#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxitive/distribution.hpp"
#include "maxitive/errors.hpp"
#include "maxitive/grid.hpp"
#include "maxitive/profile.hpp"
#include "maxitive/pushforward.hpp"
#include "maxitive/semiring.hpp"
#include "maxitive/tropical.hpp"

namespace maxitive::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// primitives

/// Shortest representation that round-trips a double (17 significant digits).
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw io_error("failed reading '" + path + "'");
    return os.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw io_error("failed writing '" + path + "'");
}

inline json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw parse_error("malformed JSON in " + what);
    return j;
}

inline json load_json(const std::string& path) {
    return parse_json(read_file(path), path);
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// costs use the string "inf" for infinity (JSON has no literal for it)
inline double number_or_inf(const json& j, const std::string& what) {
    if (j.is_number()) {
        const double v = j.get<double>();
        return v;
    }
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "Infinity") return infinite_cost;
    }
    throw parse_error("expected a number or \"inf\" in " + what);
}

inline json json_cost(double v) {
    if (std::isinf(v)) return json("inf");
    return json(v);
}

// ---------------------------------------------------------------------------
// distributions

inline DiscreteDistribution discrete_from_json(const json& j) {
    if (!j.is_object() || !j.contains("mode") || !j.contains("weights"))
        throw parse_error("distribution document needs 'mode' and 'weights'");
    if (!j["mode"].is_string())
        throw parse_error("'mode' must be a string");
    const Mode mode = mode_from_name(j["mode"].get<std::string>());
    if (!j["weights"].is_object() || j["weights"].empty())
        throw parse_error("'weights' must be a non-empty object");
    std::vector<std::string> labels;
    std::vector<double> weights;
    for (const auto& [label, value] : j["weights"].items()) {
        if (!value.is_number())
            throw parse_error("weight of '" + label + "' must be a number");
        labels.push_back(label);
        weights.push_back(value.get<double>());
    }
    // infer the normalized flag from the document
    double total = 0.0, peak = 0.0;
    for (double w : weights) {
        total += w;
        peak = std::max(peak, w);
    }
    const bool normalized = mode == Mode::maxitive
                                ? std::abs(peak - 1.0) <= normalization_tolerance
                                : std::abs(total - 1.0) <= normalization_tolerance;
    return DiscreteDistribution(std::move(labels), std::move(weights), mode,
                                normalized);
}

inline json discrete_to_json(const DiscreteDistribution& dist) {
    json weights = json::object();
    for (std::size_t i = 0; i < dist.size(); ++i)
        weights[dist.labels()[i]] = dist.weights()[i];
    return json{{"mode", mode_name(dist.mode())}, {"weights", std::move(weights)}};
}

inline GridAxis axis_from_json(const json& j) {
    if (!j.is_object() || !j.contains("lower") || !j.contains("upper") ||
        !j.contains("points"))
        throw parse_error("grid axis needs 'lower', 'upper' and 'points'");
    if (!j["lower"].is_number() || !j["upper"].is_number() ||
        !j["points"].is_number_integer())
        throw parse_error("grid axis fields have wrong types");
    return GridAxis{j["lower"].get<double>(), j["upper"].get<double>(),
                    j["points"].get<int>()};
}

inline GridDensity grid_from_json(const json& j) {
    if (!j.is_object() || !j.contains("mode") || !j.contains("axes") ||
        !j.contains("values"))
        throw parse_error("grid document needs 'mode', 'axes' and 'values'");
    const Mode mode = mode_from_name(j["mode"].get<std::string>());
    if (!j["axes"].is_array() || j["axes"].empty())
        throw parse_error("'axes' must be a non-empty array");
    std::vector<GridAxis> axes;
    for (const auto& a : j["axes"]) axes.push_back(axis_from_json(a));
    if (!j["values"].is_array()) throw parse_error("'values' must be an array");
    std::vector<double> values;
    for (const auto& v : j["values"]) {
        if (!v.is_number()) throw parse_error("grid values must be numbers");
        values.push_back(v.get<double>());
    }
    double total = 0.0, peak = 0.0;
    for (double v : values) peak = std::max(peak, v);
    GridDensity g(std::move(axes), std::move(values), mode);
    if (mode == Mode::maxitive) {
        g.normalized = std::abs(peak - 1.0) <= normalization_tolerance;
    } else {
        total = total_mass(g);
        g.normalized = std::abs(total - 1.0) <= normalization_tolerance;
    }
    return g;
}

inline json grid_to_json(const GridDensity& g) {
    json axes = json::array();
    for (const auto& a : g.axes)
        axes.push_back(json{{"lower", a.lower}, {"upper", a.upper}, {"points", a.points}});
    return json{{"mode", mode_name(g.mode)},
                {"axes", std::move(axes)},
                {"values", g.values}};
}

// ---------------------------------------------------------------------------
// transforms

inline TransformSpec transform_from_json(const json& j) {
    if (j.is_object() && j.contains("relabel")) {
        if (!j["relabel"].is_object())
            throw parse_error("'relabel' must be an object of label mappings");
        Relabel r;
        for (const auto& [src, dst] : j["relabel"].items()) {
            if (!dst.is_string())
                throw parse_error("relabel target of '" + src + "' must be a string");
            r.map[src] = dst.get<std::string>();
        }
        return r;
    }
    if (j.is_object() && j.contains("project")) {
        if (!j["project"].is_array())
            throw parse_error("'project' must be an array of axis indices");
        Projection p;
        for (const auto& a : j["project"]) {
            if (!a.is_number_integer())
                throw parse_error("projection axes must be integers");
            p.axes.push_back(a.get<int>());
        }
        return p;
    }
    throw parse_error("transform document needs 'relabel' or 'project'");
}

// ---------------------------------------------------------------------------
// cost measures / tropical matrices

inline CostMeasure costs_from_json(const json& j) {
    if (!j.is_object() || !j.contains("costs") || !j["costs"].is_object() ||
        j["costs"].empty())
        throw parse_error("cost document needs a non-empty 'costs' object");
    std::vector<std::string> labels;
    std::vector<double> costs;
    for (const auto& [label, value] : j["costs"].items()) {
        labels.push_back(label);
        costs.push_back(number_or_inf(value, "cost of '" + label + "'"));
    }
    double lo = infinite_cost;
    for (double c : costs) lo = std::min(lo, c);
    return CostMeasure::over_labels(std::move(labels), std::move(costs), lo == 0.0);
}

inline json costs_to_json(const CostMeasure& cm) {
    if (!cm.discrete())
        throw validation_error("grid cost measures have no JSON document form");
    json costs = json::object();
    for (std::size_t i = 0; i < cm.labels.size(); ++i)
        costs[cm.labels[i]] = json_cost(cm.costs[i]);
    return json{{"costs", std::move(costs)}};
}

inline TropicalMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("matrix") || !j["matrix"].is_array() ||
        j["matrix"].empty())
        throw parse_error("matrix document needs a non-empty 'matrix' array");
    const auto& rows = j["matrix"];
    const std::size_t r = rows.size();
    std::size_t c = 0;
    std::vector<double> entries;
    for (std::size_t i = 0; i < r; ++i) {
        if (!rows[i].is_array()) throw parse_error("matrix rows must be arrays");
        if (i == 0)
            c = rows[i].size();
        else if (rows[i].size() != c)
            throw parse_error("matrix rows have unequal lengths");
        for (const auto& v : rows[i])
            entries.push_back(number_or_inf(v, "matrix entry"));
    }
    return TropicalMatrix(r, c, std::move(entries));
}

inline json matrix_to_json(const TropicalMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols; ++k) row.push_back(json_cost(m.at(i, k)));
        rows.push_back(std::move(row));
    }
    return json{{"matrix", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string discrete_to_csv(const DiscreteDistribution& dist) {
    std::string out = "label,weight\n";
    for (std::size_t i = 0; i < dist.size(); ++i)
        out += dist.labels()[i] + "," + format_double(dist.weights()[i]) + "\n";
    return out;
}

inline std::string curve_to_csv(const ProfileCurve& curve) {
    std::size_t dim = 0;
    for (const auto& p : curve.argmax_points) dim = std::max(dim, p.size());
    std::string out = "t,log_profile";
    for (std::size_t d = 0; d < dim; ++d)
        out += ",theta_" + std::to_string(d + 1);
    out += "\n";
    for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
        out += format_double(curve.t_grid[i]) + "," +
               format_double(curve.log_values[i]);
        for (std::size_t d = 0; d < dim; ++d)
            out += "," + (d < curve.argmax_points[i].size()
                              ? format_double(curve.argmax_points[i][d])
                              : std::string("nan"));
        out += "\n";
    }
    return out;
}

inline json curve_to_json(const ProfileCurve& curve) {
    return json{{"t", curve.t_grid},
                {"log_profile", curve.log_values},
                {"argmax", curve.argmax_points},
                {"peak_log", curve.peak_log},
                {"start_spread", curve.start_spread}};
}

// ---------------------------------------------------------------------------
// run manifest

struct ManifestInput {
    std::string path;
    std::string contents;
};

/// Deterministic record of a run: inputs (FNV-1a hashes), seed, options,
/// versions. Written alongside outputs as run_manifest.json.
inline json make_manifest(const std::string& subcommand,
                          const std::vector<ManifestInput>& inputs,
                          std::uint64_t seed, const json& options,
                          const std::vector<std::string>& outputs) {
    json in = json::array();
    for (const auto& i : inputs) {
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(i.contents)));
        in.push_back(json{{"path", i.path},
                          {"fnv1a64", hex},
                          {"bytes", i.contents.size()}});
    }
    json out = json::array();
    for (const auto& o : outputs) out.push_back(o);
    return json{{"tool", "maxitive"},
                {"version", "0.1.0"},
                {"subcommand", subcommand},
                {"seed", seed},
                {"options", options},
                {"inputs", std::move(in)},
                {"outputs", std::move(out)}};
}

}  // namespace maxitive::io
