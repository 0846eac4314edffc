#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emcert/certify.hpp"
#include "emcert/corpus.hpp"
#include "emcert/errors.hpp"
#include "emcert/verdict.hpp"
#include "emcert/witness.hpp"

namespace emcert {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void field_error(const std::string& what, const std::string& expected) {
    throw InputError(what + ": expected " + expected);
}

inline const Json& require_field(const Json& j, const char* name, const std::string& where) {
    if (!j.is_object()) field_error(where, "an object");
    const auto it = j.find(name);
    if (it == j.end()) throw InputError(where + ": missing field \"" + std::string(name) + "\"");
    return *it;
}

inline double json_number(const Json& j, const std::string& what) {
    if (!j.is_number()) field_error(what, "a number");
    return j.get<double>();
}

inline int json_int(const Json& j, const std::string& what) {
    if (!j.is_number_integer()) field_error(what, "an integer");
    return j.get<int>();
}

inline bool json_bool(const Json& j, const std::string& what) {
    if (!j.is_boolean()) field_error(what, "a boolean");
    return j.get<bool>();
}

inline std::string json_string(const Json& j, const std::string& what) {
    if (!j.is_string()) field_error(what, "a string");
    return j.get<std::string>();
}

inline Vector json_vector(const Json& j, const std::string& what) {
    if (!j.is_array()) field_error(what, "an array of numbers");
    Vector v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(json_number(j[i], what + "[" + std::to_string(i) + "]"));
    return v;
}

inline PointList json_points(const Json& j, const std::string& what) {
    if (!j.is_array()) field_error(what, "an array of points");
    PointList pts;
    pts.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        pts.push_back(json_vector(j[i], what + "[" + std::to_string(i) + "]"));
    return pts;
}

}  // namespace detail

// A problem document: the candidate plus where to sample it. Table
// candidates carry their grid inline, closed forms take lattice levels or
// explicit points; "target" is only consulted by envelope-style queries.
struct ProblemInput {
    CandidateFunction candidate;
    std::optional<Vector> levels;
    std::optional<PointList> points;
    std::optional<Vector> target;
};

inline ProblemInput parse_problem(const Json& j) {
    using detail::require_field;

    ProblemInput p;
    const std::string kind =
        detail::json_string(require_field(j, "kind", "input"), "input.kind");
    const int K = detail::json_int(require_field(j, "K", "input"), "input.K");
    if (K < 1) throw InputError("input.K: must be >= 1");

    const Json params = j.contains("params") ? j.at("params") : Json::object();
    if (!params.is_object()) detail::field_error("input.params", "an object");
    const Json grid = j.contains("grid") ? j.at("grid") : Json::object();
    if (!grid.is_object()) detail::field_error("input.grid", "an object");

    if (kind == "affine") {
        auto w = detail::json_vector(require_field(params, "weights", "input.params"),
                                     "input.params.weights");
        if (static_cast<int>(w.size()) != K)
            throw InputError("input.params.weights: expected " + std::to_string(K) + " entries");
        const bool clamp = params.contains("clamp")
                               ? detail::json_bool(params.at("clamp"), "input.params.clamp")
                               : false;
        p.candidate = CandidateFunction::affine(std::move(w), clamp);
    } else if (kind == "arithmetic_mean") {
        p.candidate = CandidateFunction::arithmetic_mean(K);
    } else if (kind == "product") {
        p.candidate = CandidateFunction::product(K);
    } else if (kind == "maximum") {
        p.candidate = CandidateFunction::maximum(K);
    } else if (kind == "minimum") {
        p.candidate = CandidateFunction::minimum(K);
    } else if (kind == "projection") {
        p.candidate = CandidateFunction::projection(
            K, detail::json_int(require_field(params, "coordinate", "input.params"),
                                "input.params.coordinate"));
    } else if (kind == "constant") {
        p.candidate = CandidateFunction::constant(
            K, detail::json_number(require_field(params, "value", "input.params"),
                                   "input.params.value"));
    } else if (kind == "table") {
        auto pts = detail::json_points(require_field(grid, "points", "input.grid"),
                                       "input.grid.points");
        auto vals = detail::json_vector(require_field(grid, "values", "input.grid"),
                                        "input.grid.values");
        p.candidate = CandidateFunction::from_table(GridFunction(K, std::move(pts), std::move(vals)));
    } else {
        throw InputError("input.kind: unknown kind \"" + kind + "\"");
    }

    if (kind != "table") {
        if (grid.contains("levels"))
            p.levels = detail::json_vector(grid.at("levels"), "input.grid.levels");
        if (grid.contains("points"))
            p.points = detail::json_points(grid.at("points"), "input.grid.points");
        if (p.levels && p.points)
            throw InputError("input.grid: give \"levels\" or \"points\", not both");
    }
    if (j.contains("target")) {
        p.target = detail::json_vector(j.at("target"), "input.target");
        if (static_cast<int>(p.target->size()) != K)
            throw InputError("input.target: expected " + std::to_string(K) + " entries");
    }
    return p;
}

inline GridFunction problem_grid(const ProblemInput& p) {
    if (p.candidate.kind == FunctionKind::Table) return *p.candidate.table;
    if (p.points) return sample_on_grid(p.candidate, *p.points);
    if (p.levels)
        return sample_on_grid(p.candidate, lattice_grid(p.candidate.dimension, *p.levels));
    throw InputError("input.grid: needs \"levels\" or \"points\"");
}

inline Json to_json(const GridFunction& g) {
    return Json{{"K", g.dimension}, {"points", g.points}, {"values", g.values}};
}

inline Json to_json(const Certificate& c) {
    return Json{{"format_version", 1},
                {"K", c.K},
                {"n", c.n},
                {"atoms", c.atoms},
                {"probs", c.probs},
                {"evar_table", c.evar_table},
                {"f_values", c.f_values},
                {"merged_expectation", c.merged_expectation}};
}

// Parses without judging: structural JSON errors throw, but certificate
// invariants are left to verify_certificate so that broken certificates can
// be loaded and reported on.
inline Certificate certificate_from_json(const Json& j) {
    using detail::require_field;
    if (detail::json_int(require_field(j, "format_version", "certificate"),
                         "certificate.format_version") != 1)
        throw InputError("certificate.format_version: expected 1");

    Certificate c;
    c.K = detail::json_int(require_field(j, "K", "certificate"), "certificate.K");
    c.n = detail::json_int(require_field(j, "n", "certificate"), "certificate.n");
    const Json& atoms = require_field(j, "atoms", "certificate");
    if (!atoms.is_array()) detail::field_error("certificate.atoms", "an array of strings");
    for (std::size_t i = 0; i < atoms.size(); ++i)
        c.atoms.push_back(
            detail::json_string(atoms[i], "certificate.atoms[" + std::to_string(i) + "]"));
    c.probs = detail::json_vector(require_field(j, "probs", "certificate"), "certificate.probs");
    c.evar_table = detail::json_points(require_field(j, "evar_table", "certificate"),
                                       "certificate.evar_table");
    c.f_values =
        detail::json_vector(require_field(j, "f_values", "certificate"), "certificate.f_values");
    c.merged_expectation = detail::json_number(
        require_field(j, "merged_expectation", "certificate"), "certificate.merged_expectation");
    return c;
}

inline Json to_json(const VerificationReport& rep) {
    Json checks = Json::array();
    for (const auto& e : rep.entries)
        checks.push_back({{"name", e.name},
                          {"residual", e.residual},
                          {"tolerance", e.tolerance},
                          {"pass", e.pass}});
    return Json{{"checks", checks}, {"margin", rep.margin}, {"all_pass", rep.all_pass()}};
}

inline Json to_json(const MonteCarloReport& rep) {
    return Json{{"draws", rep.draws},       {"seed", rep.seed},
                {"evar_means", rep.evar_means}, {"evar_se", rep.evar_se},
                {"f_mean", rep.f_mean},     {"f_se", rep.f_se},
                {"atom_counts", rep.atom_counts}};
}

inline Json to_json(const AffineDominator& d) {
    return Json{{"weights", d.weights}, {"slack", d.slack}, {"mode", fit_mode_name(d.mode)}};
}

inline Json to_json(const EnvelopeResult& r) {
    Json support = Json::array();
    for (int i = 0; i < r.n_support(); ++i)
        support.push_back({{"index", r.support_indices[i]}, {"q", r.support_weights[i]}});
    return Json{{"value", r.value}, {"target", r.target}, {"support", support}};
}

inline Json to_json(const Verdict& v) {
    Json out{{"verdict", v.pass ? "pass" : "fail"},
             {"scope", scope_name(v.scope)},
             {"envelope_value_at_one", v.envelope_value_at_one},
             {"notes", v.notes}};
    if (v.dominator) out["dominator"] = to_json(*v.dominator);
    return out;
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError("invalid JSON in " + path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace emcert
