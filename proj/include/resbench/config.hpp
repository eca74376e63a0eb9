#pragma once

// JSON problem configuration.
//
//   {
//     "kind":   "general" | "periodic_coefficient",
//     "gamma":  1.2 | {"critical_index": 0, "offset": 0.05},
//     "grid_n": 4096,
//     "coeffs": [{"power": 1, "dc": -1.0, "cos": [...], "sin": [...]}, ...],   // general
//     "r":      {"dc": 1.0, "cos": [...], "sin": [...]},                       // periodic_coefficient
//     "g":      {"form": "cubic", "S": 1.0, "T": 1.0} | {"form": "expm1"}      // periodic_coefficient
//   }
//
// Unknown keys are rejected. When grid_n is absent the RESBENCH_N environment
// variable, then 4096, is used.

#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"
#include "resbench/errors.hpp"
#include "resbench/floquet.hpp"
#include "resbench/problem.hpp"

namespace resbench {

inline constexpr std::size_t kMinConfigGridN = 256;
inline constexpr std::size_t kMaxConfigGridN = 65536;

struct CriticalRef {
    int index = 0;
    double offset = 0.0;
};

/// Explicit gamma or a critical point plus an offset; never both.
using GammaSource = std::variant<double, CriticalRef>;

struct ParsedConfig {
    ProblemSpec problem;
    GammaSource gamma_source;
};

inline double resolve_gamma(const GammaSource& src, double beta) {
    if (const double* g = std::get_if<double>(&src)) return *g;
    const auto& ref = std::get<CriticalRef>(src);
    return critical_point(beta, ref.index).gamma_j + ref.offset;
}

inline void check_grid_n(long long n, const std::string& where) {
    if (n < static_cast<long long>(kMinConfigGridN) || n > static_cast<long long>(kMaxConfigGridN) || n % 2 != 0) {
        throw SchemaError(where + ": grid_n must be even and within [256, 65536], got " + std::to_string(n));
    }
}

/// Default grid size: RESBENCH_N if set, else 4096.
inline std::size_t default_grid_n() {
    if (const char* env = std::getenv("RESBENCH_N")) {
        char* end = nullptr;
        const long long n = std::strtoll(env, &end, 10);
        if (end == env || *end != '\0') throw SchemaError("RESBENCH_N: not an integer: " + std::string(env));
        check_grid_n(n, "RESBENCH_N");
        return static_cast<std::size_t>(n);
    }
    return kDefaultGridN;
}

namespace detail {

using nlohmann::json;

inline void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw SchemaError(path + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.count(key)) throw SchemaError(path + "." + key + ": unknown key");
    }
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw SchemaError(path + "." + key + ": missing required key");
    return obj.at(key);
}

inline double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw SchemaError(path + ": must be finite");
    return x;
}

inline long long integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path + ": expected an integer");
    return v.get<long long>();
}

inline std::vector<double> number_list(const json& obj, const std::string& path, const char* key) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    const json& arr = obj.at(key);
    const std::string p = path + "." + key;
    if (!arr.is_array()) throw SchemaError(p + ": expected an array of numbers");
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(number(arr[i], p + "[" + std::to_string(i) + "]"));
    return out;
}

inline TrigPoly trig(const json& obj, const std::string& path, std::initializer_list<const char*> extra = {}) {
    std::vector<const char*> keys{"dc", "cos", "sin"};
    keys.insert(keys.end(), extra.begin(), extra.end());
    const std::set<std::string> ok(keys.begin(), keys.end());
    if (!obj.is_object()) throw SchemaError(path + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!ok.count(key)) throw SchemaError(path + "." + key + ": unknown key");
    }
    TrigPoly t;
    t.dc = obj.contains("dc") ? number(obj.at("dc"), path + ".dc") : 0.0;
    t.cos = number_list(obj, path, "cos");
    t.sin = number_list(obj, path, "sin");
    return t;
}

}  // namespace detail

inline ParsedConfig parse_config(const std::string& text) {
    using nlohmann::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("$: invalid JSON: ") + e.what());
    }
    detail::only_keys(root, "$", {"kind", "gamma", "grid_n", "coeffs", "r", "g"});

    const json& kind_v = detail::require(root, "$", "kind");
    if (!kind_v.is_string()) throw SchemaError("$.kind: expected a string");
    const std::string kind = kind_v.get<std::string>();

    std::size_t grid_n = 0;
    if (root.contains("grid_n")) {
        const long long n = detail::integer(root.at("grid_n"), "$.grid_n");
        check_grid_n(n, "$.grid_n");
        grid_n = static_cast<std::size_t>(n);
    } else {
        grid_n = default_grid_n();
    }

    GammaSource src = CriticalRef{0, 0.0};
    if (root.contains("gamma")) {
        const json& g = root.at("gamma");
        if (g.is_number()) {
            src = detail::number(g, "$.gamma");
        } else if (g.is_object()) {
            detail::only_keys(g, "$.gamma", {"critical_index", "offset"});
            CriticalRef ref;
            ref.index = static_cast<int>(detail::integer(detail::require(g, "$.gamma", "critical_index"),
                                                         "$.gamma.critical_index"));
            ref.offset = g.contains("offset") ? detail::number(g.at("offset"), "$.gamma.offset") : 0.0;
            src = ref;
        } else {
            throw SchemaError("$.gamma: expected a number or {critical_index, offset}");
        }
    }

    std::optional<ProblemSpec> problem;
    if (kind == "general") {
        for (const char* k : {"r", "g"}) {
            if (root.contains(k)) throw SchemaError(std::string("$.") + k + ": not allowed for kind general");
        }
        const json& coeffs = detail::require(root, "$", "coeffs");
        if (!coeffs.is_array() || coeffs.empty()) throw SchemaError("$.coeffs: expected a non-empty array");
        std::vector<PowerTerm> terms;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const std::string path = "$.coeffs[" + std::to_string(i) + "]";
            PowerTerm term;
            term.coeff = detail::trig(coeffs[i], path, {"power"});
            const long long p = detail::integer(detail::require(coeffs[i], path, "power"), path + ".power");
            if (p < 1) throw SchemaError(path + ".power: must be >= 1");
            term.power = static_cast<int>(p);
            terms.push_back(std::move(term));
        }
        try {
            problem = ProblemSpec::general(std::move(terms), 1.0, grid_n);
        } catch (const InvalidArgument& e) {
            throw SchemaError(std::string("$.coeffs: ") + e.what());
        }
    } else if (kind == "periodic_coefficient") {
        if (root.contains("coeffs")) throw SchemaError("$.coeffs: not allowed for kind periodic_coefficient");
        const TrigPoly r = detail::trig(detail::require(root, "$", "r"), "$.r");
        const json& g = detail::require(root, "$", "g");
        if (!g.is_object()) throw SchemaError("$.g: expected an object");
        const json& form = detail::require(g, "$.g", "form");
        Nonlinearity nl;
        if (form == "expm1") {
            detail::only_keys(g, "$.g", {"form"});
            nl = Nonlinearity::expm1();
        } else if (form == "cubic") {
            detail::only_keys(g, "$.g", {"form", "S", "T"});
            nl = Nonlinearity::cubic(detail::number(detail::require(g, "$.g", "S"), "$.g.S"),
                                     detail::number(detail::require(g, "$.g", "T"), "$.g.T"));
        } else {
            throw SchemaError("$.g.form: expected \"cubic\" or \"expm1\"");
        }
        try {
            problem = ProblemSpec::periodic_coefficient(r, nl, 1.0, grid_n);
        } catch (const InvalidArgument& e) {
            throw SchemaError(std::string("$.r: ") + e.what());
        }
    } else {
        throw SchemaError("$.kind: expected \"general\" or \"periodic_coefficient\", got \"" + kind + "\"");
    }

    const double gamma = resolve_gamma(src, problem->beta());
    return ParsedConfig{problem->with_gamma(gamma), src};
}

inline ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace resbench
