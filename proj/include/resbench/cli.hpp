#pragma once

// Command dispatch for the `resbench` tool. Every subcommand prints one flat
// JSON object on stdout; diagnostics go to stderr. Exit codes: 0 success,
// 1 degenerate or inconclusive outcome, 2 usage or input errors.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "resbench/config.hpp"
#include "resbench/dynamics.hpp"
#include "resbench/errors.hpp"
#include "resbench/floquet.hpp"
#include "resbench/normalform.hpp"
#include "resbench/polynf.hpp"

namespace resbench::cli {

using nlohmann::json;

inline json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

/// Throws if any number in the document is NaN or infinite.
inline void assert_finite(const json& j, const std::string& path = "$") {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        throw DomainError("non-finite number in output at " + path);
    }
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) assert_finite(v, path + "." + k);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) assert_finite(j[i], path + "[" + std::to_string(i) + "]");
    }
}

/// "3", "-1..2" or "0,2,5".
inline std::vector<int> parse_j_list(const std::string& text) {
    std::vector<int> out;
    try {
        const auto dots = text.find("..");
        if (dots != std::string::npos) {
            const int lo = std::stoi(text.substr(0, dots));
            const int hi = std::stoi(text.substr(dots + 2));
            if (hi < lo) throw InvalidArgument("empty j range " + text);
            for (int j = lo; j <= hi; ++j) out.push_back(j);
            return out;
        }
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    } catch (const std::logic_error&) {
        throw InvalidArgument("cannot parse j list \"" + text + "\"");
    }
    if (out.empty()) throw InvalidArgument("empty j list");
    return out;
}

inline json critical_json(const CriticalPoint& cp) {
    return json{{"j", cp.j},
                {"gamma_j", cp.gamma_j},
                {"Btot", cp.Btot},
                {"mu", to_json(cp.mu)},
                {"dmu_dgamma", to_json(cp.dmu_dgamma)},
                {"d", cp.d}};
}

inline json classification_json(const Classification& c) {
    json j{{"verdict", to_string(c.verdict)},
           {"direction", to_string(c.direction)},
           {"sides", to_string(c.sides)},
           {"delta", c.delta},
           {"re_a1", c.re_a1},
           {"modulus_gap", c.modulus_gap},
           {"sign_d", c.sign_d},
           {"tolerance", c.tol}};
    j["degenerate_reason"] = c.degenerate_reason.empty() ? "none" : c.degenerate_reason;
    j["stability"] = c.stability.empty() ? "none" : c.stability;
    j["curve_side"] = c.curve_side > 0 ? "above" : c.curve_side < 0 ? "below" : "none";
    return j;
}

inline json normal_form_json(const ProblemSpec& p, const NormalFormReport& r) {
    json j{{"critical_point", critical_json(r.cp)},
           {"beta", p.beta()},
           {"rho20", to_json(r.rho.rho20)},
           {"rho11", to_json(r.rho.rho11)},
           {"rho02", to_json(r.rho.rho02)},
           {"rho21", to_json(r.rho.rho21)},
           {"rho03", to_json(r.rho.rho03)},
           {"c1", to_json(r.c1)},
           {"c2", to_json(r.c2)},
           {"a1", to_json(r.a1)},
           {"a2", to_json(r.a2)},
           {"a1_alt", to_json(r.a1_alt)},
           {"a2_alt", to_json(r.a2_alt)},
           {"route_gap", std::max(std::abs(r.a1 - r.a1_alt), std::abs(r.a2 - r.a2_alt))},
           {"d", r.d},
           {"Btot", r.Btot},
           {"delta", r.delta},
           {"delta_rotated", r.delta_rotated},
           {"grid_n", p.grid_n()}};
    if (p.kind() == ProblemKind::PeriodicCoefficient) {
        try {
            const ClosedForm f = closed_form_periodic(p.g().S, p.g().T, r.Btot);
            j["closed_form_status"] = "ok";
            j["closed_form_a1"] = to_json(f.a1);
            j["closed_form_a2"] = to_json(f.a2);
            j["closed_form_delta"] = f.delta;
            j["closed_form_direction"] = to_string(f.direction);
            j["closed_form_direction_margin"] = f.direction_margin;
        } catch (const DegenerateCubic&) {
            j["closed_form_status"] = "degenerate_cubic";
        }
    }
    return j;
}

/// Copies every field of `src` into `dst` under `prefix`.
inline void merge_prefixed(json& dst, const json& src, const std::string& prefix) {
    for (const auto& [k, v] : src.items()) dst[prefix + k] = v;
}

inline json attractor_json(const AttractorReport& r) {
    double max_diam = 0.0;
    for (double d : r.cluster_diameters) max_diam = std::max(max_diam, d);
    return json{{"kind", to_string(r.kind)},
                {"gamma", r.gamma},
                {"amplitude", r.amplitude},
                {"tail_amplitude", r.tail_amplitude},
                {"radial_rel_dev", r.radial_rel_dev},
                {"angular_coverage", r.angular_coverage},
                {"rotation_mean", r.rotation_mean},
                {"rotation_std", r.rotation_std},
                {"cluster_diameters", r.cluster_diameters},
                {"max_cluster_diameter", max_diam},
                {"iterates_used", r.iterates_used}};
}

inline void write_csv(const std::string& path, const AttractorReport& r) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write CSV to " + path);
    out << "iter,re_z,im_z,sup_norm\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.z.size(); ++i) {
        out << i << ',' << r.z[i].real() << ',' << r.z[i].imag() << ',' << r.sup_norm[i] << '\n';
    }
}

/// Oracle run: random rho sets (rho30 and rho12 included) through the brute-force normal form.
inline json oracle_json(int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const auto draw = [&] {
        const double re = unif(rng);
        const double im = unif(rng);
        return cplx(re, im);
    };
    const cplx i(0.0, 1.0);
    double max_dev = 0.0, max_res = 0.0;
    for (int s = 0; s < samples; ++s) {
        RhoCoefficients r;
        r.rho20 = draw();
        r.rho11 = draw();
        r.rho02 = draw();
        const cplx rho30 = draw();
        r.rho21 = draw();
        const cplx rho12 = draw();
        r.rho03 = draw();
        const auto nf = polynf::normal_form(polynf::PolyMap::from_rho(i, r.rho20, r.rho11, r.rho02, rho30, r.rho21,
                                                                      rho12, r.rho03));
        const CCoefficients c = c_coefficients(r);
        max_dev = std::max({max_dev, std::abs(c.c1 - nf.c1), std::abs(c.c2 - nf.c2)});
        max_res = std::max(max_res, nf.residual);
    }
    const bool pass = max_dev <= 1e-12 && max_res <= 1e-13;
    return json{{"samples", samples},
                {"seed", seed},
                {"max_deviation", max_dev},
                {"max_nonresonant_residual", max_res},
                {"pass", pass}};
}

struct Outcome {
    json result;
    int exit_code = 0;
};

inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Resonant (1:4) bifurcation analysis of periodic delay equations", "resbench"};
    app.require_subcommand(1);

    std::string config_path, j_text = "0", csv_path;
    int count = 6, samples = 100, j_single = 0;
    std::uint64_t seed = 42;
    std::size_t grid_override = 0;
    double tol_deg = kDegeneracyTol, gamma_value = 0.0, offset = 0.0, verify_offset = 0.05;
    DetectOptions detect;

    const auto add_config = [&](CLI::App* sc) {
        sc->add_option("--config", config_path, "problem configuration (JSON)")->required();
        sc->add_option("--grid-n", grid_override, "override grid_n");
    };
    const auto add_detect = [&](CLI::App* sc) {
        sc->add_option("--ic", detect.ic_amplitude, "initial amplitude along Re chi_i");
        sc->add_option("--transient", detect.n_transient, "discarded iterations (>= 200)");
        sc->add_option("--collect", detect.n_collect, "collected iterations (>= 400)");
    };

    auto* critical = app.add_subcommand("critical", "critical parameters gamma_j");
    add_config(critical);
    critical->add_option("--j", j_text, "index, range a..b or list a,b,c");

    auto* multipliers = app.add_subcommand("multipliers", "leading Floquet multipliers at the configured gamma");
    add_config(multipliers);
    multipliers->add_option("--count", count, "number of exponents");
    CLI::Option* m_gamma = multipliers->add_option("--gamma", gamma_value, "explicit gamma");
    CLI::Option* m_j = multipliers->add_option("--j", j_single, "critical index for gamma");
    CLI::Option* m_off = multipliers->add_option("--offset", offset, "offset from gamma_j");
    m_gamma->excludes(m_j)->excludes(m_off);
    m_off->needs(m_j);

    auto* normal = app.add_subcommand("normal-form", "restricted-map and normal-form coefficients");
    add_config(normal);
    normal->add_option("--j", j_single, "critical index");
    normal->add_option("--tol-deg", tol_deg, "degeneracy tolerance");

    auto* classify_cmd = app.add_subcommand("classify", "bifurcation verdict at gamma_j");
    add_config(classify_cmd);
    classify_cmd->add_option("--j", j_single, "critical index");
    classify_cmd->add_option("--tol-deg", tol_deg, "degeneracy tolerance");

    auto* oracle = app.add_subcommand("oracle", "brute-force check of the resonant normal-form formulas");
    oracle->add_option("--samples", samples, "random coefficient sets");
    oracle->add_option("--seed", seed, "RNG seed");

    auto* simulate = app.add_subcommand("simulate", "iterate the time-one map and detect the attractor");
    add_config(simulate);
    add_detect(simulate);
    CLI::Option* s_gamma = simulate->add_option("--gamma", gamma_value, "explicit gamma");
    CLI::Option* s_j = simulate->add_option("--j", j_single, "critical index for gamma (and for z)");
    CLI::Option* s_off = simulate->add_option("--offset", offset, "offset from gamma_j");
    s_gamma->excludes(s_off);
    s_off->needs(s_j);
    simulate->add_option("--csv", csv_path, "trajectory CSV output");

    auto* verify = app.add_subcommand("verify", "classify, simulate on both sides of gamma_j, compare");
    add_config(verify);
    add_detect(verify);
    verify->add_option("--j", j_single, "critical index");
    verify->add_option("--offset", verify_offset, "distance from gamma_j for the two runs");
    verify->add_option("--tol-deg", tol_deg, "degeneracy tolerance");

    std::vector<const char*> argv{"resbench"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    }

    const auto load = [&]() {
        ParsedConfig cfg = load_config(config_path);
        if (grid_override != 0) {
            check_grid_n(static_cast<long long>(grid_override), "--grid-n");
            cfg.problem = cfg.problem.with_grid(grid_override);
        }
        return cfg;
    };

    try {
        Outcome o;
        if (critical->parsed()) {
            const ParsedConfig cfg = load();
            json list = json::array();
            for (const auto& cp : critical_points(cfg.problem, parse_j_list(j_text))) list.push_back(critical_json(cp));
            o.result = json{{"command", "critical"}, {"beta", cfg.problem.beta()}, {"critical_points", list}};
        } else if (multipliers->parsed()) {
            const ParsedConfig cfg = load();
            double gamma = cfg.problem.gamma();
            if (*m_gamma) gamma = gamma_value;
            if (*m_j) gamma = critical_point(cfg.problem.beta(), j_single).gamma_j + offset;
            if (count < 1) throw InvalidArgument("--count must be positive");
            const DerivedLinearData data = derived_linear_data(cfg.problem.with_gamma(gamma));
            json list = json::array();
            for (const auto& f : floquet_data(data, static_cast<std::size_t>(count))) {
                const double residual = sup_distance(monodromy_apply(data, f.chi), f.chi * f.mu);
                list.push_back(json{{"lambda", to_json(f.lambda)},
                                    {"mu", to_json(f.mu)},
                                    {"abs_mu", std::abs(f.mu)},
                                    {"simple", f.simple},
                                    {"eigen_residual", residual}});
            }
            o.result = json{{"command", "multipliers"},
                            {"gamma", gamma},
                            {"beta", data.beta},
                            {"Btot", data.Btot},
                            {"multipliers", list}};
        } else if (normal->parsed() || classify_cmd->parsed()) {
            const ParsedConfig cfg = load();
            const NormalFormReport rep = analyze(cfg.problem, j_single, tol_deg);
            if (normal->parsed()) {
                o.result = normal_form_json(cfg.problem, rep);
                o.result["command"] = "normal-form";
            } else {
                o.result = classification_json(rep.verdict);
                o.result["command"] = "classify";
                o.result["j"] = j_single;
                o.result["gamma_j"] = rep.cp.gamma_j;
                o.result["Btot"] = rep.Btot;
                o.result["d"] = rep.d;
                o.result["a1"] = to_json(rep.a1);
                o.result["a2"] = to_json(rep.a2);
                o.result["delta_rotated"] = rep.delta_rotated;
            }
            if (rep.verdict.verdict == Verdict::Degenerate) o.exit_code = 1;
        } else if (oracle->parsed()) {
            if (samples < 1) throw InvalidArgument("--samples must be positive");
            o.result = oracle_json(samples, seed);
            o.result["command"] = "oracle";
            if (!o.result["pass"].get<bool>()) o.exit_code = 1;
        } else if (simulate->parsed()) {
            const ParsedConfig cfg = load();
            const CriticalPoint cp = critical_point(cfg.problem.beta(), *s_j ? j_single : 0);
            double gamma = cfg.problem.gamma();
            if (*s_gamma) gamma = gamma_value;
            else if (*s_off) gamma = cp.gamma_j + offset;
            const AttractorReport rep = iterate_and_detect(cfg.problem, gamma, cp, detect);
            o.result = attractor_json(rep);
            o.result["command"] = "simulate";
            o.result["critical_index"] = cp.j;
            if (rep.kind == AttractorKind::FourPeriodic) {
                o.result["four_return_residual"] = four_return_residual(cfg.problem, gamma, rep.final_state);
            }
            if (!csv_path.empty()) write_csv(csv_path, rep);
            if (rep.kind == AttractorKind::Inconclusive) o.exit_code = 1;
        } else if (verify->parsed()) {
            const ParsedConfig cfg = load();
            const NormalFormReport nf = analyze(cfg.problem, j_single, tol_deg);
            const auto run = [&](double side) {
                return iterate_and_detect(cfg.problem, nf.cp.gamma_j + side * verify_offset, nf.cp, detect);
            };
            const AttractorReport above = run(+1.0);
            const AttractorReport below = run(-1.0);
            const Classification& c = nf.verdict;
            std::string consistency = "unverifiable";
            if (c.verdict == Verdict::InvariantCurve) {
                const AttractorReport& past = c.sign_d > 0 ? above : below;
                const AttractorReport& before = c.sign_d > 0 ? below : above;
                if (c.direction == Direction::Supercritical) {
                    consistency = past.kind == AttractorKind::InvariantCurve &&
                                          before.kind == AttractorKind::FixedPointZero
                                      ? "consistent"
                                      : "inconsistent";
                } else {
                    consistency = before.kind == AttractorKind::FixedPointZero &&
                                          past.kind != AttractorKind::FixedPointZero
                                      ? "consistent"
                                      : "inconsistent";
                }
            } else if (c.verdict == Verdict::FourPeriodic && c.sides == Sides::Same) {
                consistency = above.kind == AttractorKind::FourPeriodic || below.kind == AttractorKind::FourPeriodic
                                  ? "consistent"
                                  : "inconsistent";
            }
            o.result = classification_json(c);
            o.result["command"] = "verify";
            o.result["gamma_j"] = nf.cp.gamma_j;
            o.result["offset"] = verify_offset;
            o.result["delta_rotated"] = nf.delta_rotated;
            merge_prefixed(o.result, attractor_json(above), "above_");
            merge_prefixed(o.result, attractor_json(below), "below_");
            o.result["consistency"] = consistency;
            if (c.verdict == Verdict::Degenerate || consistency != "consistent") o.exit_code = 1;
        }
        assert_finite(o.result);
        out << o.result.dump(2) << "\n";
        return o.exit_code;
    } catch (const Error& e) {
        err << json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    }
}

}  // namespace resbench::cli
