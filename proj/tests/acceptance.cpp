// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "resbench/config.hpp"
#include "resbench/dynamics.hpp"
#include "resbench/normalform.hpp"
#include "resbench/polynf.hpp"
#include "test_support.hpp"

using namespace resbench;
using resbench::testing::kPi;

namespace {

const cplx I(0.0, 1.0);

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

DerivedLinearData critical_data(const ProblemSpec& p) {
    return derived_linear_data(p.with_gamma(critical_point(p.beta(), 0).gamma_j));
}

Outcome critical_point_wright() {
    const ParsedConfig cfg = load_config(resbench::testing::config_path("wright.json"));
    const double err = std::abs(critical_point(cfg.problem.beta(), 0).gamma_j - kPi / 2.0);
    return {err <= 1e-12, fmt("beta = %g, |gamma_0 - pi/2| = %.2e (tol 1e-12)", cfg.problem.beta(), err)};
}

Outcome spectral_identities() {
    std::mt19937_64 rng(1001);
    double e_chi = 0.0, e_fam = 0.0, e_three = 0.0;
    for (int s = 0; s < 10; ++s) {
        const DerivedLinearData d = critical_data(resbench::testing::random_periodic(rng));
        const double B = d.Btot;
        const auto e = [&](double m) { return d.B.map([m](cplx v) { return std::exp(m * I * v); }); };
        e_chi = std::max(e_chi, std::abs(spectral_functional(d, I, eigenfunction(d, I)) - 1.0));
        for (int m : {0, 2, 3, 4}) {
            const cplx expected = (double(m) * std::pow(-I, m) + I) / ((I + B) * double(m + 1));
            e_fam = std::max(e_fam, std::abs(spectral_functional(d, I, e(m)) - expected));
        }
        e_three = std::max(e_three, std::abs(spectral_functional(d, I, e(3)) - spectral_functional(d, I, e(0))));
    }
    return {e_chi <= 1e-10 && e_fam <= 1e-9 && e_three <= 1e-10,
            fmt("|R(chi)-1| = %.2e, exp family %.2e, |R(e^3iB)-R(1)| = %.2e over 10 specs", e_chi, e_fam, e_three)};
}

Outcome resolvent() {
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    int done = 0;
    while (done < 20) {
        const DerivedLinearData d = derived_linear_data(resbench::testing::random_general(rng).with_gamma(u(rng)));
        const cplx z(u(rng), u(rng));
        if (std::abs(z) < 0.2 || std::abs(characteristic_delta(d.Btot, z)) < 1e-3) continue;
        const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
        const double w = 1.0 + std::abs(u(rng));
        const GridFunction psi =
            GridFunction::sample(d.grid_n(), [&](double t) { return a * std::exp(cplx(0.0, w) * t) + b * t; });
        const GridFunction x = resolvent_apply(d, z, psi);
        worst = std::max(worst, sup_distance(x * z - monodromy_apply(d, x), psi));
        ++done;
    }
    const DerivedLinearData d = critical_data(resbench::testing::wright(4096, 0.3));
    double particular = 0.0;
    for (double sgn : {1.0, -1.0}) {
        const GridFunction e2 = d.B.map([sgn](cplx v) { return std::exp(2.0 * sgn * I * v); });
        const GridFunction expected = e2 * (-2.0 * sgn * I / (2.0 * sgn * I + 1.0));
        particular = std::max(particular, sup_distance(resolvent_apply(d, -1.0, e2 - cplx(1.0)), expected));
    }
    return {worst <= 1e-7 && particular <= 1e-8,
            fmt("max residual %.2e over 20 (z, psi) (tol 1e-7); z = -1 particular values %.2e (tol 1e-8)", worst,
                particular)};
}

Outcome periodic_cancellation() {
    std::mt19937_64 rng(1003);
    double a2 = 0.0, a1 = 0.0, w11 = 0.0;
    for (int s = 0; s < 20; ++s) {
        const ProblemSpec p = resbench::testing::random_periodic(rng);
        const CriticalPoint cp = critical_point(p.beta(), 0);
        const ACoefficients a = a_coefficients(p, cp);
        const double S = p.g().S, T = p.g().T, B = cp.Btot;
        const cplx closed = B / (2.0 * (I + B)) * (T - S * S * (11.0 + 2.0 * I) / 5.0);
        a2 = std::max(a2, std::abs(a.a2));
        a1 = std::max(a1, std::abs(a.a1 - closed));
        const ProblemSpec pc = p.with_gamma(cp.gamma_j);
        const DerivedLinearData d = derived_linear_data(pc);
        const GridFunction chi = eigenfunction(d, I);
        const GridFunction w = resolvent_apply(d, 1.0, bilinear_V(pc, chi, chi.conj()));
        w11 = std::max(w11, sup_distance(w, GridFunction::constant(p.grid_n(), -S)));
    }
    return {a2 <= 1e-9 && a1 <= 1e-8 && w11 <= 1e-8,
            fmt("max |a2| = %.2e, max |a1 - closed form| = %.2e, max |(1-U)^-1 V11 + S| = %.2e over 20 specs", a2, a1,
                w11)};
}

Outcome route_agreement() {
    std::mt19937_64 rng(1004);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
        const ProblemSpec p = resbench::testing::random_general(rng);
        const ACoefficients a = a_coefficients(p, critical_point(p.beta(), 0));
        worst = std::max({worst, std::abs(a.a1 - a.a1_alt), std::abs(a.a2 - a.a2_alt)});
    }
    return {worst <= 1e-8, fmt("max route gap %.2e over 20 general specs (tol 1e-8)", worst)};
}

Outcome normal_form_oracle() {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double dev = 0.0, res = 0.0;
    for (int s = 0; s < 100; ++s) {
        cplx v[7];
        for (cplx& x : v) {
            const double re = u(rng);
            x = cplx(re, u(rng));
        }
        RhoCoefficients r{v[0], v[1], v[2], v[4], v[6]};
        const auto nf = polynf::normal_form(polynf::PolyMap::from_rho(I, v[0], v[1], v[2], v[3], v[4], v[5], v[6]));
        const CCoefficients c = c_coefficients(r);
        dev = std::max({dev, std::abs(nf.c1 - c.c1), std::abs(nf.c2 - c.c2)});
        res = std::max(res, nf.residual);
    }
    return {dev <= 1e-12 && res <= 1e-13,
            fmt("max |c_formula - c_bruteforce| = %.2e (tol 1e-12), non-resonant residual %.2e (tol 1e-13)", dev, res)};
}

Outcome transversality() {
    std::mt19937_64 rng(1007);
    const double h = 1e-4;
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
        const ProblemSpec p = resbench::testing::random_general(rng);
        const CriticalPoint cp = critical_point(p.beta(), 0);
        const cplx fd =
            (track_multiplier(p.beta(), cp.gamma_j + h, I) - track_multiplier(p.beta(), cp.gamma_j - h, I)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - cp.dmu_dgamma));
    }
    return {worst <= 1e-5, fmt("max |FD - dmu/dgamma| = %.2e at h = 1e-4 over 10 specs (tol 1e-5)", worst)};
}

Outcome wright_end_to_end() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (double c : {0.0, 0.3}) {
        const ProblemSpec p = resbench::testing::wright(2048, c);
        const NormalFormReport nf = analyze(p, 0);
        const bool verdict =
            nf.verdict.verdict == Verdict::InvariantCurve && nf.verdict.direction == Direction::Supercritical;
        const AttractorKind above = iterate_and_detect(p, kPi / 2.0 + 0.05, nf.cp).kind;
        const AttractorKind below = iterate_and_detect(p, kPi / 2.0 - 0.05, nf.cp).kind;
        double lo = 1e300, hi = 0.0;
        for (const auto& s : amplitude_scaling(p, 0, {0.02, 0.04, 0.08})) {
            lo = std::min(lo, s.ratio);
            hi = std::max(hi, s.ratio);
        }
        const bool this_ok = verdict && above == AttractorKind::InvariantCurve &&
                             below == AttractorKind::FixedPointZero && hi / lo <= 1.2;
        ok = ok && this_ok;
        detail += std::string(c == 0.0 ? "r=1: " : "r=1+0.3cos: ") + to_string(nf.verdict.direction) + " " +
                  to_string(nf.verdict.verdict) + ", +0.05 " + to_string(above) + ", -0.05 " + to_string(below) +
                  fmt(", amp/sqrt(eps) spread %.3f; ", hi / lo);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {ok && secs <= 300.0, detail + fmt("%.1f s at N=2048", secs)};
}

Outcome degeneracy_boundaries() {
    const double B = -kPi / 2.0, S = 1.0;
    const TrigPoly r{1.0, {0.2}, {0.1}};
    const auto spec = [&](double T) {
        return ProblemSpec::periodic_coefficient(r, Nonlinearity::cubic(S, T), 1.0, 2048);
    };
    const NormalFormReport at = analyze(spec(11.0 * S * S / 5.0), 0);
    bool closed_flag = false;
    try {
        closed_form_periodic(S, 11.0 * S * S / 5.0, B);
    } catch (const DegenerateCubic&) {
        closed_flag = true;
    }
    const double Tb = S * S * (11.0 * B + 2.0) / (5.0 * B);
    const NormalFormReport lo = analyze(spec(Tb - 0.05), 0);
    const NormalFormReport hi = analyze(spec(Tb + 0.05), 0);
    const bool flips = lo.verdict.direction == Direction::Supercritical && hi.verdict.direction == Direction::Subcritical;
    const bool closed_flips = closed_form_periodic(S, Tb - 0.05, B).direction == Direction::Supercritical &&
                              closed_form_periodic(S, Tb + 0.05, B).direction == Direction::Subcritical;
    const bool ok = at.verdict.verdict == Verdict::Degenerate && closed_flag && flips && closed_flips;
    return {ok, std::string("T = 11S^2/5: ") + to_string(at.verdict.verdict) + " (" + at.verdict.degenerate_reason +
                    fmt(", delta = %.1e); T = %.4f -/+ 0.05: ", at.delta, Tb) + to_string(lo.verdict.direction) +
                    " -> " + to_string(hi.verdict.direction)};
}

Outcome resonant_search() {
    const ParsedConfig cfg = load_config(resbench::testing::config_path("resonant_general.json"));
    const ProblemSpec p = cfg.problem.with_grid(2048);
    const NormalFormReport nf = analyze(p, 0);
    const double gamma = cfg.problem.gamma();
    const AttractorReport r = iterate_and_detect(p, gamma, nf.cp);
    const double ret = r.kind == AttractorKind::FourPeriodic ? four_return_residual(p, gamma, r.final_state) : 1.0;
    const bool ok = nf.delta < 0.0 && r.kind == AttractorKind::FourPeriodic && ret <= 1e-5;
    return {ok, fmt("configs/resonant_general.json: delta = %.4f, gamma = gamma_0 %+.2f -> ", nf.delta,
                    gamma - nf.cp.gamma_j) +
                    to_string(r.kind) + fmt(", F^4 residual %.2e (tol 1e-5)", ret)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"critical point of the Wright configuration", critical_point_wright},
        {"spectral functional identities", spectral_identities},
        {"resolvent residual and particular values", resolvent},
        {"periodic-class cancellation", periodic_cancellation},
        {"rho route vs direct route", route_agreement},
        {"normal-form oracle", normal_form_oracle},
        {"transversality vs finite differences", transversality},
        {"Wright end to end", wright_end_to_end},
        {"degeneracy boundaries", degeneracy_boundaries},
        {"resonant general spec with four-cycles", resonant_search},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
