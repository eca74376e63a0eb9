#pragma once

/**
 * @file normalform.hpp
 * @brief Cubic normal form of the time-one map at a 1:4 resonant critical point.
 *
 * Pipeline at gamma = gamma_j (mu = i):
 *
 *   V, W        second and third derivatives of the time-one map at 0
 *   rho_kl      coefficients of the map restricted to the center manifold,
 *               in the coordinate z = R_i(phi)
 *   c1, c2      resonant coefficients of w^2 wbar and wbar^3
 *   a1, a2      c1 / i, c2 / i; also evaluated directly from resolvent terms
 *   delta       |Im a1 - B Re a1| - |a2| sqrt(1 + B^2)
 *
 * delta > 0 gives a unique invariant curve (direction from Re a1), delta < 0
 * gives two families of 4-periodic points.
 */

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "resbench/errors.hpp"
#include "resbench/floquet.hpp"
#include "resbench/grid.hpp"
#include "resbench/problem.hpp"

namespace resbench {

inline constexpr double kDegeneracyTol = 1e-9;

inline GridFunction bilinear_V(const ProblemSpec& p, const GridFunction& phi1, const GridFunction& phi2) {
    const GridFunction kernel = p.tabulate_partial(2) * cplx(p.gamma());
    return cumulative(kernel * phi1 * phi2);
}

inline GridFunction trilinear_W(const ProblemSpec& p, const GridFunction& phi1, const GridFunction& phi2,
                                const GridFunction& phi3) {
    const GridFunction kernel = p.tabulate_partial(3) * cplx(p.gamma());
    return cumulative(kernel * phi1 * phi2 * phi3);
}

struct RhoCoefficients {
    cplx rho20, rho11, rho02, rho21, rho03;
};

/**
 * Every resolvent and multilinear term at a critical point, evaluated once.
 * The rho formulas and the direct a1/a2 formulas are both assembled from it.
 */
struct ResonantTerms {
    CriticalPoint cp;
    DerivedLinearData data;
    GridFunction chi, chi_bar;
    GridFunction V20, V11, V02;
    cplx R_W21;       // R(W(chi, chi, chibar))
    cplx R_W03;       // R(W(chibar, chibar, chibar))
    cplx R_V_chi_w11;  // R(V(chi, (1-U)^{-1} V11))
    cplx R_V_chibar_w20;  // R(V(chibar, (mu^2-U)^{-1} V20))
    cplx R_V_chibar_w02_raw;  // R(V(chibar, (mu^-2-U)^{-1} V02))
    cplx R_V_chibar_w02_proj;  // same with the projections of V02 removed first
    cplx rho20, rho11, rho02;
};

inline ResonantTerms resonant_terms(const ProblemSpec& problem, const CriticalPoint& cp) {
    const ProblemSpec p = problem.with_gamma(cp.gamma_j);
    ResonantTerms t;
    t.cp = cp;
    t.data = derived_linear_data(p);
    const cplx mu = cp.mu;
    const cplx mu_bar = std::conj(mu);
    const auto R = [&](const GridFunction& psi) { return spectral_functional(t.data, mu, psi); };

    t.chi = eigenfunction(t.data, mu);
    t.chi_bar = t.chi.conj();
    t.V20 = bilinear_V(p, t.chi, t.chi);
    t.V11 = bilinear_V(p, t.chi, t.chi_bar);
    t.V02 = bilinear_V(p, t.chi_bar, t.chi_bar);
    t.rho20 = R(t.V20);
    t.rho11 = R(t.V11);
    t.rho02 = R(t.V02);

    t.R_W21 = R(trilinear_W(p, t.chi, t.chi, t.chi_bar));
    t.R_W03 = R(trilinear_W(p, t.chi_bar, t.chi_bar, t.chi_bar));

    const GridFunction w11 = resolvent_apply(t.data, 1.0, t.V11);
    const GridFunction w20 = resolvent_apply(t.data, mu * mu, t.V20);
    t.R_V_chi_w11 = R(bilinear_V(p, t.chi, w11));
    t.R_V_chibar_w20 = R(bilinear_V(p, t.chi_bar, w20));

    const cplx z02 = 1.0 / (mu * mu);
    const GridFunction w02_raw = resolvent_apply(t.data, z02, t.V02);
    const GridFunction V02_proj = t.V02 - t.chi * t.rho02 - t.chi_bar * spectral_functional(t.data, mu_bar, t.V02);
    const GridFunction w02_proj = resolvent_apply(t.data, z02, V02_proj);
    t.R_V_chibar_w02_raw = R(bilinear_V(p, t.chi_bar, w02_raw));
    t.R_V_chibar_w02_proj = R(bilinear_V(p, t.chi_bar, w02_proj));
    return t;
}

/// rho20, rho11, rho02, rho21, rho03 of the restricted map
/// z -> mu z + rho20/2 z^2 + rho11 z zbar + rho02/2 zbar^2 + rho21/2 z^2 zbar + rho03/6 zbar^3.
inline RhoCoefficients rho_from_terms(const ResonantTerms& t) {
    const cplx mu = t.cp.mu;
    RhoCoefficients r;
    r.rho20 = t.rho20;
    r.rho11 = t.rho11;
    r.rho02 = t.rho02;
    r.rho21 = t.R_W21 + 2.0 * t.R_V_chi_w11 + t.R_V_chibar_w20 +
              (1.0 / mu) * (1.0 - 2.0 * mu) / (1.0 - mu) * t.rho20 * t.rho11 -
              2.0 / (1.0 - 1.0 / mu) * std::norm(t.rho11) - mu / (mu * mu * mu - 1.0) * std::norm(t.rho02);
    r.rho03 = t.R_W03 + 3.0 * t.R_V_chibar_w02_proj;
    return r;
}

inline RhoCoefficients rho_coefficients(const ProblemSpec& p, const CriticalPoint& cp) {
    return rho_from_terms(resonant_terms(p, cp));
}

struct CCoefficients {
    cplx c1, c2;
};

/// Resonant cubic coefficients at mu = i.
inline CCoefficients c_coefficients(const RhoCoefficients& r) {
    const cplx i(0.0, 1.0);
    CCoefficients c;
    c.c1 = (1.0 + 3.0 * i) / 4.0 * r.rho20 * r.rho11 + (1.0 - i) / 2.0 * r.rho11 * std::conj(r.rho11) +
           (-1.0 - i) / 4.0 * r.rho02 * std::conj(r.rho02) + r.rho21 / 2.0;
    c.c2 = (i - 1.0) / 4.0 * r.rho11 * r.rho02 + (-i - 1.0) / 4.0 * r.rho02 * std::conj(r.rho20) + r.rho03 / 6.0;
    return c;
}

struct ACoefficients {
    cplx a1, a2;
    /// straight from the resolvent terms, without going through rho
    cplx a1_alt, a2_alt;
};

inline ACoefficients a_from_terms(const ResonantTerms& t) {
    const cplx i(0.0, 1.0);
    const CCoefficients c = c_coefficients(rho_from_terms(t));
    ACoefficients a;
    // c / i, written out so that a * i reproduces c bit for bit
    a.a1 = cplx(c.c1.imag(), -c.c1.real());
    a.a2 = cplx(c.c2.imag(), -c.c2.real());
    a.a1_alt = -i / 2.0 * (t.R_W21 + 2.0 * t.R_V_chi_w11 + t.R_V_chibar_w20);
    a.a2_alt = -i / 6.0 * (t.R_W03 + 3.0 * t.R_V_chibar_w02_raw);
    return a;
}

inline ACoefficients a_coefficients(const ProblemSpec& p, const CriticalPoint& cp) {
    return a_from_terms(resonant_terms(p, cp));
}

enum class Verdict { InvariantCurve, FourPeriodic, Degenerate };
enum class Direction { None, Supercritical, Subcritical };
enum class Sides { None, Same, Opposite };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::InvariantCurve: return "invariant_curve";
        case Verdict::FourPeriodic: return "four_periodic";
        case Verdict::Degenerate: return "degenerate";
    }
    return "?";
}
inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::None: return "none";
        case Direction::Supercritical: return "supercritical";
        case Direction::Subcritical: return "subcritical";
    }
    return "?";
}
inline const char* to_string(Sides s) {
    switch (s) {
        case Sides::None: return "none";
        case Sides::Same: return "same";
        case Sides::Opposite: return "opposite";
    }
    return "?";
}

struct Classification {
    Verdict verdict = Verdict::Degenerate;
    Direction direction = Direction::None;
    Sides sides = Sides::None;
    /// empty unless verdict == Degenerate: "delta_zero", "re_a1_zero" or "equal_moduli"
    std::string degenerate_reason;
    /// "stable", "unstable", "at_least_one_unstable" or "both_unstable"
    std::string stability;
    /// +1: the curve exists for gamma > gamma_j, -1: for gamma < gamma_j, 0: n/a
    int curve_side = 0;
    double delta = 0.0;
    double re_a1 = 0.0;
    double modulus_gap = 0.0;  // |a1| - |a2|
    int sign_d = 0;
    double tol = 0.0;
};

inline double compute_delta(cplx a1, cplx a2, double Btot) {
    return std::abs(a1.imag() - Btot * a1.real()) - std::abs(a2) * std::sqrt(1.0 + Btot * Btot);
}

/**
 * |Re a1 + B Im a1| - |a2| sqrt(1 + B^2): the same test with the unfolding
 * direction taken as conj(mu) dmu/dgamma instead of dmu/dgamma. Fixed points of
 * the averaged flow u' = nu u + a1 |u|^2 u + a2 ubar^3, i.e. 4-periodic orbits,
 * exist exactly when this is negative. Reported next to delta as a diagnostic.
 */
inline double compute_rotated_delta(cplx a1, cplx a2, double Btot) {
    return std::abs(a1.real() + Btot * a1.imag()) - std::abs(a2) * std::sqrt(1.0 + Btot * Btot);
}

/**
 * Reads off the bifurcation type. The side on which the curve lives assumes the
 * multiplier leaves the unit disc as gamma increases when d > 0; for d < 0 the
 * side flips while super/subcriticality (the sign of Re a1) does not.
 */
inline Classification classify(cplx a1, cplx a2, double Btot, double d, double tol_deg = kDegeneracyTol) {
    Classification c;
    c.delta = compute_delta(a1, a2, Btot);
    c.re_a1 = a1.real();
    c.modulus_gap = std::abs(a1) - std::abs(a2);
    c.sign_d = (d > 0.0) - (d < 0.0);
    c.tol = tol_deg * std::max({1.0, std::abs(a1), std::abs(a2)});

    if (std::abs(c.delta) <= c.tol) {
        c.verdict = Verdict::Degenerate;
        c.degenerate_reason = "delta_zero";
        return c;
    }
    if (c.delta > 0.0) {
        if (std::abs(c.re_a1) <= c.tol) {
            c.verdict = Verdict::Degenerate;
            c.degenerate_reason = "re_a1_zero";
            return c;
        }
        c.verdict = Verdict::InvariantCurve;
        if (c.re_a1 < 0.0) {
            c.direction = Direction::Supercritical;
            c.stability = "stable";
            c.curve_side = c.sign_d;
        } else {
            c.direction = Direction::Subcritical;
            c.stability = "unstable";
            c.curve_side = -c.sign_d;
        }
        return c;
    }
    if (std::abs(c.modulus_gap) <= c.tol) {
        c.verdict = Verdict::Degenerate;
        c.degenerate_reason = "equal_moduli";
        return c;
    }
    c.verdict = Verdict::FourPeriodic;
    if (c.modulus_gap > 0.0) {
        c.sides = Sides::Same;
        c.stability = "at_least_one_unstable";
    } else {
        c.sides = Sides::Opposite;
        c.stability = "both_unstable";
    }
    return c;
}

struct ClosedForm {
    cplx a1;
    cplx a2;
    double delta = 0.0;
    Direction direction = Direction::None;
    /// T - S^2 (11B + 2) / (5B); same sign as Re a1
    double direction_margin = 0.0;
};

/// Closed-form a1, a2 and delta for x' = -gamma r(t) g(x(t-1)), g = xi + S/2 xi^2 + T/6 xi^3 + ...
inline ClosedForm closed_form_periodic(double S, double T, double Btot, double tol_deg = kDegeneracyTol) {
    const cplx i(0.0, 1.0);
    const double B = Btot;
    ClosedForm f;
    f.a1 = B / (2.0 * (i + B)) * (T - S * S * (11.0 + 2.0 * i) / 5.0);
    f.a2 = 0.0;
    f.delta = std::abs(B) / 2.0 * std::abs(T - 11.0 * S * S / 5.0);
    const double scale = tol_deg * std::max(1.0, std::abs(f.a1));
    if (std::abs(T - 11.0 * S * S / 5.0) <= scale) {
        throw DegenerateCubic("T = 11 S^2 / 5: delta vanishes and the cubic normal form is degenerate");
    }
    f.direction_margin = T - S * S * (11.0 * B + 2.0) / (5.0 * B);
    if (std::abs(f.direction_margin) <= scale) {
        f.direction = Direction::None;
    } else {
        f.direction = f.direction_margin < 0.0 ? Direction::Supercritical : Direction::Subcritical;
    }
    return f;
}

struct NormalFormReport {
    CriticalPoint cp;
    RhoCoefficients rho;
    cplx c1, c2;
    cplx a1, a2;
    cplx a1_alt, a2_alt;
    double d = 0.0;
    double Btot = 0.0;
    double delta = 0.0;
    double delta_rotated = 0.0;
    Classification verdict;
};

inline NormalFormReport analyze(const ProblemSpec& p, int j, double tol_deg = kDegeneracyTol) {
    NormalFormReport rep;
    rep.cp = critical_point(p.beta(), j);
    const ResonantTerms terms = resonant_terms(p, rep.cp);
    rep.rho = rho_from_terms(terms);
    const CCoefficients c = c_coefficients(rep.rho);
    const ACoefficients a = a_from_terms(terms);
    rep.c1 = c.c1;
    rep.c2 = c.c2;
    rep.a1 = a.a1;
    rep.a2 = a.a2;
    rep.a1_alt = a.a1_alt;
    rep.a2_alt = a.a2_alt;
    rep.d = rep.cp.d;
    rep.Btot = rep.cp.Btot;
    rep.verdict = classify(rep.a1, rep.a2, rep.Btot, rep.d, tol_deg);
    rep.delta = rep.verdict.delta;
    rep.delta_rotated = compute_rotated_delta(rep.a1, rep.a2, rep.Btot);
    return rep;
}

}  // namespace resbench
