#pragma once

/**
 * @file floquet.hpp
 * @brief Spectrum of the monodromy operator U(phi)(t) = phi(0) + int_{-1}^t b phi.
 *
 * Floquet exponents are the roots of lambda e^lambda = gamma beta, multipliers
 * are mu = e^lambda and the eigenfunction of mu is chi_mu(t) = e^{B(t)/mu}.
 * The resolvent (zI - U)^{-1} has a closed form because U is a Volterra
 * operator plus a rank-one term; the spectral functional R_mu gives the
 * coordinate along chi_mu of the rank-one spectral projection.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "resbench/errors.hpp"
#include "resbench/grid.hpp"
#include "resbench/problem.hpp"

namespace resbench {

inline constexpr double kNearSpectrumTol = 1e-9;
inline constexpr double kSimpleRootTol = 1e-6;
inline constexpr int kNewtonMaxIter = 100;

struct FloquetExponent {
    cplx lambda;
    cplx mu;
    bool simple = true;
};

struct FloquetDatum {
    cplx mu;
    cplx lambda;
    GridFunction chi;
    bool simple = true;
};

struct CriticalPoint {
    int j = 0;
    double gamma_j = 0.0;
    cplx mu{0.0, 1.0};
    double Btot = 0.0;
    cplx dmu_dgamma;
    /// d|mu|/dgamma at gamma_j
    double d = 0.0;
};

namespace detail {

/// Newton on h(lambda) = lambda - B e^{-lambda}; returns false on failure.
inline bool newton_lambert(cplx B, cplx& lambda) {
    const double scale = std::max(1.0, std::abs(B));
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        const cplx e = std::exp(-lambda);
        const cplx h = lambda - B * e;
        const cplx dh = 1.0 + B * e;
        if (!std::isfinite(std::abs(h))) return false;
        if (std::abs(lambda * std::exp(lambda) - B) <= 1e-14 * scale) break;
        if (std::abs(dh) == 0.0) return false;
        const cplx step = h / dh;
        lambda -= step;
        if (std::abs(lambda * std::exp(lambda) - B) <= 1e-14 * scale ||
            std::abs(step) <= 1e-15 * (1.0 + std::abs(lambda))) {
            break;
        }
    }
    return std::isfinite(std::abs(lambda)) && std::abs(lambda * std::exp(lambda) - B) <= 1e-12 * scale;
}

}  // namespace detail

/**
 * The `count` roots of lambda e^lambda = Btot with the largest real parts,
 * sorted by descending real part (ties by descending imaginary part).
 *
 * Branch k is seeded with L - ln L, L = ln(Btot) + 2 pi i k. Near the branch
 * point -1/e extra seeds -1 +- sqrt(2(1 + e Btot)) pick up the principal pair.
 */
inline std::vector<FloquetExponent> floquet_exponents(cplx Btot, std::size_t count) {
    if (std::abs(Btot) == 0.0) throw InvalidArgument("floquet_exponents: Btot must be nonzero");
    std::vector<cplx> roots;
    auto add_root = [&roots](cplx r) {
        for (const cplx& q : roots) {
            if (std::abs(q - r) <= 1e-6 * (1.0 + std::abs(r))) return;
        }
        roots.push_back(r);
    };

    const long branches = static_cast<long>(count) + 3;
    for (long k = -branches; k <= branches; ++k) {
        const cplx L = std::log(Btot) + cplx(0.0, 2.0 * std::numbers::pi * double(k));
        cplx lambda = std::abs(L) > 0.0 ? L - std::log(L) : L;
        if (!detail::newton_lambert(Btot, lambda)) {
            throw NoConvergence("Newton failed on branch " + std::to_string(k) +
                                " of lambda e^lambda = Btot");
        }
        add_root(lambda);
    }
    const cplx p = std::sqrt(2.0 * (1.0 + std::numbers::e * Btot));
    for (cplx seed : {cplx(-1.0) + p, cplx(-1.0) - p, Btot}) {
        if (detail::newton_lambert(Btot, seed)) add_root(seed);
    }

    if (Btot.imag() == 0.0) {
        // real problems: make the root set exactly conjugation-closed
        std::vector<cplx> sym;
        for (const cplx& r : roots) {
            if (std::abs(r.imag()) <= 1e-6 * (1.0 + std::abs(r))) {
                // near the double root at -1/e Newton stalls slightly off the axis
                cplx on_axis(r.real(), 0.0);
                if (detail::newton_lambert(Btot, on_axis) && on_axis.imag() == 0.0) {
                    sym.push_back(on_axis);
                    continue;
                }
            }
            const cplx upper(r.real(), std::abs(r.imag()));
            sym.push_back(upper);
            if (upper.imag() != 0.0) sym.push_back(std::conj(upper));
        }
        roots = std::move(sym);
        std::vector<cplx> unique;
        for (const cplx& r : roots) {
            bool dup = false;
            for (const cplx& q : unique) dup = dup || std::abs(q - r) <= 1e-6 * (1.0 + std::abs(r));
            if (!dup) unique.push_back(r);
        }
        roots = std::move(unique);
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });

    std::vector<FloquetExponent> out;
    for (std::size_t i = 0; i < std::min(count, roots.size()); ++i) {
        const cplx l = roots[i];
        out.push_back({l, std::exp(l), std::abs(1.0 + l) > kSimpleRootTol});
    }
    return out;
}

/// chi_mu(t) = e^{B(t)/mu}
inline GridFunction eigenfunction(const DerivedLinearData& data, cplx mu) {
    return data.B.map([mu](cplx v) { return std::exp(v / mu); });
}

inline std::vector<FloquetDatum> floquet_data(const DerivedLinearData& data, std::size_t count) {
    std::vector<FloquetDatum> out;
    for (const auto& e : floquet_exponents(cplx(data.Btot), count)) {
        out.push_back({e.mu, e.lambda, eigenfunction(data, e.mu), e.simple});
    }
    return out;
}

/// U(phi)(t) = phi(0) + int_{-1}^t b(s) phi(s) ds
inline GridFunction monodromy_apply(const DerivedLinearData& data, const GridFunction& phi) {
    return cumulative(data.b * phi) + phi.back();
}

/// Delta(z) = z - e^{gamma beta / z}; multipliers are its zeros.
inline cplx characteristic_delta(double Btot, cplx z) {
    return z - std::exp(Btot / z);
}

/**
 * Solves (zI - U) x = psi.
 *
 * With E(t) = e^{B(t)/z} and I(t) = int_{-1}^t E^{-1} b psi / z, the defining
 * relation z x = x(0) + int b x + psi integrates to
 *   x(0) = (psi(0) + E(0) I(0)) / (z - E(0)),
 *   x(t) = (x(0) E(t) + E(t) I(t) + psi(t)) / z.
 */
inline GridFunction resolvent_apply(const DerivedLinearData& data, cplx z, const GridFunction& psi) {
    const cplx delta = z == 0.0 ? cplx(0.0) : characteristic_delta(data.Btot, z);
    if (z == 0.0 || std::abs(delta) <= kNearSpectrumTol) {
        throw NearSpectrum("resolvent requested at z = (" + std::to_string(z.real()) + ", " +
                           std::to_string(z.imag()) + "), |Delta(z)| = " + std::to_string(std::abs(delta)));
    }
    const GridFunction E = data.B.map([z](cplx v) { return std::exp(v / z); });
    const GridFunction Einv = data.B.map([z](cplx v) { return std::exp(-v / z); });
    const GridFunction I = cumulative(Einv * data.b * psi) * (1.0 / z);
    const cplx E0 = E.back();
    const cplx x0 = (psi.back() + E0 * I.back()) / (z - E0);
    return (E * x0 + E * I + psi) * (1.0 / z);
}

/// R_mu(psi) = (psi(0) + int b psi / chi_mu) / (mu + gamma beta)
inline cplx spectral_functional(const DerivedLinearData& data, cplx mu, const GridFunction& psi) {
    const cplx denom = mu + data.Btot;
    if (std::abs(denom) < 1e-12) {
        throw DegenerateDenominator("mu + gamma beta vanishes; mu is not a simple multiplier");
    }
    const GridFunction inv_chi = data.B.map([mu](cplx v) { return std::exp(-v / mu); });
    return (psi.back() + integrate(data.b * psi * inv_chi)) / denom;
}

inline GridFunction spectral_projection(const DerivedLinearData& data, cplx mu, const GridFunction& psi) {
    return eigenfunction(data, mu) * spectral_functional(data, mu, psi);
}

inline CriticalPoint critical_point(double beta, int j) {
    if (std::abs(beta) < kBetaZeroTol) throw BetaZero("beta vanishes");
    CriticalPoint cp;
    cp.j = j;
    cp.Btot = -std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * double(j);
    cp.gamma_j = cp.Btot / beta;
    cp.mu = cplx(0.0, 1.0);
    const double B = cp.Btot;
    cp.dmu_dgamma = beta / (1.0 + B * B) * cplx(1.0, B);
    cp.d = beta * B / (1.0 + B * B);
    return cp;
}

inline std::vector<CriticalPoint> critical_points(const ProblemSpec& p, const std::vector<int>& js) {
    std::vector<CriticalPoint> out;
    out.reserve(js.size());
    for (int j : js) out.push_back(critical_point(p.beta(), j));
    return out;
}

/// Newton-continues a root of z = e^{gamma beta / z} from `seed`.
inline cplx track_multiplier(double beta, double gamma, cplx seed) {
    const double B = gamma * beta;
    cplx z = seed;
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        const cplx e = std::exp(B / z);
        const cplx f = z - e;
        const cplx df = 1.0 + B / (z * z) * e;
        const cplx step = f / df;
        z -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(characteristic_delta(B, z)) > 1e-12) {
        throw NoConvergence("multiplier tracking did not converge at gamma = " + std::to_string(gamma));
    }
    return z;
}

}  // namespace resbench
