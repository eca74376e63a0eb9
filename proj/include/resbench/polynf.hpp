#pragma once

/**
 * @file polynf.hpp
 * @brief Brute-force Poincare normal form of planar maps at mu = i.
 *
 * A planar map is written in the conjugate coordinates (z, zbar) as a
 * truncated polynomial g(z) = sum coeff[k][l] z^k zbar^l. The normal form is
 * obtained by conjugating with near-identity transforms phi(w) = w + h(w),
 *
 *   g_hat = phi^{-1} o g o phi,
 *
 * one degree at a time. At degree m the coefficient of w^k wbar^l changes by
 * (mu - mu^k mubar^l) h_kl, so every monomial with a nonzero divisor is
 * removed and the resonant ones (w^2 wbar and wbar^3 at mu = i) survive as
 * c1 and c2. Nothing here uses the closed formulas for c1, c2; the module
 * exists to check them.
 */

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "resbench/errors.hpp"
#include "resbench/grid.hpp"

namespace resbench::polynf {

/// Truncated bivariate polynomial in (w, wbar), all monomials with k + l <= degree.
class Poly {
public:
    explicit Poly(int degree = 3) : deg_(degree), c_(std::size_t((degree + 1) * (degree + 1)), cplx(0.0)) {
        if (degree < 1) throw InvalidArgument("polynomial degree must be >= 1");
    }

    static Poly identity(int degree = 3) {
        Poly p(degree);
        p.at(1, 0) = 1.0;
        return p;
    }

    int degree() const noexcept { return deg_; }

    cplx& at(int k, int l) { return c_[index(k, l)]; }
    cplx at(int k, int l) const { return c_[index(k, l)]; }

    /// Coefficient series of the conjugate function: conj(p)(w) = sum conj(c_lk) w^k wbar^l.
    Poly conj() const {
        Poly out(deg_);
        for (int k = 0; k <= deg_; ++k)
            for (int l = 0; k + l <= deg_; ++l) out.at(k, l) = std::conj(at(l, k));
        return out;
    }

    Poly& operator+=(const Poly& o) {
        check_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Poly& operator*=(cplx s) {
        for (cplx& v : c_) v *= s;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, cplx s) { return a *= s; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_same(b);
        Poly out(a.deg_);
        for (int k1 = 0; k1 <= a.deg_; ++k1)
            for (int l1 = 0; k1 + l1 <= a.deg_; ++l1) {
                const cplx x = a.at(k1, l1);
                if (x == 0.0) continue;
                for (int k2 = 0; k1 + l1 + k2 <= a.deg_; ++k2)
                    for (int l2 = 0; k1 + l1 + k2 + l2 <= a.deg_; ++l2) out.at(k1 + k2, l1 + l2) += x * b.at(k2, l2);
            }
        return out;
    }

    /// Largest coefficient modulus over monomials of total degree `m`.
    double max_at_degree(int m) const {
        double best = 0.0;
        for (int k = 0; k <= m; ++k) best = std::max(best, std::abs(at(k, m - k)));
        return best;
    }

private:
    std::size_t index(int k, int l) const {
        if (k < 0 || l < 0 || k + l > deg_) {
            throw InvalidArgument("monomial (" + std::to_string(k) + "," + std::to_string(l) +
                                  ") outside truncation degree " + std::to_string(deg_));
        }
        return std::size_t(k * (deg_ + 1) + l);
    }
    void check_same(const Poly& o) const {
        if (o.deg_ != deg_) throw InvalidArgument("polynomials of different truncation degree");
    }

    int deg_;
    std::vector<cplx> c_;
};

/// Planar map z -> g(z, zbar). Input maps have coeff(1,0) = mu, coeff(0,1) = 0 and no constant term.
struct PolyMap {
    Poly coeff{3};

    cplx mu() const { return coeff.at(1, 0); }
    int degree() const { return coeff.degree(); }

    /**
     * Builds g(z) = mu z + rho20/2 z^2 + rho11 z zbar + rho02/2 zbar^2 + rho30/6 z^3
     *             + rho21/2 z^2 zbar + rho12/2 z zbar^2 + rho03/6 zbar^3,
     * i.e. coeff[k][l] = rho_kl / (k! l!).
     */
    static PolyMap from_rho(cplx mu, cplx rho20, cplx rho11, cplx rho02, cplx rho30, cplx rho21,
                            cplx rho12, cplx rho03) {
        PolyMap g;
        g.coeff.at(1, 0) = mu;
        g.coeff.at(2, 0) = rho20 / 2.0;
        g.coeff.at(1, 1) = rho11;
        g.coeff.at(0, 2) = rho02 / 2.0;
        g.coeff.at(3, 0) = rho30 / 6.0;
        g.coeff.at(2, 1) = rho21 / 2.0;
        g.coeff.at(1, 2) = rho12 / 2.0;
        g.coeff.at(0, 3) = rho03 / 6.0;
        return g;
    }
};

/// (outer o inner)(w) = outer(inner(w), conj(inner)(w)), truncated. `inner` must have no constant term.
inline Poly compose(const Poly& outer, const Poly& inner) {
    const int d = outer.degree();
    const Poly inner_bar = inner.conj();
    std::vector<Poly> pw, pwb;
    pw.emplace_back(d);
    pwb.emplace_back(d);
    pw[0].at(0, 0) = 1.0;
    pwb[0].at(0, 0) = 1.0;
    for (int k = 1; k <= d; ++k) {
        pw.push_back(pw.back() * inner);
        pwb.push_back(pwb.back() * inner_bar);
    }
    Poly out(d);
    for (int k = 0; k <= d; ++k)
        for (int l = 0; k + l <= d; ++l) {
            const cplx c = outer.at(k, l);
            if (c != 0.0) out += (pw[std::size_t(k)] * pwb[std::size_t(l)]) * c;
        }
    return out;
}

/// Series reversion of a near-identity transform phi = id + h (h of order >= 2).
inline Poly inverse(const Poly& phi) {
    const Poly id = Poly::identity(phi.degree());
    const Poly h = phi - id;
    Poly psi = id;
    // each pass fixes one more degree
    for (int pass = 1; pass < phi.degree(); ++pass) psi = id - compose(h, psi);
    return psi;
}

/// phi^{-1} o g o phi for phi = id + h.
inline PolyMap substitute(const PolyMap& g, const Poly& h) {
    const Poly phi = Poly::identity(g.degree()) + h;
    return PolyMap{compose(inverse(phi), compose(g.coeff, phi))};
}

struct NFResult {
    cplx c1;
    cplx c2;
    /// Accumulated transform coefficients; resonant slots stay zero.
    Poly h{3};
    PolyMap transformed;
    /// max |coeff| over non-resonant monomials of degree 2 and 3 after the transform
    double residual = 0.0;
};

/// mu^k mubar^l - mu
inline cplx homological_divisor(cplx mu, int k, int l) {
    cplx m = 1.0;
    for (int a = 0; a < k; ++a) m *= mu;
    for (int a = 0; a < l; ++a) m *= std::conj(mu);
    return m - mu;
}

inline bool is_resonant_at_i(int k, int l) {
    return (k == 2 && l == 1) || (k == 0 && l == 3);
}

/// Removes the listed monomials by one near-identity conjugation.
inline std::pair<PolyMap, Poly> eliminate(const PolyMap& g, const std::vector<std::array<int, 2>>& monomials) {
    const cplx mu = g.mu();
    Poly h(g.degree());
    for (auto [k, l] : monomials) {
        const cplx div = homological_divisor(mu, k, l);
        if (std::abs(div) < 1e-12) {
            throw ResonantDivisor("monomial z^" + std::to_string(k) + " zbar^" + std::to_string(l) +
                                  " is resonant at this mu and cannot be removed");
        }
        h.at(k, l) = g.coeff.at(k, l) / div;
    }
    return {substitute(g, h), h};
}

inline NFResult normal_form(const PolyMap& g) {
    const cplx i(0.0, 1.0);
    if (std::abs(g.mu() - i) > 1e-15) throw InvalidArgument("normal_form is implemented for mu = i only");
    if (g.degree() != 3) throw InvalidArgument("normal_form expects a cubic truncation");
    if (g.coeff.at(0, 1) != 0.0 || g.coeff.at(0, 0) != 0.0) {
        throw InvalidArgument("input map must have zero constant and zbar coefficients");
    }
    for (int k = 0; k <= 3; ++k)
        for (int l = 0; k + l <= 3; ++l) {
            if (k + l < 2) continue;
            const bool vanishes = std::abs(homological_divisor(i, k, l)) < 1e-12;
            if (vanishes != is_resonant_at_i(k, l)) {
                throw ResonantDivisor("unexpected resonance pattern at mu = i");
            }
        }

    auto [g2, h2] = eliminate(g, {{2, 0}, {1, 1}, {0, 2}});
    auto [g3, h3] = eliminate(g2, {{3, 0}, {1, 2}});

    NFResult r;
    r.transformed = g3;
    r.h = h2 + h3;
    r.c1 = g3.coeff.at(2, 1);
    r.c2 = g3.coeff.at(0, 3);
    for (int k = 0; k <= 3; ++k)
        for (int l = 0; k + l <= 3; ++l) {
            if (k + l >= 2 && !is_resonant_at_i(k, l)) r.residual = std::max(r.residual, std::abs(g3.coeff.at(k, l)));
        }
    return r;
}

}  // namespace resbench::polynf
