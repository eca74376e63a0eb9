#pragma once

/**
 * @file grid.hpp
 * @brief Complex grid functions on [-1, 0] and the quadrature built on them.
 *
 * A GridFunction holds samples at the uniform nodes t_k = -1 + k/N,
 * k = 0..N, with N even. Every linear operator in the library (monodromy,
 * resolvent, multilinear forms) reduces to pointwise arithmetic plus the
 * cumulative integral defined here, so the accuracy of the whole pipeline is
 * set by this file:
 *
 *   integrate   composite Simpson, O(N^-4)
 *   cumulative  per-interval integral of the 4-point Lagrange cubic, O(N^-4)
 *               at every node (Simpson alone only reaches even nodes)
 *   eval_at     4-point Lagrange interpolation, exact for cubics
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "resbench/errors.hpp"

namespace resbench {

using cplx = std::complex<double>;

inline constexpr std::size_t kDefaultGridN = 4096;

class GridFunction {
public:
    GridFunction() = default;

    GridFunction(std::size_t n, std::vector<cplx> values) : n_(n), values_(std::move(values)) {
        if (n_ < 4 || n_ % 2 != 0) {
            throw InvalidArgument("grid node count N must be an even integer >= 4, got " +
                                  std::to_string(n_));
        }
        if (values_.size() != n_ + 1) {
            throw InvalidArgument("grid function needs N+1 = " + std::to_string(n_ + 1) +
                                  " samples, got " + std::to_string(values_.size()));
        }
        for (const cplx& v : values_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw DomainError("grid function sample is not finite");
            }
        }
    }

    template <class F>
    static GridFunction sample(std::size_t n, F&& f) {
        std::vector<cplx> v(n + 1);
        for (std::size_t k = 0; k <= n; ++k) v[k] = cplx(f(node(n, k)));
        return GridFunction(n, std::move(v));
    }

    static GridFunction constant(std::size_t n, cplx c) {
        return GridFunction(n, std::vector<cplx>(n + 1, c));
    }

    static double node(std::size_t n, std::size_t k) {
        return -1.0 + static_cast<double>(k) / static_cast<double>(n);
    }

    std::size_t intervals() const noexcept { return n_; }
    double step() const noexcept { return 1.0 / static_cast<double>(n_); }
    double node(std::size_t k) const noexcept { return node(n_, k); }

    std::span<const cplx> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    const cplx& operator[](std::size_t k) const noexcept { return values_[k]; }

    /// Value at t = -1.
    cplx front() const noexcept { return values_.front(); }
    /// Value at t = 0.
    cplx back() const noexcept { return values_.back(); }

    double sup_norm() const noexcept {
        double m = 0.0;
        for (const cplx& v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    double max_imag() const noexcept {
        double m = 0.0;
        for (const cplx& v : values_) m = std::max(m, std::abs(v.imag()));
        return m;
    }

    template <class F>
    GridFunction map(F&& f) const {
        std::vector<cplx> v(values_.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = cplx(f(values_[k]));
        return GridFunction(n_, std::move(v));
    }

    GridFunction conj() const {
        return map([](cplx v) { return std::conj(v); });
    }

    GridFunction real_part() const {
        return map([](cplx v) { return cplx(v.real(), 0.0); });
    }

    GridFunction& operator+=(const GridFunction& o) { return combine(o, [](cplx a, cplx b) { return a + b; }); }
    GridFunction& operator-=(const GridFunction& o) { return combine(o, [](cplx a, cplx b) { return a - b; }); }
    GridFunction& operator*=(const GridFunction& o) { return combine(o, [](cplx a, cplx b) { return a * b; }); }
    GridFunction& operator/=(const GridFunction& o) { return combine(o, [](cplx a, cplx b) { return a / b; }); }

    GridFunction& operator*=(cplx s) {
        for (cplx& v : values_) v *= s;
        return *this;
    }
    GridFunction& operator+=(cplx s) {
        for (cplx& v : values_) v += s;
        return *this;
    }

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
    friend GridFunction operator/(GridFunction a, const GridFunction& b) { return a /= b; }
    friend GridFunction operator*(GridFunction a, cplx s) { return a *= s; }
    friend GridFunction operator*(cplx s, GridFunction a) { return a *= s; }
    friend GridFunction operator+(GridFunction a, cplx s) { return a += s; }
    friend GridFunction operator-(GridFunction a, cplx s) { return a += -s; }
    friend GridFunction operator-(GridFunction a) { return a *= cplx(-1.0); }

private:
    template <class Op>
    GridFunction& combine(const GridFunction& o, Op op) {
        if (o.n_ != n_) {
            throw InvalidArgument("grid functions on different grids (N=" + std::to_string(n_) +
                                  " vs N=" + std::to_string(o.n_) + ")");
        }
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] = op(values_[k], o.values_[k]);
        return *this;
    }

    std::size_t n_ = 0;
    std::vector<cplx> values_;
};

/// Sup-norm of the difference, over nodes.
inline double sup_distance(const GridFunction& a, const GridFunction& b) {
    return (a - b).sup_norm();
}

/// Composite Simpson approximation of the integral over [-1, 0].
inline cplx integrate(const GridFunction& g) {
    const std::size_t n = g.intervals();
    cplx odd = 0.0, even = 0.0;
    for (std::size_t k = 1; k < n; k += 2) odd += g[k];
    for (std::size_t k = 2; k < n; k += 2) even += g[k];
    return g.step() / 3.0 * (g.front() + 4.0 * odd + 2.0 * even + g.back());
}

/// Node k of the result holds the integral of g from -1 to t_k.
inline GridFunction cumulative(const GridFunction& g) {
    const std::size_t n = g.intervals();
    const double w = g.step() / 24.0;
    std::vector<cplx> out(n + 1);
    out[0] = 0.0;
    // one-sided stencils on the boundary intervals, centred ones inside
    out[1] = w * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
    for (std::size_t k = 1; k + 2 <= n; ++k) {
        out[k + 1] = out[k] + w * (-g[k - 1] + 13.0 * g[k] + 13.0 * g[k + 1] - g[k + 2]);
    }
    out[n] = out[n - 1] + w * (g[n - 3] - 5.0 * g[n - 2] + 19.0 * g[n - 1] + 9.0 * g[n]);
    return GridFunction(n, std::move(out));
}

/// Cubic interpolation through the four nearest nodes. Exact at nodes.
inline cplx eval_at(const GridFunction& g, double t) {
    if (!(t >= -1.0 && t <= 0.0)) {
        throw DomainError("eval_at: t = " + std::to_string(t) + " is outside [-1, 0]");
    }
    const std::size_t n = g.intervals();
    const double x = (t + 1.0) * static_cast<double>(n);
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < 1e-12) return g[static_cast<std::size_t>(nearest)];

    const auto k = std::min(static_cast<std::size_t>(x), n - 1);
    const std::size_t s = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(k) - 1, 0,
                                                     static_cast<std::ptrdiff_t>(n) - 3);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        double li = 1.0;
        for (std::size_t j = 0; j < 4; ++j) {
            if (j != i) li *= (x - double(s + j)) / (double(s + i) - double(s + j));
        }
        acc += li * g[s + i];
    }
    return acc;
}

}  // namespace resbench
