#pragma once

/**
 * @file problem.hpp
 * @brief Scalar periodic delay equations x'(t) = gamma * f(t, x(t-1)) with
 *        delay and period both equal to one.
 *
 * Two families are supported:
 *
 *   General               f(t, xi) = sum_p c_p(t) xi^p,  p >= 1
 *   PeriodicCoefficient   f(t, xi) = -r(t) g(xi),  g(xi) = xi + S/2 xi^2 + T/6 xi^3
 *                         or g(xi) = e^xi - 1 (S = T = 1)
 *
 * Coefficient functions are real trigonometric polynomials in 2*pi*k*t, so
 * f(t+1, .) = f(t, .) holds by construction and f(t, 0) = 0 because no p = 0
 * term exists.
 */

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "resbench/errors.hpp"
#include "resbench/grid.hpp"

namespace resbench {

inline constexpr double kBetaZeroTol = 1e-12;

/// dc + sum_k cos[k-1] cos(2 pi k t) + sin[k-1] sin(2 pi k t)
struct TrigPoly {
    double dc = 0.0;
    std::vector<double> cos;
    std::vector<double> sin;

    std::size_t order() const noexcept { return std::max(cos.size(), sin.size()); }

    double operator()(double t) const {
        double v = dc;
        for (std::size_t k = 0; k < cos.size(); ++k) v += cos[k] * std::cos(2.0 * std::numbers::pi * double(k + 1) * t);
        for (std::size_t k = 0; k < sin.size(); ++k) v += sin[k] * std::sin(2.0 * std::numbers::pi * double(k + 1) * t);
        return v;
    }

    /// Exact antiderivative from -1, i.e. the integral of the polynomial over [-1, t].
    double integral_from_minus_one(double t) const {
        if (t == -1.0) return 0.0;
        double v = dc * (t + 1.0);
        for (std::size_t k = 0; k < cos.size(); ++k) {
            const double w = 2.0 * std::numbers::pi * double(k + 1);
            v += cos[k] * std::sin(w * t) / w;
        }
        for (std::size_t k = 0; k < sin.size(); ++k) {
            const double w = 2.0 * std::numbers::pi * double(k + 1);
            v += sin[k] * (1.0 - std::cos(w * t)) / w;
        }
        return v;
    }

    GridFunction tabulate(std::size_t n) const {
        return GridFunction::sample(n, [this](double t) { return (*this)(t); });
    }
};

struct PowerTerm {
    int power = 1;
    TrigPoly coeff;
};

enum class ProblemKind { General, PeriodicCoefficient };
enum class NonlinearityForm { Cubic, Expm1 };

/// g with g(0) = 0, g'(0) = 1.
struct Nonlinearity {
    NonlinearityForm form = NonlinearityForm::Cubic;
    double S = 0.0;
    double T = 0.0;

    static Nonlinearity cubic(double s, double t) { return {NonlinearityForm::Cubic, s, t}; }
    static Nonlinearity expm1() { return {NonlinearityForm::Expm1, 1.0, 1.0}; }

    double operator()(double xi) const {
        if (form == NonlinearityForm::Expm1) return std::expm1(xi);
        return xi + 0.5 * S * xi * xi + T / 6.0 * xi * xi * xi;
    }
};

class ProblemSpec {
public:
    static ProblemSpec general(std::vector<PowerTerm> terms, double gamma,
                               std::size_t grid_n = kDefaultGridN) {
        ProblemSpec p;
        p.kind_ = ProblemKind::General;
        p.terms_ = std::move(terms);
        p.gamma_ = gamma;
        p.grid_n_ = grid_n;
        p.validate();
        return p;
    }

    static ProblemSpec periodic_coefficient(TrigPoly r, Nonlinearity g, double gamma,
                                            std::size_t grid_n = kDefaultGridN) {
        ProblemSpec p;
        p.kind_ = ProblemKind::PeriodicCoefficient;
        p.r_ = std::move(r);
        p.g_ = g;
        p.gamma_ = gamma;
        p.grid_n_ = grid_n;
        p.validate();
        return p;
    }

    ProblemKind kind() const noexcept { return kind_; }
    double gamma() const noexcept { return gamma_; }
    std::size_t grid_n() const noexcept { return grid_n_; }
    const std::vector<PowerTerm>& terms() const noexcept { return terms_; }
    const TrigPoly& r() const noexcept { return r_; }
    const Nonlinearity& g() const noexcept { return g_; }

    ProblemSpec with_gamma(double gamma) const {
        ProblemSpec p = *this;
        p.gamma_ = gamma;
        return p;
    }

    ProblemSpec with_grid(std::size_t n) const {
        ProblemSpec p = *this;
        p.grid_n_ = n;
        p.validate();
        return p;
    }

    /// beta = integral of f_xi(t, 0) over one period.
    double beta() const {
        if (kind_ == ProblemKind::PeriodicCoefficient) return -r_.dc;
        const TrigPoly* c1 = coefficient(1);
        return c1 ? c1->dc : 0.0;
    }

    /// The coefficient of xi^p, or null when the term is absent.
    const TrigPoly* coefficient(int p) const {
        for (const auto& term : terms_) {
            if (term.power == p) return &term.coeff;
        }
        return nullptr;
    }

    /// d^order f / d xi^order at (t, 0) for order 1..3.
    double xi_partial(int order, double t) const {
        if (kind_ == ProblemKind::PeriodicCoefficient) {
            const double scale = order == 1 ? 1.0 : order == 2 ? g_.S : g_.T;
            return -scale * r_(t);
        }
        const TrigPoly* c = coefficient(order);
        if (!c) return 0.0;
        const double factorial = order == 1 ? 1.0 : order == 2 ? 2.0 : 6.0;
        return factorial * (*c)(t);
    }

    GridFunction tabulate_partial(int order) const {
        return GridFunction::sample(grid_n_, [&](double t) { return xi_partial(order, t); });
    }

    /// Integral of f_xi(s, 0) over [-1, t], evaluated in closed form.
    double linear_antiderivative(double t) const {
        if (kind_ == ProblemKind::PeriodicCoefficient) return -r_.integral_from_minus_one(t);
        const TrigPoly* c1 = coefficient(1);
        return c1 ? c1->integral_from_minus_one(t) : 0.0;
    }

    double f(double t, double xi) const {
        if (kind_ == ProblemKind::PeriodicCoefficient) return -r_(t) * g_(xi);
        double v = 0.0;
        for (const auto& term : terms_) v += term.coeff(t) * std::pow(xi, term.power);
        return v;
    }

    /// True when the second and third xi-partials vanish identically.
    bool is_linear() const {
        if (kind_ == ProblemKind::PeriodicCoefficient) return false;
        for (const auto& term : terms_) {
            if (term.power != 1) return false;
        }
        return true;
    }

private:
    ProblemSpec() = default;

    void validate() const {
        if (!std::isfinite(gamma_)) throw InvalidArgument("gamma must be finite");
        if (grid_n_ < 4 || grid_n_ % 2 != 0) {
            throw InvalidArgument("grid_n must be an even integer >= 4, got " + std::to_string(grid_n_));
        }
        auto check_trig = [this](const TrigPoly& c, const std::string& what) {
            if (8 * c.order() > grid_n_) {
                throw InvalidArgument(what + ": trigonometric order " + std::to_string(c.order()) +
                                      " exceeds grid_n/8");
            }
        };
        if (kind_ == ProblemKind::General) {
            if (terms_.empty()) throw InvalidArgument("general problem needs at least one power term");
            for (std::size_t i = 0; i < terms_.size(); ++i) {
                if (terms_[i].power < 1) {
                    throw InvalidArgument("power must be >= 1 (f(t,0) = 0), got " +
                                          std::to_string(terms_[i].power));
                }
                for (std::size_t j = 0; j < i; ++j) {
                    if (terms_[j].power == terms_[i].power) {
                        throw InvalidArgument("duplicate power " + std::to_string(terms_[i].power));
                    }
                }
                check_trig(terms_[i].coeff, "coefficient of power " + std::to_string(terms_[i].power));
            }
        } else {
            check_trig(r_, "r");
            if (g_.form == NonlinearityForm::Expm1 && (g_.S != 1.0 || g_.T != 1.0)) {
                throw InvalidArgument("expm1 nonlinearity fixes S = T = 1");
            }
        }
        if (std::abs(beta()) < kBetaZeroTol) {
            throw BetaZero("beta = " + std::to_string(beta()) +
                           " vanishes; the linear part has no mean and the analysis is undefined");
        }
    }

    ProblemKind kind_ = ProblemKind::General;
    std::vector<PowerTerm> terms_;
    TrigPoly r_;
    Nonlinearity g_;
    double gamma_ = 0.0;
    std::size_t grid_n_ = kDefaultGridN;
};

/// b(t) = gamma f_xi(t, 0) on the grid, its running integral B(t), and B(0) = gamma beta.
struct DerivedLinearData {
    double gamma = 0.0;
    double beta = 0.0;
    GridFunction b;
    GridFunction B;
    double Btot = 0.0;

    std::size_t grid_n() const noexcept { return b.intervals(); }
};

inline DerivedLinearData derived_linear_data(const ProblemSpec& p) {
    const double beta = p.beta();
    if (std::abs(beta) < kBetaZeroTol) throw BetaZero("beta vanishes");
    const double gamma = p.gamma();
    DerivedLinearData d;
    d.gamma = gamma;
    d.beta = beta;
    d.b = GridFunction::sample(p.grid_n(), [&](double t) { return gamma * p.xi_partial(1, t); });
    // B is exact for trigonometric coefficients; B(-1) = 0 and B(0) = gamma beta up to rounding
    d.B = GridFunction::sample(p.grid_n(), [&](double t) { return gamma * p.linear_antiderivative(t); });
    d.Btot = gamma * beta;
    return d;
}

}  // namespace resbench
