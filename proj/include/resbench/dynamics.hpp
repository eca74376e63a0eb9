#pragma once

/**
 * @file dynamics.hpp
 * @brief Exact iteration of the time-one map and empirical attractor detection.
 *
 * Because the delay equals the period, one period of the solution is an
 * explicit integral of the previous segment:
 *
 *   F(phi)(t) = phi(0) + int_{-1}^t gamma f(s, phi(s)) ds,
 *
 * so iterating F needs no ODE stepper; quadrature error is the only error.
 * Trajectories are observed through the planar coordinate z = R_i(phi) of the
 * critical point they are launched from.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <numbers>
#include <string>
#include <vector>

#include "resbench/errors.hpp"
#include "resbench/floquet.hpp"
#include "resbench/grid.hpp"
#include "resbench/normalform.hpp"
#include "resbench/problem.hpp"

namespace resbench {

inline constexpr double kOverflowBound = 1e6;

/// Time-one map with the coefficient functions tabulated once on the grid.
class TimeOneMap {
public:
    TimeOneMap(const ProblemSpec& p, double gamma) : kind_(p.kind()), gamma_(gamma), n_(p.grid_n()), g_(p.g()) {
        const auto nodes = n_ + 1;
        if (kind_ == ProblemKind::PeriodicCoefficient) {
            r_.resize(nodes);
            for (std::size_t k = 0; k < nodes; ++k) r_[k] = p.r()(GridFunction::node(n_, k));
        } else {
            for (const auto& term : p.terms()) {
                powers_.push_back(term.power);
                std::vector<double> c(nodes);
                for (std::size_t k = 0; k < nodes; ++k) c[k] = term.coeff(GridFunction::node(n_, k));
                coeffs_.push_back(std::move(c));
            }
        }
    }

    double gamma() const noexcept { return gamma_; }

    GridFunction operator()(const GridFunction& phi) const {
        if (phi.intervals() != n_) throw InvalidArgument("state lives on a different grid");
        if (phi.max_imag() > 1e-14 * std::max(1.0, phi.sup_norm())) {
            throw InvalidArgument("time-one map expects a real-valued state");
        }
        if (phi.sup_norm() > kOverflowBound) {
            throw Overflow("state sup-norm exceeds " + std::to_string(kOverflowBound));
        }
        std::vector<cplx> rhs(n_ + 1);
        for (std::size_t k = 0; k <= n_; ++k) rhs[k] = gamma_ * f_at(k, phi[k].real());
        return cumulative(GridFunction(n_, std::move(rhs))) + cplx(phi.back().real());
    }

private:
    double f_at(std::size_t k, double xi) const {
        if (kind_ == ProblemKind::PeriodicCoefficient) return -r_[k] * g_(xi);
        double v = 0.0;
        for (std::size_t i = 0; i < powers_.size(); ++i) v += coeffs_[i][k] * std::pow(xi, powers_[i]);
        return v;
    }

    ProblemKind kind_;
    double gamma_;
    std::size_t n_;
    Nonlinearity g_;
    std::vector<double> r_;
    std::vector<int> powers_;
    std::vector<std::vector<double>> coeffs_;
};

inline GridFunction time_one_map(const ProblemSpec& p, double gamma, const GridFunction& phi) {
    return TimeOneMap(p, gamma)(phi);
}

/// z = R_i(phi) for the critical point cp.
inline cplx project_state(const ProblemSpec& p, const GridFunction& phi, const CriticalPoint& cp) {
    return spectral_functional(derived_linear_data(p.with_gamma(cp.gamma_j)), cp.mu, phi);
}

enum class AttractorKind { FixedPointZero, InvariantCurve, FourPeriodic, Diverged, Inconclusive };

inline const char* to_string(AttractorKind k) {
    switch (k) {
        case AttractorKind::FixedPointZero: return "fixed_point_zero";
        case AttractorKind::InvariantCurve: return "invariant_curve";
        case AttractorKind::FourPeriodic: return "four_periodic";
        case AttractorKind::Diverged: return "diverged";
        case AttractorKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct DetectOptions {
    double ic_amplitude = 0.05;
    int n_transient = 1000;
    int n_collect = 1000;
};

struct AttractorReport {
    AttractorKind kind = AttractorKind::Inconclusive;
    double gamma = 0.0;
    /// mean |z| over the collected iterates
    double amplitude = 0.0;
    double tail_amplitude = 0.0;  // mean |z| over the last 100 iterates
    double radial_rel_dev = 0.0;
    double angular_coverage = 0.0;  // of 4 arg z, radians
    double rotation_mean = 0.0;
    double rotation_std = 0.0;
    std::vector<double> cluster_diameters;
    int iterates_used = 0;
    std::vector<cplx> z;
    std::vector<double> sup_norm;
    GridFunction final_state;
};

namespace detail {

/// Lloyd iterations seeded with the first four points; returns per-cluster diameters.
inline std::vector<double> four_cluster_diameters(const std::vector<cplx>& pts) {
    std::vector<cplx> centers(pts.begin(), pts.begin() + 4);
    std::vector<int> label(pts.size(), 0);
    for (int it = 0; it < 100; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            int best = 0;
            for (int c = 1; c < 4; ++c) {
                if (std::abs(pts[i] - centers[std::size_t(c)]) < std::abs(pts[i] - centers[std::size_t(best)])) best = c;
            }
            changed = changed || best != label[i];
            label[i] = best;
        }
        std::vector<cplx> sum(4, 0.0);
        std::vector<int> cnt(4, 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            sum[std::size_t(label[i])] += pts[i];
            ++cnt[std::size_t(label[i])];
        }
        for (std::size_t c = 0; c < 4; ++c) {
            if (cnt[c] > 0) centers[c] = sum[c] / double(cnt[c]);
        }
        if (!changed && it > 0) break;
    }
    std::vector<double> diam(4, 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (label[i] == label[j]) {
                auto& d = diam[std::size_t(label[i])];
                d = std::max(d, std::abs(pts[i] - pts[j]));
            }
        }
    return diam;
}

/// 2 pi minus the largest gap between sorted angles.
inline double angular_coverage(std::vector<double> angles) {
    if (angles.size() < 2) return 0.0;
    for (double& a : angles) a = std::remainder(a, 2.0 * std::numbers::pi);
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
    return 2.0 * std::numbers::pi - gap;
}

}  // namespace detail

/**
 * Iterates F from ic_amplitude * Re chi_i, drops the transient and classifies:
 *   (a) mean |z| of the last 100 iterates < 1e-8              -> FixedPointZero
 *   (b) 4-means clusters all narrower than 1e-6 max(1, amp)   -> FourPeriodic
 *   (c) std|z| / mean|z| < 0.5 and 4 arg z covers > 3 rad     -> InvariantCurve
 * otherwise Inconclusive; an escaping state is Diverged.
 */
inline AttractorReport iterate_and_detect(const ProblemSpec& p, double gamma, const CriticalPoint& cp,
                                          const DetectOptions& opt = {}) {
    if (opt.n_transient < 200 || opt.n_collect < 400) {
        throw InvalidArgument("iterate_and_detect needs n_transient >= 200 and n_collect >= 400");
    }
    const DerivedLinearData crit = derived_linear_data(p.with_gamma(cp.gamma_j));
    const GridFunction chi = eigenfunction(crit, cp.mu);
    const TimeOneMap F(p, gamma);

    AttractorReport rep;
    rep.gamma = gamma;
    GridFunction phi = chi.real_part() * cplx(opt.ic_amplitude);
    try {
        for (int n = 0; n < opt.n_transient; ++n) phi = F(phi);
        for (int n = 0; n < opt.n_collect; ++n) {
            phi = F(phi);
            rep.z.push_back(spectral_functional(crit, cp.mu, phi));
            rep.sup_norm.push_back(phi.sup_norm());
        }
    } catch (const Overflow&) {
        rep.kind = AttractorKind::Diverged;
        rep.iterates_used = int(rep.z.size());
        return rep;
    } catch (const DomainError&) {
        rep.kind = AttractorKind::Diverged;
        rep.iterates_used = int(rep.z.size());
        return rep;
    }
    rep.final_state = phi;
    rep.iterates_used = int(rep.z.size());

    const std::size_t m = rep.z.size();
    double sum = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += std::abs(rep.z[i]);
    for (std::size_t i = m - 100; i < m; ++i) tail += std::abs(rep.z[i]);
    rep.amplitude = sum / double(m);
    rep.tail_amplitude = tail / 100.0;

    double var = 0.0;
    for (const cplx& z : rep.z) var += std::pow(std::abs(z) - rep.amplitude, 2);
    rep.radial_rel_dev = rep.amplitude > 0.0 ? std::sqrt(var / double(m)) / rep.amplitude : 0.0;

    std::vector<double> incr;
    for (std::size_t i = 1; i < m; ++i) {
        if (rep.z[i - 1] != 0.0) incr.push_back(std::arg(rep.z[i] / rep.z[i - 1]));
    }
    if (!incr.empty()) {
        double s = 0.0, s2 = 0.0;
        for (double v : incr) s += v;
        rep.rotation_mean = s / double(incr.size());
        for (double v : incr) s2 += (v - rep.rotation_mean) * (v - rep.rotation_mean);
        rep.rotation_std = std::sqrt(s2 / double(incr.size()));
    }

    std::vector<double> fourth;
    for (const cplx& z : rep.z) fourth.push_back(4.0 * std::arg(z));
    rep.angular_coverage = detail::angular_coverage(fourth);

    if (rep.tail_amplitude < 1e-8) {
        rep.kind = AttractorKind::FixedPointZero;
        return rep;
    }
    rep.cluster_diameters = detail::four_cluster_diameters(rep.z);
    const double max_diam = *std::max_element(rep.cluster_diameters.begin(), rep.cluster_diameters.end());
    if (max_diam < 1e-6 * std::max(1.0, rep.amplitude)) {
        rep.kind = AttractorKind::FourPeriodic;
    } else if (rep.radial_rel_dev < 0.5 && rep.angular_coverage > 3.0) {
        rep.kind = AttractorKind::InvariantCurve;
    } else {
        rep.kind = AttractorKind::Inconclusive;
    }
    return rep;
}

/// sup |F^4(phi) - phi|; small for a point on a 4-periodic orbit.
inline double four_return_residual(const ProblemSpec& p, double gamma, const GridFunction& phi) {
    const TimeOneMap F(p, gamma);
    GridFunction x = phi;
    for (int i = 0; i < 4; ++i) x = F(x);
    return sup_distance(x, phi);
}

struct ScalingPoint {
    double eps = 0.0;
    double gamma = 0.0;
    double amplitude = 0.0;
    double ratio = 0.0;  // amplitude / sqrt(eps), 0 at eps = 0
    AttractorKind kind = AttractorKind::Inconclusive;
};

/**
 * Amplitude of the attractor at gamma_j + sign(d) eps for each eps. Requires a
 * supercritical invariant-curve verdict; the runs are independent and are
 * launched concurrently.
 */
inline std::vector<ScalingPoint> amplitude_scaling(const ProblemSpec& p, int j, const std::vector<double>& eps_list,
                                                   const DetectOptions& opt = {}) {
    const NormalFormReport nf = analyze(p, j);
    if (nf.verdict.verdict != Verdict::InvariantCurve || nf.verdict.direction != Direction::Supercritical) {
        throw InvalidArgument("amplitude_scaling needs a supercritical invariant-curve verdict, got " +
                              std::string(to_string(nf.verdict.verdict)) + "/" + to_string(nf.verdict.direction));
    }
    const double side = nf.d > 0.0 ? 1.0 : -1.0;
    std::vector<std::future<ScalingPoint>> jobs;
    for (double eps : eps_list) {
        jobs.push_back(std::async(std::launch::async, [&p, &nf, &opt, side, eps] {
            ScalingPoint sp;
            sp.eps = eps;
            sp.gamma = nf.cp.gamma_j + side * eps;
            const AttractorReport rep = iterate_and_detect(p, sp.gamma, nf.cp, opt);
            sp.kind = rep.kind;
            sp.amplitude = rep.amplitude;
            sp.ratio = eps > 0.0 ? rep.amplitude / std::sqrt(eps) : 0.0;
            return sp;
        }));
    }
    std::vector<ScalingPoint> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace resbench
