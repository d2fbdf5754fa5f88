#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "params.hpp"

namespace etm {

enum class StationaryKind { LocalMax, LocalMin, Degenerate };

struct StationaryPoint {
    double u = 0.0;                  // root of the fixed-point equation in (0,1)
    double objective = 0.0;          // g(u)
    double second_derivative = 0.0;  // g''(u)
    StationaryKind kind = StationaryKind::LocalMax;
};

enum class PhaseRegime { Uniqueness, OnCriticalCurve, CriticalPoint, OutsideReplicaSymmetric };

inline const char* to_string(PhaseRegime r) {
    switch (r) {
        case PhaseRegime::Uniqueness: return "uniqueness";
        case PhaseRegime::OnCriticalCurve: return "on-critical-curve";
        case PhaseRegime::CriticalPoint: return "critical-point";
        case PhaseRegime::OutsideReplicaSymmetric: return "outside-replica-symmetric";
    }
    return "?";
}

// Quadratic-well constants of a maximizer: g(u* + x) ~ g(u*) - c x^2 + k x^3.
struct LaplaceConstants {
    double c = 0.0;  // -g''(u*)/2
    double k = 0.0;  // g'''(u*)/6
};

struct PhasePortrait {
    ModelParams params;
    PhaseRegime regime = PhaseRegime::Uniqueness;
    std::vector<StationaryPoint> maximizers;  // ascending in u; 1 or 2 entries
    double free_energy = 0.0;
    std::vector<LaplaceConstants> laplace_constants;  // per maximizer
    std::vector<double> variances;  // u(1-u)/(1-2a u^2 (1-u)); NaN when degenerate
    std::optional<double> kappa;    // weight of the lower maximizer, on the curve only
};

struct SolverOptions {
    double tol = 1e-10;                  // residual tolerance for stationary points
    double equal_height_rel_tol = 1e-9;  // relative |g(u1)-g(u2)| tolerance on the curve
    double degenerate_tol = 1e-8;        // |g''| threshold for a degenerate point
    int grid_points = 10000;             // sign-change scan resolution
};

// g(u) = alpha/6 u^3 + h/2 u - I(u)/2 on [0,1].
inline double objective(double u, const ModelParams& p) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("objective: u outside [0,1]");
    return p.alpha / 6.0 * u * u * u + p.h / 2.0 * u - 0.5 * entropy_term(u);
}

inline double objective_derivative(double u, const ModelParams& p) {
    return 0.5 * (p.alpha * u * u + p.h - std::log(u / (1.0 - u)));
}
inline double objective_second_derivative(double u, const ModelParams& p) {
    return p.alpha * u - 0.5 / (u * (1.0 - u));
}
inline double objective_third_derivative(double u, const ModelParams& p) {
    return p.alpha + 0.5 * (1.0 / (u * u) - 1.0 / ((1.0 - u) * (1.0 - u)));
}
inline double objective_fourth_derivative(double u) {
    const double w = 1.0 - u;
    return -(1.0 / (u * u * u) + 1.0 / (w * w * w));
}
inline double objective_fifth_derivative(double u) {
    const double w = 1.0 - u;
    return 3.0 / (u * u * u * u) - 3.0 / (w * w * w * w);
}

// sigma(alpha u^2 + h) - u; vanishes exactly at stationary points of g.
inline double fixed_point_residual(double u, const ModelParams& p) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("fixed_point_residual: u outside (0,1)");
    return logistic(p.alpha * u * u + p.h) - u;
}

namespace detail {

inline StationaryKind classify_kind(double gpp, double degenerate_tol) {
    if (std::abs(gpp) <= degenerate_tol) return StationaryKind::Degenerate;
    return gpp < 0.0 ? StationaryKind::LocalMax : StationaryKind::LocalMin;
}

// At a degenerate maximum the residual has a triple root, so a bisected root
// is only cube-root accurate. The center of the quartic well is the simple
// root of g''' nearby; Newton on g''' recovers it to machine precision.
inline double refine_degenerate_maximizer(double u0, const ModelParams& p) {
    double u = u0;
    for (int it = 0; it < 64; ++it) {
        const double f3 = objective_third_derivative(u, p);
        const double f4 = objective_fourth_derivative(u);
        const double step = f3 / f4;
        u -= step;
        if (!(u > 0.0 && u < 1.0)) return u0;
        if (std::abs(step) < 1e-16) break;
    }
    return std::abs(u - u0) <= 1e-3 ? u : u0;
}

}  // namespace detail

// All roots of the fixed-point residual in (0,1): uniform sign-change scan,
// bisection to interval width ~1e-15, kind classified by the sign of g''.
inline std::vector<StationaryPoint> find_stationary_points(const ModelParams& p, double tol = 1e-10,
                                                           double degenerate_tol = 1e-8,
                                                           int grid_points = 10000) {
    require_replica_symmetric(p, "find_stationary_points");
    if (!(tol > 0.0)) throw std::invalid_argument("find_stationary_points: tol must be positive");

    const double lo = 1e-12, hi = 1.0 - 1e-12;
    std::vector<StationaryPoint> out;
    double prev_u = lo;
    double prev_r = fixed_point_residual(prev_u, p);
    for (int i = 1; i < grid_points; ++i) {
        const double u = lo + (hi - lo) * double(i) / double(grid_points - 1);
        const double r = fixed_point_residual(u, p);
        if (prev_r == 0.0 || r * prev_r < 0.0) {
            double a = prev_u, b = u, ra = prev_r;
            if (ra == 0.0) {
                b = a;
            } else {
                while (b - a > 1e-15) {
                    const double mid = 0.5 * (a + b);
                    const double rm = fixed_point_residual(mid, p);
                    if (rm == 0.0) {
                        a = b = mid;
                        break;
                    }
                    if (rm * ra > 0.0) {
                        a = mid;
                        ra = rm;
                    } else {
                        b = mid;
                    }
                }
            }
            const double root = 0.5 * (a + b);
            const double res = fixed_point_residual(root, p);
            if (std::abs(res) > tol) {
                throw std::runtime_error("find_stationary_points: bisection stalled above tol");
            }
            StationaryPoint sp;
            sp.u = root;
            sp.objective = objective(root, p);
            sp.second_derivative = objective_second_derivative(root, p);
            sp.kind = detail::classify_kind(sp.second_derivative, degenerate_tol);
            out.push_back(sp);
        }
        prev_u = u;
        prev_r = r;
    }
    std::sort(out.begin(), out.end(),
              [](const StationaryPoint& x, const StationaryPoint& y) { return x.u < y.u; });
    return out;
}

inline PhasePortrait classify_phase(const ModelParams& p, const SolverOptions& opts = {}) {
    PhasePortrait out;
    out.params = p;
    if (!in_replica_symmetric_regime(p)) {
        out.regime = PhaseRegime::OutsideReplicaSymmetric;
        out.free_energy = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    auto pts = find_stationary_points(p, opts.tol, opts.degenerate_tol, opts.grid_points);

    std::vector<StationaryPoint> candidates;
    for (const auto& sp : pts) {
        if (sp.kind != StationaryKind::LocalMin) candidates.push_back(sp);
    }
    if (candidates.empty()) throw std::runtime_error("classify_phase: no maximizer found");

    double gmax = candidates.front().objective;
    for (const auto& sp : candidates) gmax = std::max(gmax, sp.objective);
    const double height_tol = opts.equal_height_rel_tol * std::max(1.0, std::abs(gmax));
    for (const auto& sp : candidates) {
        if (gmax - sp.objective <= height_tol) out.maximizers.push_back(sp);
    }

    const bool degenerate = std::any_of(out.maximizers.begin(), out.maximizers.end(),
                                        [](const StationaryPoint& sp) {
                                            return sp.kind == StationaryKind::Degenerate;
                                        });
    if (degenerate) {
        out.regime = PhaseRegime::CriticalPoint;
        // keep only the degenerate point and recenter it on the quartic well
        auto it = std::find_if(out.maximizers.begin(), out.maximizers.end(),
                               [](const StationaryPoint& sp) {
                                   return sp.kind == StationaryKind::Degenerate;
                               });
        StationaryPoint sp = *it;
        sp.u = detail::refine_degenerate_maximizer(sp.u, p);
        sp.objective = objective(sp.u, p);
        sp.second_derivative = objective_second_derivative(sp.u, p);
        sp.kind = StationaryKind::Degenerate;
        out.maximizers.assign(1, sp);
    } else if (out.maximizers.size() >= 2) {
        out.regime = PhaseRegime::OnCriticalCurve;
    } else {
        out.regime = PhaseRegime::Uniqueness;
    }

    out.free_energy = gmax;
    for (const auto& sp : out.maximizers) {
        LaplaceConstants lc;
        lc.c = -0.5 * sp.second_derivative;
        lc.k = objective_third_derivative(sp.u, p) / 6.0;
        out.laplace_constants.push_back(lc);
        const double denom = 1.0 - 2.0 * p.alpha * sp.u * sp.u * (1.0 - sp.u);
        out.variances.push_back(sp.kind == StationaryKind::Degenerate
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : sp.u * (1.0 - sp.u) / denom);
    }
    if (out.regime == PhaseRegime::OnCriticalCurve) {
        const auto& u1 = out.maximizers.front();
        const auto& u2 = out.maximizers.back();
        const double a1 = 1.0 - 2.0 * p.alpha * u1.u * u1.u * (1.0 - u1.u);
        const double a2 = 1.0 - 2.0 * p.alpha * u2.u * u2.u * (1.0 - u2.u);
        const double d1 = std::sqrt(1.0 / a1), d2 = std::sqrt(1.0 / a2);
        out.kappa = d1 / (d1 + d2);
    }
    return out;
}

// sup over [0,1] of the objective; the boundary never attains it since
// I'(u) diverges there.
inline double free_energy(const ModelParams& p) {
    require_replica_symmetric(p, "free_energy");
    return classify_phase(p).free_energy;
}

// h = q(alpha) on which the two local maxima have equal height. Bisection on
// the signed height gap inside h in [h_c - 6, h_c] (widened once if needed);
// a lone maximum counts as high phase when u > 2/3, low phase otherwise.
inline double critical_curve_h(double alpha, double tol = 1e-12) {
    if (!(alpha > alpha_critical)) {
        throw std::domain_error("critical_curve_h: requires alpha > 27/8");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("critical_curve_h: tol must be positive");

    auto height_gap = [&](double h) -> double {
        auto pts = find_stationary_points({alpha, h});
        std::vector<const StationaryPoint*> maxima;
        for (const auto& sp : pts) {
            if (sp.kind != StationaryKind::LocalMin) maxima.push_back(&sp);
        }
        if (maxima.empty()) throw std::runtime_error("critical_curve_h: lost all maxima");
        if (maxima.size() == 1) return maxima.front()->u > 2.0 / 3.0 ? 1.0 : -1.0;
        return maxima.back()->objective - maxima.front()->objective;
    };

    double lo = h_critical - 6.0, hi = h_critical;
    double glo = height_gap(lo);
    if (glo >= 0.0) {
        lo = h_critical - 12.0;
        glo = height_gap(lo);
    }
    const double ghi = height_gap(hi);
    if (!(glo < 0.0 && ghi > 0.0)) {
        throw std::runtime_error("critical_curve_h: bracket [h_c-6, h_c] does not straddle the curve");
    }
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        (height_gap(mid) > 0.0 ? hi : lo) = mid;
    }
    const double h = 0.5 * (lo + hi);
    const double gap = height_gap(h);
    if (std::abs(gap) == 1.0 || std::abs(gap) > tol) {
        throw std::runtime_error("critical_curve_h: equal-height residual above tol");
    }
    return h;
}

// Limiting variance u*(1-u*) / (1 - 2 alpha (u*)^2 (1-u*)); diverges when the
// maximizer is degenerate (second-order transition).
inline double limiting_variance(const PhasePortrait& portrait, std::size_t which = 0) {
    if (which >= portrait.maximizers.size()) {
        throw std::out_of_range("limiting_variance: no such maximizer");
    }
    const auto& sp = portrait.maximizers[which];
    if (sp.kind == StationaryKind::Degenerate || portrait.laplace_constants[which].c <= 0.0) {
        throw std::domain_error("limiting_variance: diverges at a degenerate maximizer");
    }
    return portrait.variances[which];
}

// kappa = sqrt(1/A1) / (sqrt(1/A1) + sqrt(1/A2)), A_i = 1 - 2 alpha u_i^2 (1-u_i).
inline double mixture_weight_kappa(const PhasePortrait& portrait) {
    if (portrait.regime != PhaseRegime::OnCriticalCurve || !portrait.kappa) {
        throw std::domain_error("mixture_weight_kappa: defined only on the critical curve");
    }
    return *portrait.kappa;
}

// Large-deviation rate of the edge density: f - g(x); nonnegative, zero only
// at the maximizers.
inline double rate_function(double x, const ModelParams& p, double free_energy_value) {
    return free_energy_value - objective(x, p);
}
inline double rate_function(double x, const ModelParams& p) {
    return rate_function(x, p, free_energy(p));
}

// Taylor coefficients of the rate function around a maximizer, orders 2..5.
// Order 1 vanishes by stationarity; at the critical point orders 2 and 3
// vanish as well and the order-4 coefficient is 81/64.
inline std::array<double, 4> rate_taylor_coefficients(const PhasePortrait& portrait,
                                                      std::size_t which = 0) {
    if (which >= portrait.maximizers.size()) {
        throw std::out_of_range("rate_taylor_coefficients: no such maximizer");
    }
    const double u = portrait.maximizers[which].u;
    const ModelParams& p = portrait.params;
    return {-objective_second_derivative(u, p) / 2.0, -objective_third_derivative(u, p) / 6.0,
            -objective_fourth_derivative(u) / 24.0, -objective_fifth_derivative(u) / 120.0};
}

}  // namespace etm
