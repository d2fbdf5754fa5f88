#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "logspace.hpp"
#include "params.hpp"
#include "phase.hpp"

// Exact finite-size computations for the mean-field (edge-count-only) model.
//
// The model lives on the Nbar = n(n-1)/2 edge slots of the complete graph.
// The edge density is the occupied fraction m = k/Nbar, and the cubic
// Hamiltonian enters as 2*Nbar*(alpha/6 m^3 + h/2 m), so at alpha = 0 the
// occupied count is exactly Binomial(Nbar, sigma(h)). With this normalization
// the Gaussian/quartic limit constants are exact with effective linear size
// ntilde = sqrt(2*Nbar); scaled quantities below use ntilde throughout.

namespace etm {

struct EdgeDensityGrid {
    int n = 0;
    std::int64_t pair_count = 0;  // Nbar = n(n-1)/2

    static EdgeDensityGrid for_vertices(int n) {
        if (n < 2) throw std::invalid_argument("EdgeDensityGrid: need n >= 2");
        return {n, std::int64_t(n) * (n - 1) / 2};
    }
    std::int64_t size() const { return pair_count + 1; }
    double value(std::int64_t k) const { return double(k) / double(pair_count); }
    double effective_size() const { return std::sqrt(2.0 * double(pair_count)); }  // ntilde
};

struct ExactDistribution {
    EdgeDensityGrid grid;
    ModelParams params;
    std::vector<double> log_weights;  // ln C(Nbar,k) + 2 Nbar (alpha/6 m^3 + h/2 m)
    double log_partition = 0.0;
    std::vector<double> probabilities;  // exp(log_weights - log_partition)
};

inline ExactDistribution exact_distribution(int n, const ModelParams& p) {
    ExactDistribution d;
    d.grid = EdgeDensityGrid::for_vertices(n);
    d.params = p;
    const std::int64_t nb = d.grid.pair_count;
    const double scale = 2.0 * double(nb);
    d.log_weights.resize(nb + 1);
    for (std::int64_t k = 0; k <= nb; ++k) {
        const double m = d.grid.value(k);
        d.log_weights[std::size_t(k)] =
            log_binomial(nb, k) + scale * (p.alpha / 6.0 * m * m * m + p.h / 2.0 * m);
    }
    d.log_partition = log_sum_exp(d.log_weights);
    d.probabilities.resize(nb + 1);
    for (std::int64_t k = 0; k <= nb; ++k) {
        d.probabilities[std::size_t(k)] = std::exp(d.log_weights[std::size_t(k)] - d.log_partition);
    }
    return d;
}

inline double mean_edge_density(const ExactDistribution& d) {
    double s = 0.0;
    for (std::int64_t k = 0; k <= d.grid.pair_count; ++k) {
        s += d.grid.value(k) * d.probabilities[std::size_t(k)];
    }
    return s;
}
inline double mean_edge_density(int n, const ModelParams& p) {
    return mean_edge_density(exact_distribution(n, p));
}

// Index window {k : |m_k - center| <= n^{-delta}} (inclusive bounds).
struct ConditionalWindow {
    double center = 0.0;
    double delta = 0.25;
    std::int64_t first = 0;
    std::int64_t last = -1;  // empty when last < first

    std::int64_t size() const { return last < first ? 0 : last - first + 1; }
    bool contains(std::int64_t k) const { return k >= first && k <= last; }
};

inline ConditionalWindow make_window_width(const EdgeDensityGrid& grid, double center,
                                           double width) {
    ConditionalWindow win;
    win.center = center;
    win.delta = 0.0;
    win.first =
        std::max<std::int64_t>(0, std::int64_t(std::ceil((center - width) * double(grid.pair_count))));
    win.last = std::min<std::int64_t>(
        grid.pair_count, std::int64_t(std::floor((center + width) * double(grid.pair_count))));
    return win;
}

inline ConditionalWindow make_conditional_window(const EdgeDensityGrid& grid, double center,
                                                 double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("make_conditional_window: delta must lie in (0,1)");
    }
    ConditionalWindow win = make_window_width(grid, center, std::pow(double(grid.n), -delta));
    win.delta = delta;
    return win;
}

inline double log_window_mass(const ExactDistribution& d, const ConditionalWindow& win) {
    LogSumExp acc;
    for (std::int64_t k = std::max<std::int64_t>(win.first, 0);
         k <= std::min(win.last, d.grid.pair_count); ++k) {
        acc.add(d.log_weights[std::size_t(k)]);
    }
    return acc.empty() ? neg_infinity : acc.value() - d.log_partition;
}

inline double log_mass_outside(const ExactDistribution& d,
                               const std::vector<ConditionalWindow>& windows) {
    LogSumExp acc;
    for (std::int64_t k = 0; k <= d.grid.pair_count; ++k) {
        bool inside = false;
        for (const auto& w : windows) inside = inside || w.contains(k);
        if (!inside) acc.add(d.log_weights[std::size_t(k)]);
    }
    return acc.empty() ? neg_infinity : acc.value() - d.log_partition;
}

// Probabilities renormalized to the window, zero outside.
inline ExactDistribution conditional_distribution(const ExactDistribution& d,
                                                  const ConditionalWindow& win) {
    if (win.size() <= 0) throw std::domain_error("conditional_distribution: empty window");
    const double lmass = log_window_mass(d, win);
    if (lmass == neg_infinity) throw std::domain_error("conditional_distribution: zero-mass window");
    ExactDistribution out;
    out.grid = d.grid;
    out.params = d.params;
    out.log_weights.assign(d.log_weights.size(), neg_infinity);
    out.probabilities.assign(d.probabilities.size(), 0.0);
    out.log_partition = 0.0;
    for (std::int64_t k = win.first; k <= win.last; ++k) {
        const double lp = d.log_weights[std::size_t(k)] - d.log_partition - lmass;
        out.log_weights[std::size_t(k)] = lp;
        out.probabilities[std::size_t(k)] = std::exp(lp);
    }
    return out;
}

enum class FluctuationScaling {
    CLT,      // V = ntilde (m - center) / sqrt(2); fluctuations of S on scale n
    Critical  // Y = sqrt(ntilde) (m - center);     fluctuations of S on scale n^{3/2}
};
enum class FluctuationCenter { ExactMean, Maximizer };

namespace detail {

inline double unique_maximizer(const ModelParams& p) {
    const PhasePortrait portrait = classify_phase(p);
    if (portrait.maximizers.size() != 1) {
        throw std::domain_error("maximizer centering is ambiguous on the critical curve");
    }
    return portrait.maximizers.front().u;
}

inline double fluctuation_factor(const EdgeDensityGrid& grid, FluctuationScaling s) {
    const double nt = grid.effective_size();
    return s == FluctuationScaling::CLT ? nt / std::sqrt(2.0) : std::sqrt(nt);
}

}  // namespace detail

struct FluctuationMoments {
    double center = 0.0;
    double mean = 0.0;      // of the scaled fluctuation
    double variance = 0.0;  // around its own mean
    double skewness = 0.0;
    double kurtosis = 0.0;  // mu4 / mu2^2
    double abs_mean = 0.0;  // E|scaled fluctuation|
};

inline FluctuationMoments scaled_fluctuation_moments(const ExactDistribution& d,
                                                     FluctuationScaling scaling,
                                                     FluctuationCenter centering) {
    FluctuationMoments out;
    out.center = centering == FluctuationCenter::ExactMean ? mean_edge_density(d)
                                                           : detail::unique_maximizer(d.params);
    const double factor = detail::fluctuation_factor(d.grid, scaling);
    double m1 = 0.0;
    for (std::int64_t k = 0; k <= d.grid.pair_count; ++k) {
        const double y = factor * (d.grid.value(k) - out.center);
        const double pk = d.probabilities[std::size_t(k)];
        m1 += y * pk;
        out.abs_mean += std::abs(y) * pk;
    }
    double mu2 = 0.0, mu3 = 0.0, mu4 = 0.0;
    for (std::int64_t k = 0; k <= d.grid.pair_count; ++k) {
        const double y = factor * (d.grid.value(k) - out.center) - m1;
        const double pk = d.probabilities[std::size_t(k)];
        const double y2 = y * y;
        mu2 += y2 * pk;
        mu3 += y2 * y * pk;
        mu4 += y2 * y2 * pk;
    }
    out.mean = m1;
    out.variance = mu2;
    out.skewness = mu2 > 0.0 ? mu3 / std::pow(mu2, 1.5) : 0.0;
    out.kurtosis = mu2 > 0.0 ? mu4 / (mu2 * mu2) : 0.0;
    return out;
}

// Exact E exp(t * scaled fluctuation), aggregated in log space.
inline double scaled_fluctuation_mgf(const ExactDistribution& d, double t,
                                     FluctuationScaling scaling, FluctuationCenter centering) {
    const double center = centering == FluctuationCenter::ExactMean
                              ? mean_edge_density(d)
                              : detail::unique_maximizer(d.params);
    const double factor = detail::fluctuation_factor(d.grid, scaling);
    LogSumExp acc;
    for (std::int64_t k = 0; k <= d.grid.pair_count; ++k) {
        const double y = factor * (d.grid.value(k) - center);
        acc.add(d.log_weights[std::size_t(k)] - d.log_partition + t * y);
    }
    return std::exp(acc.value());
}
inline double scaled_fluctuation_mgf(int n, const ModelParams& p, double t,
                                     FluctuationScaling scaling, FluctuationCenter centering) {
    return scaled_fluctuation_mgf(exact_distribution(n, p), t, scaling, centering);
}

// ntilde * E|m - u*| in the uniqueness phase, sqrt(ntilde) * E|m - u*| at the
// critical point; with a window, the conditional version around its center.
inline double abs_deviation_scaled(const ExactDistribution& d,
                                   const std::optional<ConditionalWindow>& window = std::nullopt) {
    const PhasePortrait portrait = classify_phase(d.params);
    if (portrait.regime == PhaseRegime::OutsideReplicaSymmetric) {
        throw std::domain_error("abs_deviation_scaled: outside the replica symmetric regime");
    }
    double center;
    const ExactDistribution* dist = &d;
    ExactDistribution conditioned;
    if (window) {
        if (portrait.regime == PhaseRegime::CriticalPoint && !(window->delta < 0.375)) {
            throw std::invalid_argument("abs_deviation_scaled: critical window needs delta < 3/8");
        }
        conditioned = conditional_distribution(d, *window);
        dist = &conditioned;
        center = window->center;
    } else {
        if (portrait.regime == PhaseRegime::OnCriticalCurve) {
            throw std::domain_error("abs_deviation_scaled: on the curve a window is required");
        }
        center = portrait.maximizers.front().u;
    }
    const double nt = d.grid.effective_size();
    const double factor = portrait.regime == PhaseRegime::CriticalPoint ? std::sqrt(nt) : nt;
    double s = 0.0;
    for (std::int64_t k = 0; k <= dist->grid.pair_count; ++k) {
        s += std::abs(dist->grid.value(k) - center) * dist->probabilities[std::size_t(k)];
    }
    return factor * s;
}
inline double abs_deviation_scaled(int n, const ModelParams& p) {
    return abs_deviation_scaled(exact_distribution(n, p));
}

struct LaplaceCheck {
    double log_partition_exact = 0.0;
    double log_partition_laplace = 0.0;
    double discrepancy = 0.0;                // exact - laplace
    std::vector<double> d_terms_normalized;  // (2/ntilde) * window sums, one per maximizer
};

// Saddle-point partition estimate: ntilde^2 f - ln(ntilde sqrt(pi)) + ln(sum of
// window sums), each window sum using the quadratic (or critical quartic)
// expansion of g around its maximizer. The cubic/quintic correction term is
// only trusted where it stays below half the leading term, so the stated
// n^{-delta} window is intersected with that trust region.
inline LaplaceCheck laplace_check(int n, const ModelParams& p, double delta = 0.25) {
    if (n < 50) throw std::invalid_argument("laplace_check: asymptotic check needs n >= 50");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("laplace_check: delta in (0,1)");
    const PhasePortrait portrait = classify_phase(p);
    if (portrait.regime == PhaseRegime::OutsideReplicaSymmetric) {
        throw std::domain_error("laplace_check: outside the replica symmetric regime");
    }
    const bool critical = portrait.regime == PhaseRegime::CriticalPoint;
    if (critical && !(delta < 0.375)) {
        throw std::invalid_argument("laplace_check: critical window needs delta < 3/8");
    }

    const ExactDistribution d = exact_distribution(n, p);
    const double nt = d.grid.effective_size();

    LaplaceCheck out;
    out.log_partition_exact = d.log_partition;
    LogSumExp total;
    for (const auto& sp : portrait.maximizers) {
        const double u = sp.u;
        double width = std::pow(double(n), -delta);
        LogSumExp acc;
        if (critical) {
            const double a4 = -objective_fourth_derivative(u) / 24.0;
            const double a5c = objective_fifth_derivative(u) / 120.0;  // quintic correction
            if (a5c != 0.0) width = std::min(width, 0.5 * a4 / std::abs(a5c));
            const auto win = make_window_width(d.grid, u, width);
            for (std::int64_t k = win.first; k <= win.last; ++k) {
                const double m = d.grid.value(k);
                const double y = std::sqrt(nt) * (m - u);
                const double expo = -a4 * y * y * y * y + a5c * y * y * y * y * y / std::sqrt(nt);
                acc.add(expo - 0.5 * std::log(m * (1.0 - m)));
            }
        } else {
            const double c = -0.5 * sp.second_derivative;
            const double kc = objective_third_derivative(u, p) / 6.0;
            if (kc != 0.0) width = std::min(width, 0.5 * c / std::abs(kc));
            const auto win = make_window_width(d.grid, u, width);
            for (std::int64_t k = win.first; k <= win.last; ++k) {
                const double m = d.grid.value(k);
                const double x = nt * (m - u);
                const double expo = -c * x * x + kc * x * x * x / nt;
                acc.add(expo - 0.5 * std::log(m * (1.0 - m)));
            }
        }
        out.d_terms_normalized.push_back(std::exp(acc.value() + std::log(2.0 / nt)));
        total.add(acc.value());
    }
    out.log_partition_laplace =
        nt * nt * portrait.free_energy - std::log(nt * std::sqrt(std::numbers::pi)) + total.value();
    out.discrepancy = out.log_partition_exact - out.log_partition_laplace;
    return out;
}

}  // namespace etm
