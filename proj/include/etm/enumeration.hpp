#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/Polynomials>

#include "graph.hpp"
#include "logspace.hpp"
#include "params.hpp"

// Brute-force enumeration of the edge-triangle Gibbs measure for small n:
// the ground-truth oracle for the sampler, plus the fugacity-polynomial view
// of the partition function and its complex zeros.

namespace etm {

inline constexpr int max_enumeration_vertices = 7;  // 2^21 adjacency states

struct EnumerationResult {
    int n = 0;
    double log_partition = 0.0;
    std::vector<double> log_weights;     // law of the edge count s = 0..Nbar, unnormalized
    std::vector<double> probabilities;   // normalized law of the edge count
    double expected_edge_count = 0.0;
    double expected_triangle_count = 0.0;
};

struct PartitionPolynomial {
    int n = 0;
    int degree = 0;                        // Nbar
    double alpha = 0.0;
    std::vector<double> log_coefficients;  // C_m > 0, m = 0..Nbar
};

namespace detail {

inline std::vector<std::pair<int, int>> edge_list(int n) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(std::size_t(n) * (n - 1) / 2);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return edges;
}

// Walks all 2^Nbar edge subsets in Gray-code order (one edge flip per step),
// maintaining E and T incrementally, and hands (E, T) to the visitor.
template <typename Visitor>
inline void for_each_subset(int n, Visitor&& visit) {
    if (n < 2 || n > max_enumeration_vertices) {
        throw std::invalid_argument("enumeration: need 2 <= n <= 7");
    }
    GraphState g(n);
    const auto edges = edge_list(n);
    const std::uint64_t states = std::uint64_t(1) << edges.size();
    visit(g.edge_count(), g.triangle_count());
    for (std::uint64_t i = 1; i < states; ++i) {
        const int j = std::countr_zero(i);
        const auto [u, v] = edges[std::size_t(j)];
        g.set_edge(u, v, !g.has_edge(u, v));
        visit(g.edge_count(), g.triangle_count());
    }
}

}  // namespace detail

inline EnumerationResult enumerate_gibbs(int n, const ModelParams& p) {
    EnumerationResult out;
    out.n = n;
    const std::int64_t nbar = std::int64_t(n) * (n - 1) / 2;
    std::vector<LogSumExp> by_edges(std::size_t(nbar) + 1);
    LogSumExp z, edge_sum, triangle_sum;
    detail::for_each_subset(n, [&](std::int64_t e, std::int64_t t) {
        const double w = p.alpha / double(n) * double(t) + p.h * double(e);
        by_edges[std::size_t(e)].add(w);
        z.add(w);
        if (e > 0) edge_sum.add(w + std::log(double(e)));
        if (t > 0) triangle_sum.add(w + std::log(double(t)));
    });
    out.log_partition = z.value();
    out.log_weights.resize(std::size_t(nbar) + 1);
    out.probabilities.resize(std::size_t(nbar) + 1);
    for (std::size_t s = 0; s < out.log_weights.size(); ++s) {
        out.log_weights[s] = by_edges[s].value();
        out.probabilities[s] =
            by_edges[s].empty() ? 0.0 : std::exp(out.log_weights[s] - out.log_partition);
    }
    out.expected_edge_count = edge_sum.empty() ? 0.0 : std::exp(edge_sum.value() - out.log_partition);
    out.expected_triangle_count =
        triangle_sum.empty() ? 0.0 : std::exp(triangle_sum.value() - out.log_partition);
    return out;
}

// Coefficients C_m of Z(z) = sum_m C_m z^m with z = e^h: the h-independent
// part of the partition sum grouped by edge count.
inline PartitionPolynomial polynomial_coefficients(int n, double alpha) {
    PartitionPolynomial poly;
    poly.n = n;
    poly.alpha = alpha;
    const std::int64_t nbar = std::int64_t(n) * (n - 1) / 2;
    poly.degree = int(nbar);
    std::vector<LogSumExp> by_edges(std::size_t(nbar) + 1);
    detail::for_each_subset(n, [&](std::int64_t e, std::int64_t t) {
        by_edges[std::size_t(e)].add(alpha / double(n) * double(t));
    });
    poly.log_coefficients.resize(std::size_t(nbar) + 1);
    for (std::size_t m = 0; m < by_edges.size(); ++m) {
        poly.log_coefficients[m] = by_edges[m].value();
    }
    return poly;
}

// ln sum_m C_m e^{h m}; must agree with enumerate_gibbs(n, {alpha, h}).
inline double evaluate_log_partition(const PartitionPolynomial& poly, double h) {
    std::vector<double> terms(poly.log_coefficients.size());
    for (std::size_t m = 0; m < terms.size(); ++m) {
        terms[m] = poly.log_coefficients[m] + h * double(m);
    }
    return log_sum_exp(terms);
}

namespace detail {

inline std::complex<double> horner(const std::vector<double>& coeffs, std::complex<double> z) {
    std::complex<double> acc(0.0, 0.0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

inline double horner_abs(const std::vector<double>& coeffs, double r) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
}

}  // namespace detail

// All complex zeros of the partition polynomial, via companion-matrix
// eigenvalues with Newton polish; each zero must satisfy the scaled residual
// bound |Z(z)| <= 1e-8 * sum_m |C_m| |z|^m.
inline std::vector<std::complex<double>> lee_yang_zeros(const PartitionPolynomial& poly) {
    if (poly.degree < 1 || poly.degree > 21) {
        throw std::invalid_argument("lee_yang_zeros: degree must lie in [1, 21]");
    }
    double log_max = neg_infinity;
    for (double lc : poly.log_coefficients) log_max = std::max(log_max, lc);
    std::vector<double> coeffs(poly.log_coefficients.size());
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        coeffs[m] = std::exp(poly.log_coefficients[m] - log_max);
    }

    Eigen::VectorXd c(int(coeffs.size()));
    for (std::size_t m = 0; m < coeffs.size(); ++m) c[int(m)] = coeffs[m];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(c);

    std::vector<std::complex<double>> roots;
    roots.reserve(std::size_t(poly.degree));
    for (int i = 0; i < solver.roots().size(); ++i) roots.push_back(solver.roots()[i]);

    const double tol = 1e-8;
    for (auto& z : roots) {
        for (int it = 0; it < 64; ++it) {
            const std::complex<double> f = detail::horner(coeffs, z);
            if (std::abs(f) <= 0.5 * tol * detail::horner_abs(coeffs, std::abs(z))) break;
            std::complex<double> df(0.0, 0.0);
            for (std::size_t m = coeffs.size() - 1; m >= 1; --m) {
                df = df * z + double(m) * coeffs[m];
            }
            if (df == std::complex<double>(0.0, 0.0)) break;
            const std::complex<double> step = f / df;
            z -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        if (std::abs(detail::horner(coeffs, z)) > tol * detail::horner_abs(coeffs, std::abs(z))) {
            throw std::runtime_error("lee_yang_zeros: root failed the residual bound");
        }
    }
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

}  // namespace etm
