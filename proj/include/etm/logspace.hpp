#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

namespace etm {

inline constexpr double neg_infinity = -std::numeric_limits<double>::infinity();

// ln C(N, k) via log-gamma.
inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

// Two-pass log-sum-exp over a span; deterministic left-to-right reduction.
inline double log_sum_exp(std::span<const double> xs) {
    double m = neg_infinity;
    for (double x : xs) m = std::max(m, x);
    if (m == neg_infinity) return neg_infinity;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

// Streaming log-sum-exp with a running maximum, for single-pass aggregations.
class LogSumExp {
public:
    void add(double x) {
        if (x == neg_infinity) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
            return;
        }
        sum_ = (max_ == neg_infinity) ? 1.0 : sum_ * std::exp(max_ - x) + 1.0;
        max_ = x;
    }
    double value() const { return max_ == neg_infinity ? neg_infinity : max_ + std::log(sum_); }
    bool empty() const { return max_ == neg_infinity; }

private:
    double max_ = neg_infinity;
    double sum_ = 0.0;
};

}  // namespace etm
