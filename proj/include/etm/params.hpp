#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace etm {

// Model parameters: alpha weights triangles, h weights edges.
struct ModelParams {
    double alpha = 0.0;
    double h = 0.0;
};

// Second-order critical point of the scalar problem.
inline constexpr double alpha_critical = 27.0 / 8.0;
inline const double h_critical = std::log(2.0) - 1.5;

// The scalar free-energy representation is valid only for alpha > -2.
inline constexpr double alpha_replica_symmetric_min = -2.0;

inline bool in_replica_symmetric_regime(const ModelParams& p) {
    return p.alpha > alpha_replica_symmetric_min;
}

inline void require_replica_symmetric(const ModelParams& p, const char* where) {
    if (!in_replica_symmetric_regime(p)) {
        throw std::domain_error(std::string(where) +
                                ": alpha <= -2 is outside the replica symmetric regime");
    }
}

// Numerically stable logistic function.
inline double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// I(u) = u ln u + (1-u) ln(1-u), extended by continuity to I(0) = I(1) = 0.
inline double entropy_term(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return u * std::log(u) + (1.0 - u) * std::log1p(-u);
}

}  // namespace etm
