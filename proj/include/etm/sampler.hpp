#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "params.hpp"
#include "rng.hpp"

// Single-edge heat-bath (Glauber) dynamics targeting the edge-triangle Gibbs
// measure. One sweep = Nbar proposals at uniformly random vertex pairs. A
// GraphState is single-writer; parallel chains use one state and one RNG
// stream each.

namespace etm {

struct ChainInit {
    enum class Kind { Empty, Complete, ErdosRenyi, FromDensity };
    Kind kind = Kind::Empty;
    double value = 0.0;  // p for ErdosRenyi, u for FromDensity

    static ChainInit empty() { return {Kind::Empty, 0.0}; }
    static ChainInit complete() { return {Kind::Complete, 0.0}; }
    static ChainInit erdos_renyi(double p) { return {Kind::ErdosRenyi, p}; }
    static ChainInit from_density(double u) { return {Kind::FromDensity, u}; }
};

struct ChainConfig {
    int n = 0;
    ModelParams params;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;  // chain index; distinct streams never overlap
    ChainInit init;
    std::int64_t burn_in_sweeps = 1000;
    std::int64_t sweeps = 10000;
    std::int64_t thinning = 1;

    void validate() const {
        if (n < 2) throw std::invalid_argument("ChainConfig: n must be >= 2");
        if (sweeps < 1) throw std::invalid_argument("ChainConfig: sweeps must be >= 1");
        if (thinning < 1) throw std::invalid_argument("ChainConfig: thinning must be >= 1");
        if (burn_in_sweeps < 0) throw std::invalid_argument("ChainConfig: negative burn-in");
        if ((init.kind == ChainInit::Kind::ErdosRenyi || init.kind == ChainInit::Kind::FromDensity) &&
            !(init.value >= 0.0 && init.value <= 1.0)) {
            throw std::invalid_argument("ChainConfig: init value must lie in [0,1]");
        }
    }
};

struct ChainSample {
    double edge_density = 0.0;      // 2E/n^2
    double triangle_density = 0.0;  // 6T/n^3
};

struct ChainTrace {
    ChainConfig config;
    std::vector<ChainSample> samples;
    std::int64_t proposals = 0;
    std::int64_t flips = 0;

    std::vector<double> edge_densities() const {
        std::vector<double> xs(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) xs[i] = samples[i].edge_density;
        return xs;
    }
    std::vector<double> triangle_densities() const {
        std::vector<double> xs(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) xs[i] = samples[i].triangle_density;
        return xs;
    }
};

inline double hamiltonian(const GraphState& g, const ModelParams& p) {
    return p.alpha / double(g.vertex_count()) * double(g.triangle_count()) +
           p.h * double(g.edge_count());
}

// Heat-bath update of one potential edge: x_uv is redrawn from its conditional
// law given the rest, P(x_uv = 1 | rest) = sigma(alpha c / n + h) with c the
// common-neighbor count. Returns whether the state changed.
inline bool glauber_update(GraphState& g, int u, int v, double uniform_draw,
                           const ModelParams& p) {
    const int c = g.common_neighbors(u, v);
    const double p_on = logistic(p.alpha * double(c) / double(g.vertex_count()) + p.h);
    return g.set_edge(u, v, uniform_draw < p_on);
}

namespace detail {

inline void seed_state(GraphState& g, const ChainInit& init, Xoshiro256pp& rng) {
    const int n = g.vertex_count();
    switch (init.kind) {
        case ChainInit::Kind::Empty:
            break;
        case ChainInit::Kind::Complete:
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v) g.set_edge(u, v, true);
            break;
        case ChainInit::Kind::ErdosRenyi:
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v) g.set_edge(u, v, rng.uniform01() < init.value);
            break;
        case ChainInit::Kind::FromDensity: {
            // exactly round(u * Nbar) edges, chosen uniformly by partial shuffle
            std::vector<std::uint32_t> idx(std::size_t(g.max_edges()));
            std::uint32_t e = 0;
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v) idx[e++] = (std::uint32_t(u) << 16) | std::uint32_t(v);
            const auto want = std::int64_t(std::llround(init.value * double(g.max_edges())));
            for (std::int64_t i = 0; i < want; ++i) {
                const auto j = i + std::int64_t(rng.bounded(std::uint64_t(idx.size() - std::size_t(i))));
                std::swap(idx[std::size_t(i)], idx[std::size_t(j)]);
                g.set_edge(int(idx[std::size_t(i)] >> 16), int(idx[std::size_t(i)] & 0xffff), true);
            }
            break;
        }
    }
}

}  // namespace detail

// Runs `sweeps` random-scan sweeps (Nbar proposals each) in place.
inline void advance_sweeps(GraphState& g, const ModelParams& p, Xoshiro256pp& rng,
                           std::int64_t sweeps, std::int64_t* proposals = nullptr,
                           std::int64_t* flips = nullptr) {
    const int n = g.vertex_count();
    const std::int64_t per_sweep = g.max_edges();
    for (std::int64_t s = 0; s < sweeps; ++s) {
        for (std::int64_t i = 0; i < per_sweep; ++i) {
            const int u = int(rng.bounded(std::uint64_t(n)));
            int v = int(rng.bounded(std::uint64_t(n - 1)));
            if (v >= u) ++v;
            const bool flipped = glauber_update(g, u, v, rng.uniform01(), p);
            if (flips && flipped) ++*flips;
        }
        if (proposals) *proposals += per_sweep;
    }
}

// Deterministic given (seed, stream): burn-in, then record the densities
// every `thinning` sweeps.
inline ChainTrace run_chain(const ChainConfig& config) {
    config.validate();
    ChainTrace trace;
    trace.config = config;
    Xoshiro256pp rng(config.seed, config.stream);
    GraphState g(config.n);
    detail::seed_state(g, config.init, rng);
    advance_sweeps(g, config.params, rng, config.burn_in_sweeps, &trace.proposals, &trace.flips);
    const double n2 = double(config.n) * double(config.n);
    const double n3 = n2 * double(config.n);
    trace.samples.reserve(std::size_t(config.sweeps / config.thinning));
    for (std::int64_t s = 1; s <= config.sweeps; ++s) {
        advance_sweeps(g, config.params, rng, 1, &trace.proposals, &trace.flips);
        if (s % config.thinning == 0) {
            trace.samples.push_back(
                {2.0 * double(g.edge_count()) / n2, 6.0 * double(g.triangle_count()) / n3});
        }
    }
    return trace;
}

}  // namespace etm
