// Test-side reference implementations, deliberately independent of the
// engine's Dijkstra: exhaustive path enumeration with sound pruning, an
// O(V^2) array Dijkstra, and a reference flood fill.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "grid.hpp"
#include "metric.hpp"

namespace oracle {

using fpp::Colouring;
using fpp::EdgeWeights;
using fpp::GridSpec;

struct GridGraph {
    const Colouring& sigma;
    std::vector<std::array<std::int64_t, 2>> edges;      // node pairs, a < b
    std::vector<double> weight;                          // per edge

    explicit GridGraph(const Colouring& s) : sigma(s) {
        const GridSpec& g = s.grid;
        const double s2 = fpp::diag_step_2d();
        const double s3 = fpp::diag_step_3d();
        const std::int64_t n = g.node_count();
        for (std::int64_t u = 0; u < n; ++u) {
            const auto mu = g.multi_index(u);
            const int zhi = g.dim == 3 ? 1 : 0;
            for (int dz = -zhi; dz <= zhi; ++dz)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!dx && !dy && !dz) continue;
                        const std::array<std::int64_t, 3> mv{mu[0] + dx, mu[1] + dy,
                                                             mu[2] + dz};
                        if (!g.in_bounds(mv)) continue;
                        const std::int64_t v = g.flat_index(mv);
                        if (v < u) continue;
                        const int nz = std::abs(dx) + std::abs(dy) + std::abs(dz);
                        const double len = g.h * (nz == 1 ? 1.0 : nz == 2 ? s2 : s3);
                        edges.push_back({u, v});
                        weight.push_back(0.5 * len *
                                         (s.density[static_cast<std::size_t>(u)] +
                                          s.density[static_cast<std::size_t>(v)]));
                    }
        }
    }
};

/// Minimal path cost from `source` to every node by depth-first enumeration
/// of simple paths, pruned only when the partial cost already matches or
/// exceeds the best known cost at the current node.
inline std::vector<double> enumerate_shortest(const Colouring& sigma, std::int64_t source) {
    const GridSpec& g = sigma.grid;
    const std::int64_t n = g.node_count();
    std::vector<std::vector<std::pair<std::int64_t, double>>> adj(
        static_cast<std::size_t>(n));
    GridGraph graph(sigma);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        adj[static_cast<std::size_t>(graph.edges[e][0])].push_back(
            {graph.edges[e][1], graph.weight[e]});
        adj[static_cast<std::size_t>(graph.edges[e][1])].push_back(
            {graph.edges[e][0], graph.weight[e]});
    }
    std::vector<double> best(static_cast<std::size_t>(n),
                             std::numeric_limits<double>::infinity());
    std::vector<char> on_path(static_cast<std::size_t>(n), 0);
    best[static_cast<std::size_t>(source)] = 0.0;

    struct Frame {
        std::int64_t node;
        double cost;
        std::size_t next = 0;
    };
    std::vector<Frame> stack{{source, 0.0, 0}};
    on_path[static_cast<std::size_t>(source)] = 1;
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& nbrs = adj[static_cast<std::size_t>(f.node)];
        if (f.next >= nbrs.size()) {
            on_path[static_cast<std::size_t>(f.node)] = 0;
            stack.pop_back();
            continue;
        }
        const auto [v, w] = nbrs[f.next++];
        if (on_path[static_cast<std::size_t>(v)]) continue;
        const double cost = f.cost + w;
        if (cost > best[static_cast<std::size_t>(v)]) continue;
        best[static_cast<std::size_t>(v)] = cost;
        stack.push_back({v, cost, 0});
        on_path[static_cast<std::size_t>(v)] = 1;
    }
    return best;
}

/// Same enumeration for the hypercubic lattice.
inline std::vector<double> enumerate_lattice_shortest(const EdgeWeights& w,
                                                      std::int64_t source) {
    const std::int64_t n = w.vertex_count();
    std::vector<std::vector<std::pair<std::int64_t, double>>> adj(
        static_cast<std::size_t>(n));
    for (std::int64_t v = 0; v < n; ++v) {
        const auto c = w.coords(v);
        for (int a = 0; a < w.dim; ++a) {
            auto cv = c;
            cv[a] += 1;
            const std::int64_t u = w.vertex_at(cv);
            if (u < 0) continue;
            const double we = w.weights[static_cast<std::size_t>(v * w.dim + a)];
            adj[static_cast<std::size_t>(v)].push_back({u, we});
            adj[static_cast<std::size_t>(u)].push_back({v, we});
        }
    }
    std::vector<double> best(static_cast<std::size_t>(n),
                             std::numeric_limits<double>::infinity());
    std::vector<char> on_path(static_cast<std::size_t>(n), 0);
    best[static_cast<std::size_t>(source)] = 0.0;
    struct Frame {
        std::int64_t node;
        double cost;
        std::size_t next = 0;
    };
    std::vector<Frame> stack{{source, 0.0, 0}};
    on_path[static_cast<std::size_t>(source)] = 1;
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& nbrs = adj[static_cast<std::size_t>(f.node)];
        if (f.next >= nbrs.size()) {
            on_path[static_cast<std::size_t>(f.node)] = 0;
            stack.pop_back();
            continue;
        }
        const auto [v, wt] = nbrs[f.next++];
        if (on_path[static_cast<std::size_t>(v)]) continue;
        const double cost = f.cost + wt;
        if (cost > best[static_cast<std::size_t>(v)]) continue;
        best[static_cast<std::size_t>(v)] = cost;
        stack.push_back({v, cost, 0});
        on_path[static_cast<std::size_t>(v)] = 1;
    }
    return best;
}

/// O(V^2) array Dijkstra, no heap; structurally different from the engine.
inline std::vector<double> array_dijkstra(const Colouring& sigma,
                                          const std::vector<std::int64_t>& sources) {
    const std::int64_t n = sigma.grid.node_count();
    GridGraph graph(sigma);
    std::vector<std::vector<std::pair<std::int64_t, double>>> adj(
        static_cast<std::size_t>(n));
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        adj[static_cast<std::size_t>(graph.edges[e][0])].push_back(
            {graph.edges[e][1], graph.weight[e]});
        adj[static_cast<std::size_t>(graph.edges[e][1])].push_back(
            {graph.edges[e][0], graph.weight[e]});
    }
    std::vector<double> dist(static_cast<std::size_t>(n),
                             std::numeric_limits<double>::infinity());
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    for (auto s : sources) dist[static_cast<std::size_t>(s)] = 0.0;
    for (std::int64_t round = 0; round < n; ++round) {
        std::int64_t u = -1;
        double du = std::numeric_limits<double>::infinity();
        for (std::int64_t k = 0; k < n; ++k)
            if (!done[static_cast<std::size_t>(k)] && dist[static_cast<std::size_t>(k)] < du) {
                du = dist[static_cast<std::size_t>(k)];
                u = k;
            }
        if (u < 0) break;
        done[static_cast<std::size_t>(u)] = 1;
        for (const auto& [v, w] : adj[static_cast<std::size_t>(u)])
            dist[static_cast<std::size_t>(v)] =
                std::min(dist[static_cast<std::size_t>(v)], du + w);
    }
    return dist;
}

/// Reference connectivity: is there a path of colour-j nodes from any node
/// in `from` to any node in `to`, staying inside the optional box mask?
inline bool reference_connected(const Colouring& sigma, const std::vector<std::int64_t>& from,
                                const std::vector<std::int64_t>& to, double want) {
    const GridSpec& g = sigma.grid;
    const std::int64_t n = g.node_count();
    std::vector<char> target(static_cast<std::size_t>(n), 0);
    for (auto v : to) target[static_cast<std::size_t>(v)] = 1;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<std::int64_t> queue;
    for (auto v : from)
        if (sigma.density[static_cast<std::size_t>(v)] == want && !seen[static_cast<std::size_t>(v)]) {
            seen[static_cast<std::size_t>(v)] = 1;
            queue.push_back(v);
        }
    while (!queue.empty()) {
        const auto u = queue.back();
        queue.pop_back();
        if (target[static_cast<std::size_t>(u)]) return true;
        const auto mu = g.multi_index(u);
        const int zhi = g.dim == 3 ? 1 : 0;
        for (int dz = -zhi; dz <= zhi; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (!dx && !dy && !dz) continue;
                    const std::array<std::int64_t, 3> mv{mu[0] + dx, mu[1] + dy, mu[2] + dz};
                    if (!g.in_bounds(mv)) continue;
                    const auto v = g.flat_index(mv);
                    if (seen[static_cast<std::size_t>(v)]) continue;
                    if (sigma.density[static_cast<std::size_t>(v)] != want) continue;
                    seen[static_cast<std::size_t>(v)] = 1;
                    queue.push_back(v);
                }
    }
    return false;
}

}  // namespace oracle
