// Copyright 2026 The TSGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "tsgn/graph.hpp"

namespace tsgn {

/// Undirected unweighted simple projection of a TxGraph: sorted, de-duplicated
/// adjacency lists.
struct SimpleGraph {
    std::vector<std::vector<NodeId>> adj;

    std::size_t num_nodes() const { return adj.size(); }
    std::size_t num_edges() const {
        std::size_t twice = 0;
        for (const auto& a : adj) twice += a.size();
        return twice / 2;
    }
    std::size_t degree(NodeId v) const { return adj[v].size(); }
};

inline SimpleGraph project_simple(const TxGraph& g) {
    SimpleGraph s;
    s.adj.resize(g.num_nodes());
    for (const auto& e : g.edges()) {
        s.adj[e.src].push_back(e.dst);
        s.adj[e.dst].push_back(e.src);
    }
    for (auto& a : s.adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return s;
}

/// Raised when power iteration runs out of iterations.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double last_estimate)
        : Error(what), last_estimate_(last_estimate) {}
    double last_estimate() const { return last_estimate_; }

  private:
    double last_estimate_;
};

struct PowerIterationOptions {
    double tolerance = 1e-9;
    std::size_t max_iterations = 10000;
    std::uint64_t seed = 0x7367'6e00ULL;
};

/// Largest adjacency eigenvalue by power iteration.
///
/// The estimate is ||A x|| for the normalized iterate x, i.e. the square root
/// of the Rayleigh quotient of A^2. Bipartite graphs have -lambda in the
/// spectrum too, which stalls the plain Rayleigh quotient of A but not this one.
inline double largest_eigenvalue(const SimpleGraph& g, const PowerIterationOptions& opt = {}) {
    const auto n = g.num_nodes();
    if (g.num_edges() == 0) return 0.0;

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> start(0.5, 1.5);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = start(rng);

    auto normalize = [](std::vector<double>& v) {
        double s = 0.0;
        for (double a : v) s += a * a;
        s = std::sqrt(s);
        for (double& a : v) a /= s;
        return s;
    };
    normalize(x);

    double estimate = 0.0;
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        for (std::size_t v = 0; v < n; ++v) {
            double acc = 0.0;
            for (NodeId u : g.adj[v]) acc += x[u];
            y[v] = acc;
        }
        const double next = normalize(y);
        std::swap(x, y);
        if (it > 0 && std::abs(next - estimate) < opt.tolerance) return next;
        estimate = next;
    }
    throw ConvergenceError("power iteration did not converge", estimate);
}

/// Mean over all nodes of the unnormalized betweenness, counting each
/// unordered (s, t) pair once. Brandes accumulation.
inline double average_betweenness(const SimpleGraph& g) {
    const auto n = g.num_nodes();
    if (n == 0) return 0.0;
    std::vector<double> centrality(n, 0.0), sigma(n), delta(n);
    std::vector<std::ptrdiff_t> dist(n);
    std::vector<NodeId> order;
    order.reserve(n);
    std::queue<NodeId> q;

    for (NodeId s = 0; s < n; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        q.push(s);
        while (!q.empty()) {
            NodeId v = q.front();
            q.pop();
            order.push_back(v);
            for (NodeId w : g.adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push(w);
                }
                if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            NodeId w = *it;
            for (NodeId v : g.adj[w]) {
                if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) centrality[w] += delta[w];
        }
    }
    double total = 0.0;
    for (double c : centrality) total += c;
    return total / 2.0 / static_cast<double>(n);
}

/// Closeness within each node's connected component; isolated nodes score 0.
inline double average_closeness(const SimpleGraph& g) {
    const auto n = g.num_nodes();
    if (n == 0) return 0.0;
    std::vector<std::ptrdiff_t> dist(n);
    std::queue<NodeId> q;
    double total = 0.0;
    for (NodeId s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[s] = 0;
        q.push(s);
        std::size_t reached = 0;
        double sum = 0.0;
        while (!q.empty()) {
            NodeId v = q.front();
            q.pop();
            ++reached;
            sum += static_cast<double>(dist[v]);
            for (NodeId w : g.adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push(w);
                }
            }
        }
        if (sum > 0.0) total += static_cast<double>(reached - 1) / sum;
    }
    return total / static_cast<double>(n);
}

inline double average_neighbor_degree(const SimpleGraph& g) {
    const auto n = g.num_nodes();
    if (n == 0) return 0.0;
    double total = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        if (g.adj[v].empty()) continue;
        double s = 0.0;
        for (NodeId u : g.adj[v]) s += static_cast<double>(g.degree(u));
        total += s / static_cast<double>(g.degree(v));
    }
    return total / static_cast<double>(n);
}

/// Nodes with degree < 2 contribute 0.
inline double average_clustering(const SimpleGraph& g) {
    const auto n = g.num_nodes();
    if (n == 0) return 0.0;
    std::vector<char> mark(n, 0);
    double total = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        const auto k = g.degree(v);
        if (k < 2) continue;
        for (NodeId u : g.adj[v]) mark[u] = 1;
        std::size_t twice_links = 0;
        for (NodeId u : g.adj[v]) {
            for (NodeId w : g.adj[u]) twice_links += mark[w];
        }
        for (NodeId u : g.adj[v]) mark[u] = 0;
        total += static_cast<double>(twice_links) / static_cast<double>(k * (k - 1));
    }
    return total / static_cast<double>(n);
}

inline constexpr std::size_t kHandcraftedDim = 10;

struct FeatureVector {
    std::array<double, kHandcraftedDim> values{};

    static const std::array<std::string, kHandcraftedDim>& names() {
        static const std::array<std::string, kHandcraftedDim> n = {
            "N", "L", "K", "P", "C", "lambda", "D", "C_B", "C_C", "D_N"};
        return n;
    }
};

/// The ten topological descriptors, all on the undirected unweighted
/// projection: N, L, K, P, C, lambda, D, C_B, C_C, D_N.
inline FeatureVector handcrafted_vector(const TxGraph& g) {
    if (g.num_nodes() == 0) throw Error("handcrafted features need at least one node");
    const auto s = project_simple(g);
    const double n = static_cast<double>(s.num_nodes());
    const double l = static_cast<double>(s.num_edges());

    FeatureVector f;
    f.values[0] = n;
    f.values[1] = l;
    if (s.num_nodes() == 1 || s.num_edges() == 0) return f;

    std::size_t leaves = 0;
    for (NodeId v = 0; v < s.num_nodes(); ++v) leaves += s.degree(v) == 1;

    f.values[2] = 2.0 * l / n;
    f.values[3] = static_cast<double>(leaves) / n;
    f.values[4] = average_clustering(s);
    f.values[5] = largest_eigenvalue(s);
    f.values[6] = 2.0 * l / (n * (n - 1.0));
    f.values[7] = average_betweenness(s);
    f.values[8] = average_closeness(s);
    f.values[9] = average_neighbor_degree(s);
    return f;
}

/// Per-graph numeric rows with names, ids and labels.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<std::string> ids;
    std::vector<Label> labels;
    std::vector<std::vector<double>> rows;

    std::size_t size() const { return rows.size(); }
    std::size_t dim() const { return names.size(); }
};

}  // namespace tsgn
