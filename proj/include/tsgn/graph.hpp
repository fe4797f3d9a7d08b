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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tsgn/common.hpp"

namespace tsgn {

using NodeId = std::uint32_t;

/// One value transfer between two addresses. Amounts are in ETH.
struct TransactionRecord {
    std::string tx_hash;
    std::string src;
    std::string dst;
    double amount = 0.0;
    std::int64_t timestamp = 0;

    bool operator==(const TransactionRecord&) const = default;
};

struct Node {
    std::string address;
    std::vector<double> attrs;

    bool operator==(const Node&) const = default;
};

/// For undirected graphs src < dst always holds.
struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    double weight = 0.0;

    bool operator==(const Edge&) const = default;
};

/// Transaction amounts are non-negative; log-sum line-graph weights are not.
enum class WeightDomain { non_negative, real };

/// Directed or undirected weighted simple graph around one center address.
///
/// Mutators keep the invariants: no self loops, one edge per ordered
/// (directed) or unordered (undirected) pair, finite weights that are also
/// non-negative unless the graph was created with WeightDomain::real.
class TxGraph {
  public:
    explicit TxGraph(bool directed = true, WeightDomain domain = WeightDomain::non_negative)
        : directed_(directed), domain_(domain) {}

    bool directed() const { return directed_; }
    WeightDomain weight_domain() const { return domain_; }
    Label label() const { return label_; }
    void set_label(Label l) { label_ = l; }

    NodeId center() const {
        if (nodes_.empty()) throw Error("graph has no center node");
        return center_;
    }
    void set_center(NodeId v) {
        check_node(v);
        center_ = v;
    }

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Node& node(NodeId v) const {
        check_node(v);
        return nodes_[v];
    }

    void set_attrs(NodeId v, std::vector<double> attrs) {
        check_node(v);
        nodes_[v].attrs = std::move(attrs);
    }

    std::optional<NodeId> find(const std::string& address) const {
        auto it = index_.find(address);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Returns the id of `address`, inserting it if absent.
    NodeId add_node(const std::string& address, std::vector<double> attrs = {}) {
        if (auto it = index_.find(address); it != index_.end()) return it->second;
        auto id = static_cast<NodeId>(nodes_.size());
        nodes_.push_back(Node{address, std::move(attrs)});
        index_.emplace(address, id);
        return id;
    }

    void add_edge(NodeId src, NodeId dst, double weight) {
        check_node(src);
        check_node(dst);
        if (src == dst) throw Error("self-loop on node '" + nodes_[src].address + "'");
        if (!std::isfinite(weight) || (weight < 0.0 && domain_ == WeightDomain::non_negative)) {
            throw Error("invalid edge weight");
        }
        if (!directed_ && src > dst) std::swap(src, dst);
        if (!keys_.insert(pair_key(src, dst)).second) {
            throw Error("duplicate edge " + nodes_[src].address + " -> " + nodes_[dst].address);
        }
        edges_.push_back(Edge{src, dst, weight});
    }

    bool has_edge(NodeId src, NodeId dst) const {
        if (!directed_ && src > dst) std::swap(src, dst);
        return keys_.contains(pair_key(src, dst));
    }

    void reserve(std::size_t nodes, std::size_t edges) {
        nodes_.reserve(nodes);
        index_.reserve(nodes);
        edges_.reserve(edges);
        keys_.reserve(edges);
    }

    bool operator==(const TxGraph& o) const {
        return directed_ == o.directed_ && domain_ == o.domain_ && label_ == o.label_ && center_ == o.center_ &&
               nodes_ == o.nodes_ && edges_ == o.edges_;
    }

  private:
    static std::uint64_t pair_key(NodeId a, NodeId b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }
    void check_node(NodeId v) const {
        if (v >= nodes_.size()) throw Error("node id out of range");
    }

    bool directed_ = true;
    WeightDomain domain_ = WeightDomain::non_negative;
    Label label_ = Label::unlabeled;
    NodeId center_ = 0;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, NodeId> index_;
    std::unordered_set<std::uint64_t> keys_;
};

struct DegreeProfile {
    std::vector<std::size_t> in;
    std::vector<std::size_t> out;
    std::vector<std::size_t> total;
};

/// Unweighted degree counts. For undirected graphs in = out = total.
inline DegreeProfile degrees(const TxGraph& g) {
    const auto n = g.num_nodes();
    DegreeProfile p{std::vector<std::size_t>(n), std::vector<std::size_t>(n),
                    std::vector<std::size_t>(n)};
    for (const auto& e : g.edges()) {
        ++p.total[e.src];
        ++p.total[e.dst];
        if (g.directed()) {
            ++p.out[e.src];
            ++p.in[e.dst];
        }
    }
    if (!g.directed()) {
        p.in = p.total;
        p.out = p.total;
    }
    return p;
}

/// Builds the directed transaction graph of `records`.
///
/// One edge per ordered address pair with the summed amount; self transfers
/// are dropped. Node 0 is the center, the remaining addresses follow in
/// lexicographic order, and edges are sorted, so the result does not depend
/// on the record order.
inline TxGraph aggregate_transactions(const std::vector<TransactionRecord>& records,
                                      const std::string& center) {
    if (records.empty()) throw Error("empty ego network");
    std::map<std::pair<std::string, std::string>, std::vector<double>> amounts;
    for (const auto& r : records) {
        if (!std::isfinite(r.amount) || r.amount < 0.0) throw Error("invalid amount");
        if (r.src == r.dst) continue;
        amounts[{r.src, r.dst}].push_back(r.amount);
    }

    std::vector<std::string> others;
    for (const auto& [pair, _] : amounts) {
        if (pair.first != center) others.push_back(pair.first);
        if (pair.second != center) others.push_back(pair.second);
    }
    std::sort(others.begin(), others.end());
    others.erase(std::unique(others.begin(), others.end()), others.end());

    TxGraph g(true);
    g.reserve(others.size() + 1, amounts.size());
    g.set_center(g.add_node(center));
    for (const auto& a : others) g.add_node(a);

    std::vector<Edge> edges;
    edges.reserve(amounts.size());
    for (auto& [pair, values] : amounts) {
        // Summing in sorted order makes the total independent of record order.
        std::sort(values.begin(), values.end());
        double sum = 0.0;
        for (double v : values) sum += v;
        edges.push_back(Edge{*g.find(pair.first), *g.find(pair.second), sum});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
    });
    for (const auto& e : edges) g.add_edge(e.src, e.dst, e.weight);
    return g;
}

/// Merges reciprocal pairs by summing their weights.
inline TxGraph to_undirected(const TxGraph& g) {
    if (!g.directed()) throw Error("already undirected");
    std::map<std::pair<NodeId, NodeId>, double> merged;
    for (const auto& e : g.edges()) {
        merged[{std::min(e.src, e.dst), std::max(e.src, e.dst)}] += e.weight;
    }
    TxGraph u(false);
    u.reserve(g.num_nodes(), merged.size());
    for (const auto& n : g.nodes()) u.add_node(n.address, n.attrs);
    if (g.num_nodes() > 0) u.set_center(g.center());
    u.set_label(g.label());
    for (const auto& [pair, w] : merged) u.add_edge(pair.first, pair.second, w);
    return u;
}

}  // namespace tsgn
