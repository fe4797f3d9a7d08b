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

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsgn/graph.hpp"

namespace tsgn {

enum class LineGraphKind { tsgn, directed_tsgn };

inline std::string_view to_string(LineGraphKind k) {
    return k == LineGraphKind::tsgn ? "tsgn" : "directed-tsgn";
}

inline LineGraphKind parse_line_graph_kind(std::string_view s) {
    if (s == "tsgn") return LineGraphKind::tsgn;
    if (s == "directed-tsgn" || s == "dtsgn") return LineGraphKind::directed_tsgn;
    throw Error("unknown line graph kind '" + std::string(s) + "'");
}

/// The input edge a line-graph node stands for.
struct OriginEdge {
    std::string src;
    std::string dst;
    double weight = 0.0;

    bool operator==(const OriginEdge&) const = default;
};

struct LineGraphOutput {
    TxGraph graph;
    std::vector<OriginEdge> origin;  // origin[i] is the edge behind node i
    LineGraphKind kind = LineGraphKind::tsgn;
};

enum class WeightMapping { mean, logsum };

inline constexpr double kLogSumFloor = 1e-18;  // one wei, in ETH

inline double weight_map(double w1, double w2, WeightMapping kind) {
    if (kind == WeightMapping::mean) return (w1 + w2) / 2.0;
    return std::log(std::max(w1 + w2, kLogSumFloor));
}

namespace detail {

// One node per input edge, carrying the edge weight as its only attribute.
inline LineGraphOutput line_graph_nodes(const TxGraph& g, bool directed, LineGraphKind kind,
                                        std::size_t expected_edges) {
    LineGraphOutput out{TxGraph(directed, directed ? WeightDomain::real : WeightDomain::non_negative), {}, kind};
    out.graph.reserve(g.num_edges(), expected_edges);
    out.origin.reserve(g.num_edges());
    const std::string prefix = directed ? "d" : "t";
    std::optional<NodeId> center;
    for (const auto& e : g.edges()) {
        auto id = out.graph.add_node(prefix + std::to_string(out.origin.size()), {e.weight});
        out.origin.push_back(OriginEdge{g.node(e.src).address, g.node(e.dst).address, e.weight});
        if (!center && (e.src == g.center() || e.dst == g.center())) center = id;
    }
    out.graph.set_center(center.value_or(0));
    out.graph.set_label(g.label());
    return out;
}

}  // namespace detail

/// Undirected weighted line graph of the undirected-processed input.
///
/// Two nodes are adjacent when their edges share an address; the edge weight
/// is the mean of the two transaction weights.
inline LineGraphOutput build_tsgn(const TxGraph& g) {
    const TxGraph u = g.directed() ? to_undirected(g) : g;
    if (u.num_edges() == 0) throw Error("empty line graph");

    std::vector<std::vector<NodeId>> incident(u.num_nodes());
    for (NodeId i = 0; i < u.num_edges(); ++i) {
        incident[u.edges()[i].src].push_back(i);
        incident[u.edges()[i].dst].push_back(i);
    }
    std::size_t expected = 0;
    for (const auto& inc : incident) expected += inc.size() * (inc.size() - 1) / 2;

    auto out = detail::line_graph_nodes(u, false, LineGraphKind::tsgn, expected);
    const auto& edges = u.edges();
    for (const auto& inc : incident) {
        for (std::size_t a = 0; a < inc.size(); ++a) {
            for (std::size_t b = a + 1; b < inc.size(); ++b) {
                out.graph.add_edge(inc[a], inc[b],
                                   weight_map(edges[inc[a]].weight, edges[inc[b]].weight,
                                              WeightMapping::mean));
            }
        }
    }
    return out;
}

/// Directed line graph: node(a->b) links to node(b->c) only, weighted by
/// ln(W1 + W2).
inline LineGraphOutput build_directed_tsgn(const TxGraph& g) {
    if (!g.directed()) throw Error("directed-tsgn requires a directed graph");
    if (g.num_edges() == 0) throw Error("empty line graph");

    std::vector<std::vector<NodeId>> in(g.num_nodes()), out_edges(g.num_nodes());
    for (NodeId i = 0; i < g.num_edges(); ++i) {
        out_edges[g.edges()[i].src].push_back(i);
        in[g.edges()[i].dst].push_back(i);
    }
    std::size_t expected = 0;
    for (std::size_t v = 0; v < g.num_nodes(); ++v) expected += in[v].size() * out_edges[v].size();

    auto out = detail::line_graph_nodes(g, true, LineGraphKind::directed_tsgn, expected);
    const auto& edges = g.edges();
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
        for (NodeId head : in[v]) {
            for (NodeId tail : out_edges[v]) {
                out.graph.add_edge(head, tail,
                                   weight_map(edges[head].weight, edges[tail].weight,
                                              WeightMapping::logsum));
            }
        }
    }
    return out;
}

inline LineGraphOutput build_line_graph(const TxGraph& g, LineGraphKind kind) {
    return kind == LineGraphKind::tsgn ? build_tsgn(g) : build_directed_tsgn(g);
}

enum class AttributeKind { tn, line_graph };

/// [in-degree, out-degree] per node for transaction networks, [origin weight]
/// per node for line graphs.
inline std::vector<std::vector<double>> initial_node_attributes(
    const TxGraph& g, AttributeKind kind,
    std::optional<std::span<const OriginEdge>> origin = std::nullopt) {
    std::vector<std::vector<double>> attrs(g.num_nodes());
    if (kind == AttributeKind::tn) {
        auto deg = degrees(g);
        for (std::size_t v = 0; v < g.num_nodes(); ++v) {
            attrs[v] = {static_cast<double>(deg.in[v]), static_cast<double>(deg.out[v])};
        }
        return attrs;
    }
    if (!origin) throw Error("line-graph attributes need an origin mapping");
    if (origin->size() != g.num_nodes()) throw Error("origin mapping does not match node count");
    for (std::size_t v = 0; v < g.num_nodes(); ++v) attrs[v] = {(*origin)[v].weight};
    return attrs;
}

inline std::vector<std::vector<double>> initial_node_attributes(const LineGraphOutput& lg) {
    return initial_node_attributes(lg.graph, AttributeKind::line_graph,
                                   std::span<const OriginEdge>(lg.origin));
}

/// Copy of `g` with its nodes' attributes replaced.
inline TxGraph with_attributes(TxGraph g, const std::vector<std::vector<double>>& attrs) {
    for (NodeId v = 0; v < g.num_nodes(); ++v) g.set_attrs(v, attrs[v]);
    return g;
}

}  // namespace tsgn
