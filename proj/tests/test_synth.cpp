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

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "tsgn/synth.hpp"

using namespace tsgn;

namespace {

std::pair<std::size_t, std::size_t> center_in_out(const TxGraph& g) {
    const auto deg = degrees(g);
    return {deg.in[g.center()], deg.out[g.center()]};
}

GenProfile fixed_size(GenProfile p, std::size_t n) {
    p.min_neighbors = p.max_neighbors = n;
    return p;
}

}  // namespace

TEST(Synth, PhishingStarPointsInward) {
    auto g = generate_account_graph(fixed_size(GenProfile::phishing(), 10), 1);
    EXPECT_EQ(g.num_nodes(), 11u);
    EXPECT_EQ(g.num_edges(), 10u);
    EXPECT_EQ(g.label(), Label::phishing);
    EXPECT_EQ(g.node(g.center()).address, "c");
    EXPECT_EQ(center_in_out(g), std::make_pair(std::size_t{9}, std::size_t{1}));
}

TEST(Synth, NormalStarIsBalanced) {
    auto g = generate_account_graph(fixed_size(GenProfile::normal(), 10), 1);
    EXPECT_EQ(g.label(), Label::normal);
    EXPECT_EQ(center_in_out(g), std::make_pair(std::size_t{5}, std::size_t{5}));
}

TEST(Synth, FullNoiseFlipsEveryEdge) {
    auto p = fixed_size(GenProfile::phishing(), 10);
    p.noise = 1.0;
    EXPECT_EQ(center_in_out(generate_account_graph(p, 3)), std::make_pair(std::size_t{1}, std::size_t{9}));
}

TEST(Synth, ReciprocalAndExtraEdges) {
    auto p = fixed_size(GenProfile::normal(), 6);
    p.reciprocal_prob = 1.0;
    p.extra_edge_prob = 1.0;
    auto g = generate_account_graph(p, 5);
    EXPECT_EQ(g.num_edges(), 12u + 15u);
    for (NodeId v = 1; v <= 6; ++v) {
        EXPECT_TRUE(g.has_edge(0, v));
        EXPECT_TRUE(g.has_edge(v, 0));
    }
}

TEST(Synth, AmountsArePositive) {
    auto g = generate_account_graph(GenProfile::phishing(), 11);
    for (const auto& e : g.edges()) EXPECT_GT(e.weight, 0.0);
}

TEST(Synth, DeterministicPerSeed) {
    EXPECT_EQ(generate_account_graph(GenProfile::phishing(), 42), generate_account_graph(GenProfile::phishing(), 42));
    EXPECT_FALSE(generate_account_graph(GenProfile::phishing(), 42) ==
                 generate_account_graph(GenProfile::phishing(), 43));
    SynthConfig cfg;
    cfg.phishing_count = cfg.normal_count = 20;
    auto a = generate_dataset(cfg, 9), b = generate_dataset(cfg, 9);
    ASSERT_EQ(a.graphs.size(), 40u);
    for (std::size_t i = 0; i < a.graphs.size(); ++i) {
        EXPECT_EQ(a.graphs[i].id, b.graphs[i].id);
        EXPECT_EQ(a.graphs[i].graph, b.graphs[i].graph);
    }
}

TEST(Synth, InvalidConfigurations) {
    auto p = GenProfile::normal();
    p.min_neighbors = 30;
    p.max_neighbors = 20;
    EXPECT_THROW(generate_account_graph(p, 1), Error);
    p = GenProfile::normal();
    p.noise = 1.5;
    EXPECT_THROW(generate_account_graph(p, 1), Error);
    SynthConfig cfg;
    cfg.normal_count = 0;
    EXPECT_THROW(generate_dataset(cfg, 1), Error);
}

TEST(Synth, DatasetLayoutAndLabels) {
    SynthConfig cfg;
    cfg.phishing_count = 3;
    cfg.normal_count = 2;
    auto ds = generate_dataset(cfg, 100);
    ASSERT_EQ(ds.graphs.size(), 5u);
    EXPECT_EQ(ds.graphs[0].id, "syn000000");
    EXPECT_EQ(ds.graphs[4].id, "syn000004");
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(ds.graphs[i].graph.label(), i < 3 ? Label::phishing : Label::normal);
        EXPECT_EQ(ds.graphs[i].graph, generate_account_graph(i < 3 ? cfg.phishing : cfg.normal, 100 + i));
    }
}

TEST(Synth, MeanNeighborCountMatchesRange) {
    auto p = GenProfile::normal();
    p.min_neighbors = 20;
    p.max_neighbors = 30;
    double total = 0;
    for (std::uint64_t s = 0; s < 500; ++s) {
        auto g = generate_account_graph(p, s);
        const auto n = g.num_nodes() - 1;
        EXPECT_GE(n, 20u);
        EXPECT_LE(n, 30u);
        total += static_cast<double>(n);
    }
    const double mean = total / 500;
    EXPECT_GE(mean, 22.5);
    EXPECT_LE(mean, 27.5);
}

TEST(Synth, GraphsSatisfyInvariants) {
    SynthConfig cfg;
    cfg.phishing_count = cfg.normal_count = 50;
    cfg.phishing.reciprocal_prob = cfg.normal.reciprocal_prob = 0.3;
    cfg.phishing.extra_edge_prob = cfg.normal.extra_edge_prob = 0.05;
    for (const auto& [id, g] : generate_dataset(cfg, 77).graphs) {
        EXPECT_TRUE(g.directed());
        std::set<std::pair<NodeId, NodeId>> seen;
        for (const auto& e : g.edges()) {
            EXPECT_NE(e.src, e.dst) << id;
            EXPECT_TRUE(seen.emplace(e.src, e.dst).second) << id;
            EXPECT_TRUE(std::isfinite(e.weight));
        }
        // every neighbor touches the center
        for (NodeId v = 1; v < g.num_nodes(); ++v) EXPECT_TRUE(g.has_edge(0, v) || g.has_edge(v, 0));
    }
}

TEST(Synth, InboundShareSeparatesClassesWithoutNoise) {
    SynthConfig cfg;
    cfg.phishing_count = cfg.normal_count = 100;
    for (const auto& [id, g] : generate_dataset(cfg, 5).graphs) {
        const auto [in, out] = center_in_out(g);
        const double share = static_cast<double>(in) / static_cast<double>(in + out);
        if (g.label() == Label::phishing) {
            EXPECT_GE(share, 0.85) << id;
        } else {
            EXPECT_LE(share, 0.55) << id;
        }
    }
}

TEST(Synth, ConfigFromJson) {
    auto cfg = synth_config_from_json(nlohmann::json::parse(
        R"({"noise": 0.1, "phishing": {"count": 7, "neighbors": [5, 6]}, "normal": {"count": 8, "noise": 0.2}})"));
    EXPECT_EQ(cfg.phishing_count, 7u);
    EXPECT_EQ(cfg.normal_count, 8u);
    EXPECT_EQ(cfg.phishing.min_neighbors, 5u);
    EXPECT_DOUBLE_EQ(cfg.phishing.noise, 0.1);
    EXPECT_DOUBLE_EQ(cfg.normal.noise, 0.2);
    EXPECT_DOUBLE_EQ(cfg.phishing.in_fraction, 0.9);
    auto back = synth_config_from_json(synth_config_to_json(cfg));
    EXPECT_EQ(back.phishing_count, 7u);
    EXPECT_EQ(back.normal.max_neighbors, cfg.normal.max_neighbors);
    EXPECT_THROW(synth_config_from_json(nlohmann::json::parse(R"({"normal": {"neighbors": [9, 3]}})")), Error);
}
