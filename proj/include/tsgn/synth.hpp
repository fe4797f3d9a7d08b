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
#include <cstdio>
#include <cstdint>
#include <random>
#include <string>

#include <json.hpp>

#include "tsgn/graph.hpp"
#include "tsgn/io.hpp"

namespace tsgn {

/// Parameters of one synthetic account class.
struct GenProfile {
    Label cls = Label::normal;
    std::size_t min_neighbors = 10;
    std::size_t max_neighbors = 40;
    double in_fraction = 0.5;      // share of edges pointing into the center
    double amount_mu = 0.0;        // log-normal amounts, ETH
    double amount_sigma = 1.0;
    double reciprocal_prob = 0.0;  // chance of a reverse edge per neighbor
    double noise = 0.0;            // chance of flipping each edge's direction
    double extra_edge_prob = 0.0;  // chance of a link per neighbor pair

    static GenProfile phishing() {
        GenProfile p;
        p.cls = Label::phishing;
        p.in_fraction = 0.9;
        return p;
    }
    static GenProfile normal() { return GenProfile{}; }

    void validate() const {
        if (min_neighbors > max_neighbors) throw Error("degenerate range: min_neighbors > max_neighbors");
        for (double p : {in_fraction, reciprocal_prob, noise, extra_edge_prob}) {
            if (!(p >= 0.0 && p <= 1.0)) throw Error("probability outside [0, 1]");
        }
        if (!(amount_sigma >= 0.0) || !std::isfinite(amount_mu)) throw Error("invalid amount distribution");
    }

    double expected_neighbors() const {
        return (static_cast<double>(min_neighbors) + static_cast<double>(max_neighbors)) / 2.0;
    }
};

/// Star-shaped ego network: round(in_fraction * n) neighbors send to the
/// center, the rest receive from it, before noise flips.
inline TxGraph generate_account_graph(const GenProfile& profile, std::uint64_t seed) {
    profile.validate();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> size(profile.min_neighbors, profile.max_neighbors);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::lognormal_distribution<double> amount(profile.amount_mu, profile.amount_sigma);

    const auto n = size(rng);
    const auto inbound = static_cast<std::size_t>(std::lround(profile.in_fraction * static_cast<double>(n)));

    TxGraph g(true);
    g.reserve(n + 1, n * 2);
    const NodeId center = g.add_node("c");
    g.set_center(center);
    g.set_label(profile.cls);
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId v = g.add_node("n" + std::to_string(i));
        bool into_center = i < inbound;
        if (coin(rng) < profile.noise) into_center = !into_center;
        const double w = amount(rng);
        if (into_center) {
            g.add_edge(v, center, w);
        } else {
            g.add_edge(center, v, w);
        }
        if (coin(rng) < profile.reciprocal_prob) {
            const double back = amount(rng);
            if (into_center) {
                g.add_edge(center, v, back);
            } else {
                g.add_edge(v, center, back);
            }
        }
    }
    if (profile.extra_edge_prob > 0.0) {
        for (NodeId a = 1; a <= n; ++a) {
            for (NodeId b = a + 1; b <= n; ++b) {
                if (coin(rng) >= profile.extra_edge_prob) continue;
                const double w = amount(rng);
                if (coin(rng) < 0.5) {
                    g.add_edge(a, b, w);
                } else {
                    g.add_edge(b, a, w);
                }
            }
        }
    }
    return g;
}

struct SynthConfig {
    std::size_t phishing_count = 500;
    std::size_t normal_count = 500;
    GenProfile phishing = GenProfile::phishing();
    GenProfile normal = GenProfile::normal();
    /// Both classes drawn from the normal profile; labels carry no signal.
    bool null_model = false;
};

/// Phishing graphs first, then normal; graph i uses seed + i.
inline Dataset generate_dataset(const SynthConfig& cfg, std::uint64_t seed) {
    if (cfg.phishing_count == 0 || cfg.normal_count == 0) throw Error("zero counts");
    Dataset ds{cfg.null_model ? "synthetic-null" : "synthetic", {}};
    ds.graphs.reserve(cfg.phishing_count + cfg.normal_count);
    std::uint64_t index = 0;
    auto emit = [&](GenProfile profile, Label label, std::size_t count) {
        profile.cls = label;
        for (std::size_t k = 0; k < count; ++k, ++index) {
            char id[32];
            std::snprintf(id, sizeof id, "syn%06llu", static_cast<unsigned long long>(index));
            ds.graphs.push_back(DatasetEntry{id, generate_account_graph(profile, seed + index)});
        }
    };
    emit(cfg.null_model ? cfg.normal : cfg.phishing, Label::phishing, cfg.phishing_count);
    emit(cfg.normal, Label::normal, cfg.normal_count);
    return ds;
}

inline GenProfile profile_from_json(const nlohmann::json& j, GenProfile p) {
    if (j.contains("neighbors")) {
        p.min_neighbors = j["neighbors"].at(0).get<std::size_t>();
        p.max_neighbors = j["neighbors"].at(1).get<std::size_t>();
    }
    p.in_fraction = j.value("in_fraction", p.in_fraction);
    p.amount_mu = j.value("amount_mu", p.amount_mu);
    p.amount_sigma = j.value("amount_sigma", p.amount_sigma);
    p.reciprocal_prob = j.value("reciprocal_prob", p.reciprocal_prob);
    p.noise = j.value("noise", p.noise);
    p.extra_edge_prob = j.value("extra_edge_prob", p.extra_edge_prob);
    p.validate();
    return p;
}

inline nlohmann::json profile_to_json(const GenProfile& p) {
    return {{"neighbors", {p.min_neighbors, p.max_neighbors}},
            {"in_fraction", p.in_fraction},
            {"amount_mu", p.amount_mu},
            {"amount_sigma", p.amount_sigma},
            {"reciprocal_prob", p.reciprocal_prob},
            {"noise", p.noise},
            {"extra_edge_prob", p.extra_edge_prob}};
}

/// Reads {"phishing": {"count": .., profile keys}, "normal": {...}, "null": bool}.
/// A top-level "noise" applies to both classes unless a class overrides it.
inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
    SynthConfig c;
    if (j.contains("noise")) {
        c.phishing.noise = c.normal.noise = j["noise"].get<double>();
    }
    if (j.contains("phishing")) {
        c.phishing_count = j["phishing"].value("count", c.phishing_count);
        c.phishing = profile_from_json(j["phishing"], c.phishing);
    }
    if (j.contains("normal")) {
        c.normal_count = j["normal"].value("count", c.normal_count);
        c.normal = profile_from_json(j["normal"], c.normal);
    }
    c.null_model = j.value("null", false);
    c.phishing.cls = Label::phishing;
    c.normal.cls = Label::normal;
    return c;
}

inline nlohmann::json synth_config_to_json(const SynthConfig& c) {
    auto ph = profile_to_json(c.phishing);
    ph["count"] = c.phishing_count;
    auto no = profile_to_json(c.normal);
    no["count"] = c.normal_count;
    return {{"phishing", ph}, {"normal", no}, {"null", c.null_model}};
}

}  // namespace tsgn
