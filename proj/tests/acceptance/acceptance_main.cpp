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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Thresholds are fixed here and never relaxed at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "tsgn/tsgn.hpp"

using namespace tsgn;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

using Keyed = std::map<std::pair<oracle::AddressPair, oracle::AddressPair>, double>;

Keyed line_edges(const LineGraphOutput& lg) {
    Keyed out;
    for (const auto& e : lg.graph.edges()) {
        oracle::AddressPair a{lg.origin[e.src].src, lg.origin[e.src].dst};
        oracle::AddressPair b{lg.origin[e.dst].src, lg.origin[e.dst].dst};
        if (lg.kind == LineGraphKind::tsgn) {
            if (a.second < a.first) std::swap(a.first, a.second);
            if (b.second < b.first) std::swap(b.first, b.second);
            if (b < a) std::swap(a, b);
        }
        out[{a, b}] = e.weight;
    }
    return out;
}

bool same_edges(const Keyed& got, const std::set<oracle::LineEdge>& want, std::size_t expected_count) {
    if (got.size() != want.size() || got.size() != expected_count) return false;
    for (const auto& [a, b, w] : want) {
        auto it = got.find({a, b});
        if (it == got.end() || std::abs(it->second - w) > 1e-12) return false;
    }
    return true;
}

TxGraph build(std::initializer_list<std::tuple<const char*, const char*, double>> edges, bool directed = true) {
    TxGraph g(directed);
    for (const auto& [s, d, w] : edges) {
        const auto from = g.add_node(s);
        g.add_edge(from, g.add_node(d), w);
    }
    return g;
}

TxGraph permuted(const TxGraph& g, std::uint64_t seed) {
    std::vector<NodeId> perm(g.num_nodes());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(seed));
    std::vector<NodeId> inverse(perm.size());
    for (NodeId i = 0; i < perm.size(); ++i) inverse[perm[i]] = i;
    TxGraph h(g.directed(), g.weight_domain());
    for (NodeId i = 0; i < perm.size(); ++i) h.add_node("p" + std::to_string(i), g.node(inverse[i]).attrs);
    for (const auto& e : g.edges()) h.add_edge(perm[e.src], perm[e.dst], e.weight);
    return h;
}

// ---------------------------------------------------------------------------

Outcome line_graph_correctness() {
    Outcome o;
    const auto t0 = Clock::now();
    // 200 graphs with at least one edge; edgeless draws have no line graph
    std::size_t graphs = 0;
    for (std::uint64_t seed = 0; graphs < 200; ++seed) {
        const std::size_t n = 2 + seed % 14;  // 2..15
        const double p = seed % 2 ? 0.5 : 0.2;
        auto g = oracle::random_digraph(n, p, 1000 + seed);
        if (g.num_edges() == 0) continue;
        ++graphs;
        const auto deg = degrees(g);
        std::size_t in_out = 0;
        for (std::size_t v = 0; v < n; ++v) in_out += deg.in[v] * deg.out[v];
        std::size_t choose2 = 0;
        for (auto k : degrees(to_undirected(g)).total) choose2 += k < 2 ? 0 : k * (k - 1) / 2;

        auto d = build_directed_tsgn(g);
        o.require(d.graph.num_edges() == in_out, "D-TSGN count != sum in*out, seed " + std::to_string(seed));
        o.require(same_edges(line_edges(d), oracle::dtsgn_edges(g), in_out),
                  "D-TSGN differs from oracle, seed " + std::to_string(seed));
        auto t = build_tsgn(g);
        o.require(t.graph.num_edges() == choose2, "TSGN count != sum C(deg,2), seed " + std::to_string(seed));
        o.require(same_edges(line_edges(t), oracle::tsgn_edges(g), choose2),
                  "TSGN differs from oracle, seed " + std::to_string(seed));
    }
    const double s = seconds_since(t0);
    o.require(s < 10.0, "runtime " + fmt("%.2f s", s));
    if (o.pass) o.detail = std::to_string(graphs) + " graphs, " + fmt("%.2f s", s);
    return o;
}

Outcome toy_constructions() {
    Outcome o;
    auto star = build({{"a", "c", 1}, {"b", "c", 1}, {"c", "d", 1}, {"e", "c", 1}, {"c", "f", 1}});
    auto k5 = build_tsgn(star);
    bool complete = k5.graph.num_nodes() == 5 && k5.graph.num_edges() == 10;
    for (NodeId i = 0; i < 5 && complete; ++i) {
        for (NodeId j = i + 1; j < 5; ++j) complete = complete && k5.graph.has_edge(i, j);
    }
    o.require(complete, "5-edge star does not give K5");

    auto fig = build({{"a", "c", 1}, {"c", "b", 1}, {"e", "d", 1}, {"d", "b", 1}, {"a", "b", 1}});
    auto d = line_edges(build_directed_tsgn(fig));
    using P = oracle::AddressPair;
    o.require(d.size() == 2 && d.contains({P{"a", "c"}, P{"c", "b"}}) && d.contains({P{"e", "d"}, P{"d", "b"}}),
              "toy directed topology gives " + std::to_string(d.size()) + " edges, want the 2 head-to-tail links");
    if (o.pass) o.detail = "K5 with 10 edges; 2 directed edges";
    return o;
}

Outcome weight_mappings() {
    Outcome o;
    const double mean = weight_map(2, 4, WeightMapping::mean), logsum = weight_map(2, 4, WeightMapping::logsum);
    o.require(std::abs(mean - 3.0) <= 1e-12, "mean(2,4) = " + fmt("%.17g", mean));
    o.require(std::abs(logsum - std::log(6.0)) <= 1e-12, "logsum(2,4) = " + fmt("%.17g", logsum));
    // and as realized on a 2-edge path
    auto path = build({{"a", "b", 2}, {"b", "c", 4}});
    o.require(std::abs(build_tsgn(path).graph.edges().at(0).weight - 3.0) <= 1e-12, "TSGN path weight");
    o.require(std::abs(build_directed_tsgn(path).graph.edges().at(0).weight - std::log(6.0)) <= 1e-12,
              "D-TSGN path weight");
    if (o.pass) o.detail = "mean=3, logsum=ln 6";
    return o;
}

Outcome feature_oracle() {
    Outcome o;
    auto check = [&](const TxGraph& g, const std::vector<double>& want, const std::string& what) {
        const auto got = handcrafted_vector(g).values;
        for (std::size_t i = 0; i < want.size(); ++i) {
            const double tol = i == 5 ? 1e-6 : 1e-9;
            o.require(std::abs(got[i] - want[i]) <= tol,
                      what + ": " + FeatureVector::names()[i] + " = " + fmt("%.12g", got[i]) + ", want " +
                          fmt("%.12g", want[i]));
        }
    };
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 1 + seed % 12;
        const double p = 0.15 + 0.1 * static_cast<double>(seed % 6);
        auto g = seed % 3 == 0 ? oracle::random_digraph(n, p, 5000 + seed) : oracle::random_graph(n, p, 5000 + seed);
        const auto want = oracle::features(g);
        const auto got = handcrafted_vector(g).values;
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (i != 5) worst = std::max(worst, std::abs(got[i] - want[i]));
        }
        check(g, want, "random graph seed " + std::to_string(seed));
    }
    auto undirected = [](std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> es) {
        TxGraph g(false);
        for (std::size_t i = 0; i < n; ++i) g.add_node("v" + std::to_string(i));
        for (auto [a, b] : es) g.add_edge(a, b, 1.0);
        return g;
    };
    check(undirected(3, {{0, 1}, {1, 2}}), {3, 2, 4.0 / 3, 2.0 / 3, 0, std::sqrt(2.0), 2.0 / 3, 1.0 / 3, 7.0 / 9, 5.0 / 3},
          "P3");
    check(undirected(3, {{0, 1}, {1, 2}, {0, 2}}), {3, 3, 2, 0, 1, 2, 1, 0, 1, 2}, "K3");
    check(undirected(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}), {5, 4, 8.0 / 5, 4.0 / 5, 0, 2, 0.4, 6.0 / 5, 23.0 / 35, 17.0 / 5},
          "star-4");
    if (o.pass) o.detail = "100 random graphs + P3/K3/star-4, max deviation " + fmt("%.1e", worst);
    return o;
}

Outcome f1_equivalence() {
    Outcome o;
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 80;
        std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0, 1)(rng));
        std::vector<Label> truth(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = coin(rng) ? Label::phishing : Label::normal;
            pred[i] = coin(rng) ? Label::phishing : Label::normal;
        }
        worst = std::max(worst, std::abs(f1_score(truth, pred, Label::phishing) - oracle::f1(truth, pred, Label::phishing)));
    }
    o.require(worst <= 1e-12, "max deviation " + fmt("%.3e", worst));
    const std::vector<Label> neg{Label::normal, Label::normal}, pos{Label::phishing, Label::phishing};
    o.require(f1_score(neg, neg, Label::phishing) == 0.0, "no positives at all should give 0");
    o.require(f1_score(pos, neg, Label::phishing) == 0.0, "zero recall should give 0");
    o.require(f1_score(neg, pos, Label::phishing) == 0.0, "zero precision should give 0");
    if (o.pass) o.detail = "1000 pairs, max deviation " + fmt("%.1e", worst);
    return o;
}

Outcome sparsity_and_benchmark() {
    Outcome o;
    const auto t0 = Clock::now();
    GenProfile p = GenProfile::phishing();
    p.min_neighbors = 200;
    p.max_neighbors = 1000;
    Dataset ds{"bench", {}};
    for (std::uint64_t i = 0; i < 100; ++i) ds.graphs.push_back({"b" + std::to_string(i), generate_account_graph(p, 9000 + i)});
    auto r = bench_construction(ds, 3);
    for (const auto& row : r.rows) {
        o.require(row.dtsgn_edges <= row.tsgn_edges, "graph " + row.id + " has a denser D-TSGN");
    }
    o.require(r.dtsgn_seconds * 5.0 <= r.tsgn_seconds,
              "D-TSGN " + fmt("%.3f s", r.dtsgn_seconds) + " vs TSGN " + fmt("%.3f s", r.tsgn_seconds));
    const double s = seconds_since(t0);
    o.require(s < 60.0, "runtime " + fmt("%.1f s", s));
    if (o.pass) {
        o.detail = "TSGN " + fmt("%.3f s", r.tsgn_seconds) + ", D-TSGN " + fmt("%.3f s", r.dtsgn_seconds) + ", ratio " +
                   fmt("%.1fx", r.ratio());
    }
    return o;
}

RunConfig classification_config(const fs::path& out, bool null_model) {
    RunConfig c;
    c.seed = 7;
    c.out = out.string();
    c.synth.phishing_count = c.synth.normal_count = 500;
    c.synth.phishing.noise = c.synth.normal.noise = 0.05;
    c.synth.null_model = null_model;
    c.transform = TransformKind::dtsgn;
    c.features = FeatureMethod::hand;
    c.eval.runs = 100;
    c.threads = default_threads();
    return c;
}

Outcome classification_sanity(const fs::path& work) {
    Outcome o;
    const auto t0 = Clock::now();
    const auto signal = run_pipeline(classification_config(work / "ac7_signal", false)).report.f1_summary;
    const auto null = run_pipeline(classification_config(work / "ac7_null", true)).report.f1_summary;
    o.require(signal.mean >= 0.90, "separable data mean F1 " + fmt("%.4f", signal.mean));
    o.require(null.mean >= 0.4 && null.mean <= 0.6, "null data mean F1 " + fmt("%.4f", null.mean));
    const double s = seconds_since(t0);
    o.require(s < 180.0, "runtime " + fmt("%.1f s", s));
    if (o.pass) {
        o.detail = "F1 " + format_cell(signal) + ", null " + format_cell(null) + ", " + fmt("%.1f s", s);
    }
    return o;
}

Outcome embedding_properties() {
    Outcome o;
    SynthConfig cfg;
    cfg.phishing_count = cfg.normal_count = 30;
    cfg.phishing.reciprocal_prob = cfg.normal.reciprocal_prob = 0.2;
    auto ds = generate_dataset(cfg, 31);
    for (auto& e : ds.graphs) e.graph = with_attributes(e.graph, initial_node_attributes(e.graph, AttributeKind::tn));

    const WlOptions wl;
    for (std::size_t i = 0; i < 50; ++i) {
        const auto& g = ds.graphs[i].graph;
        const auto doc = wl_relabel(g, wl);
        o.require(doc.tokens.size() == (wl.height + 1) * g.num_nodes(), "token count identity, graph " + ds.graphs[i].id);
        auto other = wl_relabel(permuted(g, i), wl);
        std::multiset<std::string> a(doc.tokens.begin(), doc.tokens.end()), b(other.tokens.begin(), other.tokens.end());
        o.require(a == b, "permuted copy of " + ds.graphs[i].id + " gives a different document");
    }

    auto corpus = build_corpus(ds, wl);
    EmbeddingParams p;
    p.dimension = 64;
    p.epochs = 50;
    p.seed = 5;
    const auto t0 = Clock::now();
    auto m = train_embeddings(corpus, p);
    const double s = seconds_since(t0);
    o.require(s < 30.0, "training took " + fmt("%.1f s", s));
    o.require(m.epoch_loss.back() < m.epoch_loss.front(),
              "loss " + fmt("%.4f", m.epoch_loss.front()) + " -> " + fmt("%.4f", m.epoch_loss.back()));
    o.require(train_embeddings(corpus, p).vectors == m.vectors, "vectors differ between identical runs");
    if (o.pass) {
        o.detail = "loss " + fmt("%.3f", m.epoch_loss.front()) + " -> " + fmt("%.3f", m.epoch_loss.back()) + " in " +
                   fmt("%.1f s", s);
    }
    return o;
}

Outcome determinism(const fs::path& work) {
    Outcome o;
    auto strip = [](const fs::path& file) {
        auto j = json::parse(read_text(file));
        j.erase("timing");
        return j.dump(2);
    };
    for (auto method : {FeatureMethod::hand, FeatureMethod::embed}) {
        const std::string tag(to_string(method));
        RunConfig c;
        c.seed = 99;
        c.synth.phishing_count = c.synth.normal_count = 60;
        c.features = method;
        c.embedding.dimension = 32;
        c.embedding.epochs = 20;
        c.eval.runs = 20;
        c.forest.n_trees = 30;
        c.out = (work / ("ac9_" + tag + "_a")).string();
        run_pipeline(c);
        c.out = (work / ("ac9_" + tag + "_b")).string();
        c.threads = default_threads() + 1;  // thread count must not leak into results
        run_pipeline(c);
        o.require(strip(work / ("ac9_" + tag + "_a") / "report.json") == strip(work / ("ac9_" + tag + "_b") / "report.json"),
                  tag + " reports differ");
    }
    if (o.pass) o.detail = "hand and embed reports identical";
    return o;
}

}  // namespace

int main() {
    const fs::path work = fs::temp_directory_path() / "tsgn_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"AC1 line-graph correctness", line_graph_correctness},
        {"AC2 toy constructions", toy_constructions},
        {"AC3 weight mappings", weight_mappings},
        {"AC4 handcrafted-feature oracle", feature_oracle},
        {"AC5 F1 equivalence", f1_equivalence},
        {"AC6 sparsity and construction time", sparsity_and_benchmark},
        {"AC7 end-to-end classification", [&] { return classification_sanity(work); }},
        {"AC8 WL and embedding properties", embedding_properties},
        {"AC9 determinism", [&] { return determinism(work); }},
    };

    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    fs::remove_all(work);
    return failed == 0 ? 0 : 1;
}
