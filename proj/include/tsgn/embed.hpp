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
#include <cstdio>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsgn/features.hpp"
#include "tsgn/graph.hpp"
#include "tsgn/io.hpp"

namespace tsgn {

struct WlOptions {
    std::size_t height = 3;
    bool use_direction = true;
    bool use_weight = true;
};

/// Rooted-subgraph tokens of one graph, iteration-major: (height + 1) * |V|.
struct WlDocument {
    std::string graph_id;
    std::vector<std::string> tokens;
};

namespace detail {

inline std::string hex_token(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline void append_u64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Degree pair for transaction networks, log10 weight bucket for line graphs,
// a constant otherwise.
inline std::string initial_signature(const Node& n, bool use_weight) {
    if (n.attrs.size() == 2) {
        return "deg:" + std::to_string(std::llround(n.attrs[0])) + "," +
               std::to_string(std::llround(n.attrs[1]));
    }
    if (n.attrs.size() == 1 && use_weight) {
        return "w:" + std::to_string(static_cast<long long>(std::floor(std::log10(n.attrs[0] + 1e-18))));
    }
    return "const";
}

}  // namespace detail

/// Weisfeiler-Lehman relabeling. Each round's label is a 64-bit FNV-1a digest
/// of the node's label followed by its sorted (tag, neighbor label) list; the
/// tag separates in/out neighbors when direction is used on a directed graph.
inline WlDocument wl_relabel(const TxGraph& g, const WlOptions& opt, std::string graph_id = {}) {
    const auto n = g.num_nodes();
    const bool directed = opt.use_direction && g.directed();
    constexpr char kIn = 'i', kOut = 'o', kAny = 'u';

    std::vector<std::vector<std::pair<char, NodeId>>> nbrs(n);
    if (directed) {
        for (const auto& e : g.edges()) {
            nbrs[e.src].emplace_back(kOut, e.dst);
            nbrs[e.dst].emplace_back(kIn, e.src);
        }
    } else {
        const auto s = project_simple(g);
        for (NodeId v = 0; v < n; ++v) {
            for (NodeId u : s.adj[v]) nbrs[v].emplace_back(kAny, u);
        }
    }

    WlDocument doc{std::move(graph_id), {}};
    doc.tokens.reserve((opt.height + 1) * n);
    std::vector<std::uint64_t> label(n), next(n);
    for (NodeId v = 0; v < n; ++v) {
        label[v] = fnv1a(detail::initial_signature(g.node(v), opt.use_weight));
        doc.tokens.push_back(detail::hex_token(label[v]));
    }

    std::vector<std::pair<char, std::uint64_t>> sig;
    std::string bytes;
    for (std::size_t round = 1; round <= opt.height; ++round) {
        for (NodeId v = 0; v < n; ++v) {
            sig.clear();
            for (auto [tag, u] : nbrs[v]) sig.emplace_back(tag, label[u]);
            std::sort(sig.begin(), sig.end());
            bytes.clear();
            detail::append_u64(bytes, label[v]);
            for (auto [tag, l] : sig) {
                bytes.push_back(tag);
                detail::append_u64(bytes, l);
            }
            next[v] = fnv1a(bytes);
        }
        std::swap(label, next);
        for (NodeId v = 0; v < n; ++v) doc.tokens.push_back(detail::hex_token(label[v]));
    }
    return doc;
}

struct Vocabulary {
    std::vector<std::string> tokens;  // sorted
    std::vector<std::uint64_t> counts;
    std::unordered_map<std::string, std::uint32_t> index;

    std::size_t size() const { return tokens.size(); }
    bool contains(const std::string& t) const { return index.contains(t); }
};

struct Corpus {
    std::vector<WlDocument> documents;
    std::vector<std::vector<std::uint32_t>> token_ids;  // per document
    Vocabulary vocabulary;
};

inline Corpus build_corpus(const std::vector<std::pair<std::string, const TxGraph*>>& graphs,
                           const WlOptions& opt) {
    if (graphs.empty()) throw Error("cannot build a corpus from an empty dataset");
    Corpus c;
    c.documents.reserve(graphs.size());
    std::unordered_map<std::string, std::uint64_t> freq;
    for (const auto& [id, g] : graphs) {
        c.documents.push_back(wl_relabel(*g, opt, id));
        for (const auto& t : c.documents.back().tokens) ++freq[t];
    }
    auto& v = c.vocabulary;
    v.tokens.reserve(freq.size());
    for (const auto& [t, _] : freq) v.tokens.push_back(t);
    std::sort(v.tokens.begin(), v.tokens.end());
    for (std::uint32_t i = 0; i < v.tokens.size(); ++i) {
        v.counts.push_back(freq[v.tokens[i]]);
        v.index.emplace(v.tokens[i], i);
    }
    for (const auto& d : c.documents) {
        std::vector<std::uint32_t> ids;
        ids.reserve(d.tokens.size());
        for (const auto& t : d.tokens) ids.push_back(v.index.at(t));
        c.token_ids.push_back(std::move(ids));
    }
    return c;
}

inline Corpus build_corpus(const Dataset& ds, const WlOptions& opt) {
    std::vector<std::pair<std::string, const TxGraph*>> graphs;
    for (const auto& e : ds.graphs) graphs.emplace_back(e.id, &e.graph);
    return build_corpus(graphs, opt);
}

struct EmbeddingParams {
    std::size_t dimension = 128;
    double learning_rate = 0.025;
    std::size_t epochs = 200;
    std::size_t negatives = 5;
    std::uint64_t seed = 1;

    /// 1024 dimensions, 1000 epochs: the large reference setting.
    static EmbeddingParams full_scale() {
        EmbeddingParams p;
        p.dimension = 1024;
        p.epochs = 1000;
        return p;
    }
};

struct EmbeddingModel {
    EmbeddingParams params;
    std::vector<std::string> graph_ids;
    std::vector<std::vector<float>> vectors;
    std::vector<double> epoch_loss;  // mean negative log-likelihood per positive pair
    std::size_t vocabulary_size = 0;
};

/// PV-DBOW with negative sampling: each graph vector is trained to score its
/// own WL tokens above k tokens drawn from the unigram^0.75 distribution.
/// Single-threaded and bitwise reproducible for a fixed seed.
inline EmbeddingModel train_embeddings(const Corpus& corpus, const EmbeddingParams& p) {
    if (corpus.documents.empty() || corpus.vocabulary.size() == 0) throw Error("empty corpus");
    if (p.dimension == 0 || p.epochs == 0) throw Error("dimension and epochs must be positive");

    const auto d = p.dimension;
    const auto n_docs = corpus.documents.size();
    const auto n_vocab = corpus.vocabulary.size();
    std::mt19937_64 rng(p.seed);

    EmbeddingModel m;
    m.params = p;
    m.vocabulary_size = n_vocab;
    for (const auto& doc : corpus.documents) m.graph_ids.push_back(doc.graph_id);

    std::uniform_real_distribution<float> init(-0.5f / static_cast<float>(d), 0.5f / static_cast<float>(d));
    m.vectors.assign(n_docs, std::vector<float>(d));
    for (auto& v : m.vectors) {
        for (auto& x : v) x = init(rng);
    }
    std::vector<float> out(n_vocab * d, 0.0f);

    std::vector<double> cumulative(n_vocab);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_vocab; ++i) {
        acc += std::pow(static_cast<double>(corpus.vocabulary.counts[i]), 0.75);
        cumulative[i] = acc;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw_negative = [&] {
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), unit(rng) * acc);
        return static_cast<std::uint32_t>(std::min<std::size_t>(it - cumulative.begin(), n_vocab - 1));
    };

    std::size_t tokens_per_epoch = 0;
    for (const auto& ids : corpus.token_ids) tokens_per_epoch += ids.size();
    const double total_steps = static_cast<double>(tokens_per_epoch * p.epochs);
    const double lr_min = p.learning_rate / 100.0;

    std::vector<std::size_t> order(n_docs);
    for (std::size_t i = 0; i < n_docs; ++i) order[i] = i;
    std::vector<float> grad(d);
    std::size_t step = 0;

    auto log_sigmoid = [](double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); };

    for (std::size_t epoch = 0; epoch < p.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss = 0.0;
        std::size_t pairs = 0;
        for (auto doc : order) {
            auto& v = m.vectors[doc];
            for (auto target : corpus.token_ids[doc]) {
                const double progress = static_cast<double>(step++) / total_steps;
                const auto lr = static_cast<float>(p.learning_rate + (lr_min - p.learning_rate) * progress);
                std::fill(grad.begin(), grad.end(), 0.0f);
                for (std::size_t k = 0; k <= p.negatives; ++k) {
                    std::uint32_t word = target;
                    float label = 1.0f;
                    if (k > 0) {
                        word = draw_negative();
                        if (word == target) continue;
                        label = 0.0f;
                    }
                    float* u = &out[static_cast<std::size_t>(word) * d];
                    float f = 0.0f;
                    for (std::size_t i = 0; i < d; ++i) f += v[i] * u[i];
                    loss -= label > 0 ? log_sigmoid(f) : log_sigmoid(-f);
                    const float sig = 1.0f / (1.0f + std::exp(-f));
                    const float g = (label - sig) * lr;
                    for (std::size_t i = 0; i < d; ++i) {
                        grad[i] += g * u[i];
                        u[i] += g * v[i];
                    }
                }
                for (std::size_t i = 0; i < d; ++i) v[i] += grad[i];
                ++pairs;
            }
        }
        m.epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
    }
    return m;
}

inline nlohmann::json embedding_model_to_json(const EmbeddingModel& m, const WlOptions& wl) {
    return {{"wl_height", wl.height},
            {"use_direction", wl.use_direction},
            {"use_weight", wl.use_weight},
            {"dimension", m.params.dimension},
            {"learning_rate", m.params.learning_rate},
            {"epochs", m.params.epochs},
            {"negatives", m.params.negatives},
            {"seed", m.params.seed},
            {"vocabulary_size", m.vocabulary_size},
            {"epoch_loss", m.epoch_loss}};
}

inline double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += static_cast<double>(a[i]) * b[i];
        aa += static_cast<double>(a[i]) * a[i];
        bb += static_cast<double>(b[i]) * b[i];
    }
    return (aa == 0 || bb == 0) ? 0.0 : ab / std::sqrt(aa * bb);
}

}  // namespace tsgn
