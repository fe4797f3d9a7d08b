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

#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsgn/embed.hpp"
#include "tsgn/eval.hpp"
#include "tsgn/features.hpp"
#include "tsgn/fetch.hpp"
#include "tsgn/ingest.hpp"
#include "tsgn/io.hpp"
#include "tsgn/synth.hpp"
#include "tsgn/transform.hpp"

namespace tsgn {

enum class SourceKind { files, synth, fetch };
enum class TransformKind { tn, tsgn, dtsgn };
enum class FeatureMethod { hand, embed };

inline std::string_view to_string(SourceKind k) {
    switch (k) {
        case SourceKind::files:
            return "files";
        case SourceKind::synth:
            return "synth";
        case SourceKind::fetch:
            return "fetch";
    }
    return "synth";
}

inline std::string_view to_string(TransformKind k) {
    switch (k) {
        case TransformKind::tn:
            return "tn";
        case TransformKind::tsgn:
            return "tsgn";
        case TransformKind::dtsgn:
            return "dtsgn";
    }
    return "tn";
}

inline std::string_view to_string(FeatureMethod m) { return m == FeatureMethod::hand ? "hand" : "embed"; }

inline SourceKind parse_source_kind(std::string_view s) {
    if (s == "files") return SourceKind::files;
    if (s == "synth") return SourceKind::synth;
    if (s == "fetch") return SourceKind::fetch;
    throw Error("unknown source '" + std::string(s) + "'");
}

inline TransformKind parse_transform_kind(std::string_view s) {
    if (s == "tn") return TransformKind::tn;
    if (s == "tsgn") return TransformKind::tsgn;
    if (s == "dtsgn" || s == "directed-tsgn") return TransformKind::dtsgn;
    throw Error("unknown transform '" + std::string(s) + "'");
}

inline FeatureMethod parse_feature_method(std::string_view s) {
    if (s == "hand" || s == "handcrafted") return FeatureMethod::hand;
    if (s == "embed" || s == "wl-embed") return FeatureMethod::embed;
    throw Error("unknown feature method '" + std::string(s) + "'");
}

/// WL switches per graph kind: direction is dropped for the undirected TSGN.
inline WlOptions wl_options_for(TransformKind k, std::size_t height) {
    return WlOptions{height, k != TransformKind::tsgn, true};
}

struct RunConfig {
    std::uint64_t seed = 1;
    std::string out = "tsgn-out";
    SourceKind source = SourceKind::synth;
    SynthConfig synth;
    std::string records_path;
    RecordFormat records_format = RecordFormat::csv;
    std::string labels_path;
    FetchConfig fetch;
    EgoFilter filter;
    std::size_t per_class = 0;  // files/fetch: balance to this many per class when > 0
    TransformKind transform = TransformKind::dtsgn;
    FeatureMethod features = FeatureMethod::hand;
    ForestParams forest;
    EvalParams eval;
    std::size_t wl_height = 3;
    EmbeddingParams embedding;
    std::size_t threads = 1;
};

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        c.seed = j.value("seed", c.seed);
        c.out = j.value("out", c.out);
        c.source = parse_source_kind(j.value("source", std::string("synth")));
        if (j.contains("synth")) c.synth = synth_config_from_json(j["synth"]);
        if (j.contains("files")) {
            const auto& f = j["files"];
            c.records_path = f.value("records", c.records_path);
            c.records_format = parse_record_format(f.value("format", std::string("csv")));
            c.labels_path = f.value("labels", c.labels_path);
        }
        if (j.contains("fetch")) {
            const auto& f = j["fetch"];
            c.fetch.base_url = f.value("base_url", c.fetch.base_url);
            c.fetch.path = f.value("path", c.fetch.path);
            c.fetch.api_key = f.value("api_key", c.fetch.api_key);
            c.fetch.requests_per_second = f.value("requests_per_second", c.fetch.requests_per_second);
            c.fetch.page_size = f.value("page_size", c.fetch.page_size);
            c.fetch.max_pages = f.value("max_pages", c.fetch.max_pages);
            c.fetch.max_retries = f.value("max_retries", c.fetch.max_retries);
            c.labels_path = f.value("labels", c.labels_path);
        }
        if (j.contains("filter")) {
            c.filter.min_nodes = j["filter"].value("min_nodes", c.filter.min_nodes);
            c.filter.max_edges = j["filter"].value("max_edges", c.filter.max_edges);
        }
        c.per_class = j.value("per_class", c.per_class);
        c.transform = parse_transform_kind(j.value("transform", std::string(to_string(c.transform))));
        c.features = parse_feature_method(j.value("features", std::string(to_string(c.features))));
        if (j.contains("forest")) {
            const auto& f = j["forest"];
            c.forest.n_trees = f.value("n_trees", c.forest.n_trees);
            c.forest.max_depth = f.value("max_depth", c.forest.max_depth);
            c.forest.min_split = f.value("min_split", c.forest.min_split);
        }
        if (j.contains("eval")) {
            const auto& e = j["eval"];
            c.eval.runs = e.value("runs", c.eval.runs);
            c.eval.train_fraction = e.value("train_fraction", c.eval.train_fraction);
            c.eval.population_std = e.value("population_std", c.eval.population_std);
        }
        if (j.contains("embed")) {
            const auto& e = j["embed"];
            c.wl_height = e.value("wl_height", c.wl_height);
            c.embedding.dimension = e.value("dimension", c.embedding.dimension);
            c.embedding.epochs = e.value("epochs", c.embedding.epochs);
            c.embedding.learning_rate = e.value("learning_rate", c.embedding.learning_rate);
            c.embedding.negatives = e.value("negatives", c.embedding.negatives);
        }
        c.threads = j.value("threads", c.threads);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid config: ") + e.what());
    }
    return c;
}

/// Snapshot of every setting that influences results. No secrets, no timings.
inline nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json j{{"seed", c.seed},
                     {"out", c.out},
                     {"source", to_string(c.source)},
                     {"transform", to_string(c.transform)},
                     {"features", to_string(c.features)},
                     {"filter", {{"min_nodes", c.filter.min_nodes}, {"max_edges", c.filter.max_edges}}},
                     {"per_class", c.per_class},
                     {"forest",
                      {{"n_trees", c.forest.n_trees},
                       {"max_depth", c.forest.max_depth},
                       {"min_split", c.forest.min_split},
                       {"features_per_split", "sqrt"}}},
                     {"eval",
                      {{"runs", c.eval.runs},
                       {"train_fraction", c.eval.train_fraction},
                       {"population_std", c.eval.population_std}}},
                     {"embed",
                      {{"wl_height", c.wl_height},
                       {"dimension", c.embedding.dimension},
                       {"epochs", c.embedding.epochs},
                       {"learning_rate", c.embedding.learning_rate},
                       {"negatives", c.embedding.negatives}}},
                     {"threads", c.threads}};
    if (c.source == SourceKind::synth) j["synth"] = synth_config_to_json(c.synth);
    if (c.source == SourceKind::files) {
        j["files"] = {{"records", c.records_path},
                      {"format", c.records_format == RecordFormat::csv ? "csv" : "jsonl"},
                      {"labels", c.labels_path}};
    }
    if (c.source == SourceKind::fetch) {
        j["fetch"] = {{"base_url", c.fetch.base_url},
                      {"path", c.fetch.path},
                      {"requests_per_second", c.fetch.requests_per_second},
                      {"page_size", c.fetch.page_size},
                      {"max_pages", c.fetch.max_pages},
                      {"labels", c.labels_path}};
    }
    return j;
}

/// Graphs ready for feature extraction, with initial node attributes set.
struct TransformedSet {
    TransformKind kind = TransformKind::tn;
    std::vector<std::string> ids;
    std::vector<TxGraph> graphs;
    std::vector<LineGraphOutput> line_graphs;  // empty for tn
};

inline TransformedSet transform_dataset(const Dataset& ds, TransformKind kind, std::size_t threads = 1) {
    TransformedSet out;
    out.kind = kind;
    const auto n = ds.size();
    out.ids.resize(n);
    out.graphs.resize(n);
    if (kind != TransformKind::tn) out.line_graphs.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const auto& e = ds.graphs[i];
        out.ids[i] = e.id;
        try {
            if (kind == TransformKind::tn) {
                out.graphs[i] = with_attributes(e.graph, initial_node_attributes(e.graph, AttributeKind::tn));
                return;
            }
            out.line_graphs[i] = build_line_graph(
                e.graph, kind == TransformKind::tsgn ? LineGraphKind::tsgn : LineGraphKind::directed_tsgn);
            out.graphs[i] = out.line_graphs[i].graph;
        } catch (const Error& err) {
            throw Error("graph '" + e.id + "': " + err.what());
        }
    });
    return out;
}

inline FeatureMatrix handcrafted_matrix(const std::vector<std::string>& ids, const std::vector<TxGraph>& graphs,
                                        std::size_t threads = 1) {
    FeatureMatrix m;
    const auto& names = FeatureVector::names();
    m.names.assign(names.begin(), names.end());
    m.ids = ids;
    m.rows.resize(graphs.size());
    for (const auto& g : graphs) m.labels.push_back(g.label());
    parallel_for(graphs.size(), threads, [&](std::size_t i) {
        auto f = handcrafted_vector(graphs[i]);
        m.rows[i].assign(f.values.begin(), f.values.end());
    });
    return m;
}

struct EmbeddingResult {
    FeatureMatrix matrix;
    EmbeddingModel model;
    WlOptions wl;
};

inline EmbeddingResult embedding_matrix(const std::vector<std::string>& ids, const std::vector<TxGraph>& graphs,
                                        const WlOptions& wl, const EmbeddingParams& params) {
    std::vector<std::pair<std::string, const TxGraph*>> refs;
    for (std::size_t i = 0; i < graphs.size(); ++i) refs.emplace_back(ids[i], &graphs[i]);
    auto corpus = build_corpus(refs, wl);
    EmbeddingResult r{{}, train_embeddings(corpus, params), wl};
    for (std::size_t k = 0; k < params.dimension; ++k) r.matrix.names.push_back("v" + std::to_string(k));
    r.matrix.ids = ids;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        r.matrix.labels.push_back(graphs[i].label());
        r.matrix.rows.emplace_back(r.model.vectors[i].begin(), r.model.vectors[i].end());
    }
    return r;
}

inline std::string report_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
    // Pads by code points; the cells contain a two-byte plus-minus sign.
    auto pad = [](std::string s, std::size_t width) {
        std::size_t shown = 0;
        for (unsigned char c : s) shown += (c & 0xc0) != 0x80;
        if (shown < width) s.append(width - shown, ' ');
        return s;
    };
    std::string out = "setting                 F1 (%)          macro-F1 (%)    runs\n";
    for (const auto& [name, r] : rows) {
        out += pad(name, 23) + " " + pad(format_cell(r.f1_summary), 15) + " " + pad(format_cell(r.macro_summary), 15) +
               " " + std::to_string(r.n_runs) + "\n";
    }
    return out;
}

/// Raised by run_pipeline; names the failing stage.
class StageError : public Error {
  public:
    StageError(std::string stage, const std::string& cause)
        : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

  private:
    std::string stage_;
};

struct PipelineResult {
    EvalReport report;
    nlohmann::json manifest;
};

/// Loads labeled ego networks from record files or the fetch client.
inline Dataset load_source_dataset(const RunConfig& cfg) {
    if (cfg.source == SourceKind::synth) return generate_dataset(cfg.synth, derive_seed(cfg.seed, "synth"));
    if (cfg.labels_path.empty()) throw Error("a labels file is required");
    const auto labels = parse_labels(read_text(cfg.labels_path));
    std::vector<TransactionRecord> records;
    if (cfg.source == SourceKind::files) {
        records = parse_transaction_file(cfg.records_path, cfg.records_format);
    } else {
        for (const auto& [address, _] : labels) {
            auto r = fetch_address_history(address, cfg.fetch);
            records.insert(records.end(), r.begin(), r.end());
        }
    }
    auto ds = build_labeled_dataset(records, labels, cfg.filter);
    if (cfg.per_class > 0) ds = assemble_datasets(ds.graphs, 1, cfg.per_class, derive_seed(cfg.seed, "assemble")).front();
    return ds;
}

/// source -> transform -> features -> evaluation, writing every artifact
/// under cfg.out.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
    using Clock = std::chrono::steady_clock;
    const fs::path out = cfg.out;
    fs::create_directories(out);
    std::map<std::string, double> timing;

    auto stage = [&](const std::string& name, auto&& fn) {
        const auto t0 = Clock::now();
        try {
            auto r = fn();
            timing[name] = std::chrono::duration<double>(Clock::now() - t0).count();
            return r;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    };

    auto dataset = stage("source", [&] {
        auto ds = load_source_dataset(cfg);
        if (ds.size() == 0) throw Error("no graphs");
        write_dataset(out / "graphs" / "tn", ds);
        return ds;
    });

    auto transformed = stage("transform", [&] {
        auto t = transform_dataset(dataset, cfg.transform, cfg.threads);
        if (cfg.transform != TransformKind::tn) {
            write_line_graphs(out / "graphs" / std::string(to_string(cfg.transform)), dataset.name, t.ids,
                              t.line_graphs);
        }
        return t;
    });

    auto matrix = stage("features", [&] {
        if (cfg.features == FeatureMethod::hand) {
            auto m = handcrafted_matrix(transformed.ids, transformed.graphs, cfg.threads);
            write_text(out / "features.csv", features_to_csv(m));
            return m;
        }
        auto params = cfg.embedding;
        params.seed = derive_seed(cfg.seed, "embed");
        auto r = embedding_matrix(transformed.ids, transformed.graphs, wl_options_for(cfg.transform, cfg.wl_height),
                                  params);
        write_text(out / "embeddings.csv", embeddings_to_csv(r.matrix));
        write_text(out / "embedding_model.json", embedding_model_to_json(r.model, r.wl).dump(2));
        return r.matrix;
    });

    auto report = stage("evaluate", [&] {
        auto ep = cfg.eval;
        ep.threads = cfg.threads;
        auto r = evaluate(matrix, ep, cfg.forest, derive_seed(cfg.seed, "evaluate"));
        return r;
    });
    report.timing = timing;

    auto report_json = report_to_json(report);
    report_json["transform"] = to_string(cfg.transform);
    report_json["features"] = to_string(cfg.features);
    report_json["n_graphs"] = dataset.size();
    write_text(out / "report.json", report_json.dump(2));
    const auto setting = std::string(to_string(cfg.transform)) + "/" + std::string(to_string(cfg.features));
    write_text(out / "report.txt", report_table({{setting, report}}));

    nlohmann::json counts;
    for (const auto& [label, n] : dataset.class_counts()) counts[std::string(to_string(label))] = n;
    nlohmann::json manifest{{"version", kVersion},
                            {"config", run_config_to_json(cfg)},
                            {"seeds",
                             {{"master", cfg.seed},
                              {"synth", derive_seed(cfg.seed, "synth")},
                              {"embed", derive_seed(cfg.seed, "embed")},
                              {"evaluate", derive_seed(cfg.seed, "evaluate")}}},
                            {"dataset", {{"name", dataset.name}, {"graphs", dataset.size()}, {"classes", counts}}},
                            {"timing", timing},
                            {"artifacts", nlohmann::json::array()}};
    for (const auto& entry : fs::directory_iterator(out)) {
        manifest["artifacts"].push_back(entry.path().filename().string());
    }
    manifest["artifacts"].push_back("manifest.json");
    std::sort(manifest["artifacts"].begin(), manifest["artifacts"].end());
    write_text(out / "manifest.json", manifest.dump(2));
    return {report, manifest};
}

// ---------------------------------------------------------------------------
// Construction benchmark

struct BenchRow {
    std::string id;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t undirected_edges = 0;
    std::size_t tsgn_edges = 0;
    std::size_t dtsgn_edges = 0;
    std::size_t sum_degree_choose2 = 0;  // over the undirected-processed graph
    std::size_t sum_in_out = 0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    double tsgn_seconds = 0.0;   // best of repetitions, all graphs
    double dtsgn_seconds = 0.0;
    std::size_t repetitions = 0;

    double ratio() const { return dtsgn_seconds > 0.0 ? tsgn_seconds / dtsgn_seconds : 0.0; }
};

/// Times building every TSGN and every Directed-TSGN of `ds`, single
/// threaded, best of `repetitions`, and records output sizes next to their
/// closed forms.
inline BenchResult bench_construction(const Dataset& ds, std::size_t repetitions) {
    using Clock = std::chrono::steady_clock;
    BenchResult r;
    r.repetitions = repetitions;
    if (ds.size() == 0) return r;
    repetitions = std::max<std::size_t>(repetitions, 1);

    for (const auto& e : ds.graphs) {
        BenchRow row;
        row.id = e.id;
        row.nodes = e.graph.num_nodes();
        row.edges = e.graph.num_edges();
        const auto u = e.graph.directed() ? to_undirected(e.graph) : e.graph;
        row.undirected_edges = u.num_edges();
        for (auto d : degrees(u).total) row.sum_degree_choose2 += d * (d - (d > 0 ? 1 : 0)) / 2;
        const auto deg = degrees(e.graph);
        for (std::size_t v = 0; v < deg.in.size(); ++v) row.sum_in_out += deg.in[v] * deg.out[v];
        r.rows.push_back(std::move(row));
    }

    auto time_all = [&](LineGraphKind kind, auto record) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            const auto t0 = Clock::now();
            for (std::size_t i = 0; i < ds.size(); ++i) {
                auto lg = build_line_graph(ds.graphs[i].graph, kind);
                record(i, lg.graph.num_edges());
            }
            best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
        }
        return best;
    };
    r.tsgn_seconds = time_all(LineGraphKind::tsgn, [&](std::size_t i, std::size_t m) { r.rows[i].tsgn_edges = m; });
    r.dtsgn_seconds =
        time_all(LineGraphKind::directed_tsgn, [&](std::size_t i, std::size_t m) { r.rows[i].dtsgn_edges = m; });
    return r;
}

inline std::string bench_to_csv(const BenchResult& r) {
    std::string out =
        "graph_id,nodes,edges,undirected_edges,tsgn_edges,dtsgn_edges,sum_degree_choose2,sum_in_out\n";
    for (const auto& row : r.rows) {
        out += row.id + "," + std::to_string(row.nodes) + "," + std::to_string(row.edges) + "," +
               std::to_string(row.undirected_edges) + "," + std::to_string(row.tsgn_edges) + "," +
               std::to_string(row.dtsgn_edges) + "," + std::to_string(row.sum_degree_choose2) + "," +
               std::to_string(row.sum_in_out) + "\n";
    }
    return out;
}

inline nlohmann::json bench_summary(const BenchResult& r) {
    std::size_t tsgn = 0, dtsgn = 0;
    for (const auto& row : r.rows) {
        tsgn += row.tsgn_edges;
        dtsgn += row.dtsgn_edges;
    }
    return {{"graphs", r.rows.size()},
            {"repetitions", r.repetitions},
            {"tsgn_seconds", r.tsgn_seconds},
            {"dtsgn_seconds", r.dtsgn_seconds},
            {"time_ratio", r.ratio()},
            {"tsgn_edges", tsgn},
            {"dtsgn_edges", dtsgn}};
}

}  // namespace tsgn
