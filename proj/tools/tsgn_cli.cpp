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

// Command-line front end: ingest, synth, transform, features, embed, eval,
// bench and pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tsgn/tsgn.hpp"

namespace {

using tsgn::fs::path;

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> transform;
    std::optional<std::string> features;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--threads", o.threads, "Worker threads");
}

// Flags win over file values.
tsgn::RunConfig load_config(const Overrides& o) {
    tsgn::RunConfig cfg;
    if (!o.config.empty()) cfg = tsgn::run_config_from_json(tsgn::json::parse(tsgn::read_text(o.config)));
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.out = *o.out;
    if (o.transform) cfg.transform = tsgn::parse_transform_kind(*o.transform);
    if (o.features) cfg.features = tsgn::parse_feature_method(*o.features);
    if (o.runs) cfg.eval.runs = *o.runs;
    if (o.threads) cfg.threads = *o.threads;
    return cfg;
}

tsgn::TransformKind kind_of(const std::optional<std::string>& hint) {
    return hint ? tsgn::parse_transform_kind(*hint) : tsgn::TransformKind::tn;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transaction subgraph networks for phishing account identification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tsgn::kVersion));

    // ingest
    Overrides ingest_o;
    std::string records, labels, format;
    bool use_fetch = false;
    std::size_t n_datasets = 0, per_class = 0;
    std::size_t min_nodes = 3, max_edges = 5000;
    auto* ingest = app.add_subcommand("ingest", "Build labeled ego networks from record files or the API");
    add_common(ingest, ingest_o);
    ingest->add_option("--records", records, "Transaction file (csv or jsonl)");
    ingest->add_option("--format", format, "csv or jsonl (default: from extension)");
    ingest->add_option("--labels", labels, "address,label file")->required();
    ingest->add_flag("--fetch", use_fetch, "Fetch each labeled address's history (TSGN_API_KEY)");
    ingest->add_option("--datasets", n_datasets, "Split into this many balanced datasets");
    ingest->add_option("--per-class", per_class, "Graphs per class in each dataset");
    ingest->add_option("--min-nodes", min_nodes, "Drop ego networks with fewer nodes");
    ingest->add_option("--max-edges", max_edges, "Drop ego networks with more edges");

    // synth
    Overrides synth_o;
    std::optional<std::size_t> n_phishing, n_normal;
    std::optional<double> noise;
    bool null_model = false;
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
    add_common(synth, synth_o);
    synth->add_option("--phishing", n_phishing, "Phishing graphs");
    synth->add_option("--normal", n_normal, "Normal graphs");
    synth->add_option("--noise", noise, "Direction-flip probability for both classes");
    synth->add_flag("--null", null_model, "Draw both classes from the same profile");

    // transform
    Overrides transform_o;
    std::string in_dir;
    auto* transform = app.add_subcommand("transform", "Map a dataset to TSGNs or Directed-TSGNs");
    add_common(transform, transform_o);
    transform->add_option("--in", in_dir, "Dataset directory")->required();
    transform->add_option("--transform", transform_o.transform, "tn, tsgn or dtsgn")->required();

    // features
    Overrides features_o;
    auto* features = app.add_subcommand("features", "Extract the 10 handcrafted features");
    add_common(features, features_o);
    features->add_option("--in", in_dir, "Graph directory")->required();

    // embed
    Overrides embed_o;
    std::optional<std::size_t> dim, epochs, height;
    auto* embed = app.add_subcommand("embed", "WL-subtree documents and skipgram graph embeddings");
    add_common(embed, embed_o);
    embed->add_option("--in", in_dir, "Graph directory")->required();
    embed->add_option("--transform", embed_o.transform, "Graph kind of the input: tn, tsgn or dtsgn");
    embed->add_option("--dim", dim, "Embedding dimension");
    embed->add_option("--epochs", epochs, "Training epochs");
    embed->add_option("--wl-height", height, "WL iterations");

    // eval
    Overrides eval_o;
    std::string features_csv;
    auto* eval = app.add_subcommand("eval", "Repeated holdout random-forest F1");
    add_common(eval, eval_o);
    eval->add_option("--features", features_csv, "features.csv or embeddings.csv")->required()->check(CLI::ExistingFile);
    eval->add_option("--runs", eval_o.runs, "Repetitions");

    // bench
    Overrides bench_o;
    std::size_t reps = 3;
    auto* bench = app.add_subcommand("bench", "Time TSGN vs Directed-TSGN construction");
    add_common(bench, bench_o);
    bench->add_option("--in", in_dir, "Dataset directory (default: synthetic phishing-style graphs)");
    bench->add_option("--reps", reps, "Repetitions (best is kept)");
    bench->add_option("--phishing", n_phishing, "Synthetic graphs when --in is absent");

    // pipeline
    Overrides pipe_o;
    auto* pipeline = app.add_subcommand("pipeline", "Run source, transform, features and evaluation");
    add_common(pipeline, pipe_o);
    pipeline->add_option("--transform", pipe_o.transform, "tn, tsgn or dtsgn");
    pipeline->add_option("--features", pipe_o.features, "hand or embed");
    pipeline->add_option("--runs", pipe_o.runs, "Repetitions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            auto cfg = load_config(ingest_o);
            cfg.filter = {min_nodes, max_edges};
            const path out = cfg.out;
            const auto label_map = tsgn::parse_labels(tsgn::read_text(labels));
            std::vector<tsgn::TransactionRecord> recs;
            if (use_fetch) {
                for (const auto& [address, _] : label_map) {
                    auto r = tsgn::fetch_address_history(address, cfg.fetch);
                    std::cerr << address << ": " << r.size() << " records\n";
                    recs.insert(recs.end(), r.begin(), r.end());
                }
                tsgn::write_text(out / "records.csv", tsgn::serialize_transactions(recs, tsgn::RecordFormat::csv));
            } else {
                if (records.empty()) throw tsgn::Error("--records is required without --fetch");
                auto fmt = format.empty() ? tsgn::record_format_for(records) : tsgn::parse_record_format(format);
                recs = tsgn::parse_transaction_file(records, fmt);
            }
            tsgn::IngestStats stats;
            auto all = tsgn::build_labeled_dataset(recs, label_map, cfg.filter, &stats, "all");
            std::cerr << "built " << stats.built << ", filtered " << stats.filtered << ", without records "
                      << stats.empty << "\n";
            if (n_datasets > 0) {
                for (const auto& ds : tsgn::assemble_datasets(all.graphs, n_datasets, per_class, cfg.seed)) {
                    tsgn::write_dataset(out / ds.name, ds);
                }
            } else {
                tsgn::write_dataset(out / "all", all);
            }
            return 0;
        }
        if (*synth) {
            auto cfg = load_config(synth_o);
            if (n_phishing) cfg.synth.phishing_count = *n_phishing;
            if (n_normal) cfg.synth.normal_count = *n_normal;
            if (noise) cfg.synth.phishing.noise = cfg.synth.normal.noise = *noise;
            if (null_model) cfg.synth.null_model = true;
            auto ds = tsgn::generate_dataset(cfg.synth, tsgn::derive_seed(cfg.seed, "synth"));
            tsgn::write_dataset(cfg.out, ds);
            std::cout << "wrote " << ds.size() << " graphs to " << cfg.out << "\n";
            return 0;
        }
        if (*transform) {
            auto cfg = load_config(transform_o);
            auto ds = tsgn::read_dataset(in_dir);
            auto t = tsgn::transform_dataset(ds, cfg.transform, cfg.threads);
            if (cfg.transform == tsgn::TransformKind::tn) {
                tsgn::Dataset tn{ds.name, {}};
                for (std::size_t i = 0; i < t.ids.size(); ++i) tn.graphs.push_back({t.ids[i], t.graphs[i]});
                tsgn::write_dataset(cfg.out, tn);
            } else {
                tsgn::write_line_graphs(cfg.out, ds.name, t.ids, t.line_graphs);
            }
            std::cout << "wrote " << t.ids.size() << " graphs to " << cfg.out << "\n";
            return 0;
        }
        if (*features) {
            auto cfg = load_config(features_o);
            auto ds = tsgn::read_dataset(in_dir);
            std::vector<std::string> ids;
            std::vector<tsgn::TxGraph> graphs;
            for (auto& e : ds.graphs) {
                ids.push_back(e.id);
                graphs.push_back(std::move(e.graph));
            }
            auto m = tsgn::handcrafted_matrix(ids, graphs, cfg.threads);
            tsgn::write_text(path(cfg.out) / "features.csv", tsgn::features_to_csv(m));
            return 0;
        }
        if (*embed) {
            auto cfg = load_config(embed_o);
            auto ds = tsgn::read_dataset(in_dir);
            const auto kind = kind_of(embed_o.transform);
            std::vector<std::string> ids;
            std::vector<tsgn::TxGraph> graphs;
            for (auto& e : ds.graphs) {
                ids.push_back(e.id);
                auto g = std::move(e.graph);
                if (kind == tsgn::TransformKind::tn) {
                    g = tsgn::with_attributes(g, tsgn::initial_node_attributes(g, tsgn::AttributeKind::tn));
                }
                graphs.push_back(std::move(g));
            }
            auto params = cfg.embedding;
            if (dim) params.dimension = *dim;
            if (epochs) params.epochs = *epochs;
            params.seed = tsgn::derive_seed(cfg.seed, "embed");
            auto wl = tsgn::wl_options_for(kind, height.value_or(cfg.wl_height));
            auto r = tsgn::embedding_matrix(ids, graphs, wl, params);
            tsgn::write_text(path(cfg.out) / "embeddings.csv", tsgn::embeddings_to_csv(r.matrix));
            tsgn::write_text(path(cfg.out) / "embedding_model.json", tsgn::embedding_model_to_json(r.model, wl).dump(2));
            return 0;
        }
        if (*eval) {
            auto cfg = load_config(eval_o);
            auto text = tsgn::read_text(features_csv);
            tsgn::FeatureMatrix m;
            if (text.rfind("graph_id,label", 0) == 0) {
                // embeddings.csv: move the two leading columns to the end
                std::string converted;
                std::istringstream in(text);
                std::string line;
                while (std::getline(in, line)) {
                    auto cells = tsgn::split(line, ',');
                    for (std::size_t i = 2; i < cells.size(); ++i) converted += cells[i] + ",";
                    converted += cells[1] + "," + cells[0] + "\n";
                }
                m = tsgn::features_from_csv(converted);
            } else {
                m = tsgn::features_from_csv(text);
            }
            auto ep = cfg.eval;
            ep.threads = cfg.threads;
            auto r = tsgn::evaluate(m, ep, cfg.forest, tsgn::derive_seed(cfg.seed, "evaluate"));
            tsgn::write_text(path(cfg.out) / "report.json", tsgn::report_to_json(r).dump(2));
            auto table = tsgn::report_table({{path(features_csv).stem().string(), r}});
            tsgn::write_text(path(cfg.out) / "report.txt", table);
            std::cout << table;
            return 0;
        }
        if (*bench) {
            auto cfg = load_config(bench_o);
            tsgn::Dataset ds;
            if (!in_dir.empty()) {
                ds = tsgn::read_dataset(in_dir);
            } else {
                tsgn::SynthConfig sc;
                sc.phishing_count = n_phishing.value_or(100);
                sc.normal_count = 1;
                sc.phishing.min_neighbors = 200;
                sc.phishing.max_neighbors = 1000;
                ds = tsgn::generate_dataset(sc, tsgn::derive_seed(cfg.seed, "bench"));
                ds.graphs.pop_back();
            }
            auto r = tsgn::bench_construction(ds, reps);
            tsgn::write_text(path(cfg.out) / "bench.csv", tsgn::bench_to_csv(r));
            auto summary = tsgn::bench_summary(r);
            tsgn::write_text(path(cfg.out) / "bench_summary.json", summary.dump(2));
            std::printf("graphs %zu  TSGN %.4f s  Directed-TSGN %.4f s  ratio %.2fx\n", r.rows.size(),
                        r.tsgn_seconds, r.dtsgn_seconds, r.ratio());
            return 0;
        }
        if (*pipeline) {
            auto cfg = load_config(pipe_o);
            auto result = tsgn::run_pipeline(cfg);
            std::cout << tsgn::read_text(path(cfg.out) / "report.txt");
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
