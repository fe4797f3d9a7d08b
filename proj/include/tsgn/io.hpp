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

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tsgn/features.hpp"
#include "tsgn/graph.hpp"
#include "tsgn/transform.hpp"

namespace tsgn {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct DatasetEntry {
    std::string id;
    TxGraph graph;
};

struct Dataset {
    std::string name;
    std::vector<DatasetEntry> graphs;

    std::size_t size() const { return graphs.size(); }

    std::map<Label, std::size_t> class_counts() const {
        std::map<Label, std::size_t> c;
        for (const auto& e : graphs) ++c[e.graph.label()];
        return c;
    }
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("cannot format number");
    return std::string(buf, end);
}

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

// ---------------------------------------------------------------------------
// Per-graph JSON

inline json graph_to_json(const TxGraph& g, const std::string& id = {}) {
    json nodes = json::array();
    for (const auto& n : g.nodes()) nodes.push_back({{"address", n.address}, {"attrs", n.attrs}});
    json edges = json::array();
    for (const auto& e : g.edges()) {
        edges.push_back({g.node(e.src).address, g.node(e.dst).address, e.weight});
    }
    json j{{"nodes", nodes},
           {"edges", edges},
           {"directed", g.directed()},
           {"center", g.num_nodes() ? json(g.node(g.center()).address) : json(nullptr)},
           {"label", to_string(g.label())}};
    if (!id.empty()) j["id"] = id;
    return j;
}

inline json line_graph_to_json(const LineGraphOutput& lg, const std::string& id = {}) {
    json j = graph_to_json(lg.graph, id);
    j["kind"] = to_string(lg.kind);
    json origin = json::array();
    for (const auto& o : lg.origin) origin.push_back({o.src, o.dst, o.weight});
    j["origin"] = origin;
    return j;
}

inline TxGraph graph_from_json(const json& j) {
    try {
        const bool signed_weights = j.value("kind", std::string()) == "directed-tsgn";
        TxGraph g(j.at("directed").get<bool>(), signed_weights ? WeightDomain::real : WeightDomain::non_negative);
        for (const auto& n : j.at("nodes")) {
            if (n.is_string()) {
                g.add_node(n.get<std::string>());
            } else {
                g.add_node(n.at("address").get<std::string>(),
                           n.value("attrs", std::vector<double>{}));
            }
        }
        for (const auto& e : j.at("edges")) {
            auto src = g.find(e.at(0).get<std::string>());
            auto dst = g.find(e.at(1).get<std::string>());
            if (!src || !dst) throw Error("edge references unknown node");
            g.add_edge(*src, *dst, e.at(2).get<double>());
        }
        if (!j.at("center").is_null()) {
            auto c = g.find(j.at("center").get<std::string>());
            if (!c) throw Error("center is not a node");
            g.set_center(*c);
        }
        g.set_label(parse_label(j.value("label", std::string("unlabeled"))));
        return g;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed graph json: ") + e.what());
    }
}

inline LineGraphOutput line_graph_from_json(const json& j) {
    LineGraphOutput lg{graph_from_json(j), {}, parse_line_graph_kind(j.at("kind").get<std::string>())};
    for (const auto& o : j.at("origin")) {
        lg.origin.push_back(
            OriginEdge{o.at(0).get<std::string>(), o.at(1).get<std::string>(), o.at(2).get<double>()});
    }
    if (lg.origin.size() != lg.graph.num_nodes()) throw Error("origin size does not match node count");
    return lg;
}

// ---------------------------------------------------------------------------
// Dataset directories: one <id>.json per graph plus index.json for the order.

inline std::string safe_file_stem(const std::string& id) {
    std::string s = id;
    for (char& c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) c = '_';
    }
    return s;
}

inline void write_dataset(const fs::path& dir, const Dataset& ds) {
    fs::create_directories(dir);
    json index{{"name", ds.name}, {"graphs", json::array()}};
    for (const auto& e : ds.graphs) {
        auto file = safe_file_stem(e.id) + ".json";
        write_text(dir / file, graph_to_json(e.graph, e.id).dump());
        index["graphs"].push_back({{"id", e.id}, {"file", file}});
    }
    write_text(dir / "index.json", index.dump(2));
}

inline void write_line_graphs(const fs::path& dir, const std::string& name,
                              const std::vector<std::string>& ids,
                              const std::vector<LineGraphOutput>& graphs) {
    fs::create_directories(dir);
    json index{{"name", name}, {"graphs", json::array()}};
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        auto file = safe_file_stem(ids[i]) + ".json";
        write_text(dir / file, line_graph_to_json(graphs[i], ids[i]).dump());
        index["graphs"].push_back({{"id", ids[i]}, {"file", file}});
    }
    write_text(dir / "index.json", index.dump(2));
}

inline Dataset read_dataset(const fs::path& dir) {
    const auto index = json::parse(read_text(dir / "index.json"));
    Dataset ds{index.value("name", dir.filename().string()), {}};
    for (const auto& item : index.at("graphs")) {
        auto j = json::parse(read_text(dir / item.at("file").get<std::string>()));
        ds.graphs.push_back(DatasetEntry{item.at("id").get<std::string>(), graph_from_json(j)});
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Feature CSV: <names...>,label,graph_id

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string features_to_csv(const FeatureMatrix& m) {
    std::string out;
    for (const auto& n : m.names) out += n + ",";
    out += "label,graph_id\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (double v : m.rows[i]) out += format_double(v) + ",";
        out += std::string(to_string(m.labels[i])) + "," + m.ids[i] + "\n";
    }
    return out;
}

inline FeatureMatrix features_from_csv(std::string_view text) {
    FeatureMatrix m;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw Error("feature csv is empty");
    auto header = split(line, ',');
    if (header.size() < 3 || header[header.size() - 2] != "label" || header.back() != "graph_id") {
        throw Error("feature csv header must end with label,graph_id");
    }
    m.names.assign(header.begin(), header.end() - 2);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            throw Error("feature csv line " + std::to_string(lineno) + ": wrong column count");
        }
        std::vector<double> row;
        for (std::size_t c = 0; c < m.names.size(); ++c) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), v);
            if (ec != std::errc() || p != cells[c].data() + cells[c].size()) {
                throw Error("feature csv line " + std::to_string(lineno) + ": bad number");
            }
            row.push_back(v);
        }
        m.rows.push_back(std::move(row));
        m.labels.push_back(parse_label(cells[cells.size() - 2]));
        m.ids.push_back(cells.back());
    }
    return m;
}

/// Embedding CSV: graph_id,label,v0..v{d-1}
inline std::string embeddings_to_csv(const FeatureMatrix& m) {
    std::string out = "graph_id,label";
    for (const auto& n : m.names) out += "," + n;
    out += "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        out += m.ids[i] + "," + std::string(to_string(m.labels[i]));
        for (double v : m.rows[i]) out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

}  // namespace tsgn
