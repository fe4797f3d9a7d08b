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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tsgn/graph.hpp"
#include "tsgn/io.hpp"

namespace tsgn {

enum class RecordFormat { csv, jsonl };

inline RecordFormat parse_record_format(std::string_view s) {
    if (s == "csv") return RecordFormat::csv;
    if (s == "jsonl") return RecordFormat::jsonl;
    throw Error("unknown record format '" + std::string(s) + "'");
}

inline RecordFormat record_format_for(const fs::path& path) {
    return path.extension() == ".jsonl" ? RecordFormat::jsonl : RecordFormat::csv;
}

inline constexpr std::string_view kRecordHeader = "tx_hash,src,dst,amount_eth,timestamp";
inline constexpr std::size_t kMaxDiagnostics = 20;

/// Thrown for malformed record files; carries one message per bad line.
class ParseError : public Error {
  public:
    explicit ParseError(std::vector<std::string> diagnostics)
        : Error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  private:
    static std::string join(const std::vector<std::string>& d) {
        std::string s;
        for (const auto& line : d) s += (s.empty() ? "" : "\n") + line;
        return s;
    }
    std::vector<std::string> diagnostics_;
};

namespace detail {

inline bool parse_number(std::string_view s, double& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_number(std::string_view s, std::int64_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

inline std::string check_record(const TransactionRecord& r) {
    if (r.src.empty() || r.dst.empty()) return "empty address";
    if (!std::isfinite(r.amount)) return "non-finite amount";
    if (r.amount < 0.0) return "negative amount";
    return {};
}

inline TransactionRecord parse_csv_row(std::string_view line, std::string& err) {
    auto cells = split(line, ',');
    TransactionRecord r;
    if (cells.size() != 5) {
        err = "expected 5 columns, got " + std::to_string(cells.size());
        return r;
    }
    r.tx_hash = cells[0];
    r.src = cells[1];
    r.dst = cells[2];
    if (!parse_number(cells[3], r.amount)) {
        err = "bad amount '" + cells[3] + "'";
        return r;
    }
    if (!parse_number(cells[4], r.timestamp)) {
        err = "bad timestamp '" + cells[4] + "'";
        return r;
    }
    err = check_record(r);
    return r;
}

inline TransactionRecord parse_jsonl_row(std::string_view line, std::string& err) {
    TransactionRecord r;
    try {
        auto j = nlohmann::json::parse(line);
        r.tx_hash = j.value("tx_hash", std::string{});
        r.src = j.at("src").get<std::string>();
        r.dst = j.at("dst").get<std::string>();
        r.amount = j.at("amount_eth").get<double>();
        r.timestamp = j.at("timestamp").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        err = e.what();
        return r;
    }
    err = check_record(r);
    return r;
}

}  // namespace detail

/// Parses records from text. Bad lines are collected (up to 20) and reported
/// together in a ParseError.
inline std::vector<TransactionRecord> parse_transactions(std::string_view text, RecordFormat format,
                                                         const std::string& source = "<input>") {
    std::vector<TransactionRecord> records;
    std::vector<std::string> diagnostics;
    std::size_t lineno = 0;
    std::size_t start = 0;
    bool header_seen = format == RecordFormat::jsonl;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line != kRecordHeader) {
                diagnostics.push_back(source + ":1: expected header '" + std::string(kRecordHeader) + "'");
                break;
            }
            continue;
        }
        std::string err;
        auto r = format == RecordFormat::csv ? detail::parse_csv_row(line, err)
                                             : detail::parse_jsonl_row(line, err);
        if (!err.empty()) {
            diagnostics.push_back(source + ":" + std::to_string(lineno) + ": " + err);
            if (diagnostics.size() >= kMaxDiagnostics) break;
            continue;
        }
        records.push_back(std::move(r));
    }
    if (!diagnostics.empty()) throw ParseError(std::move(diagnostics));
    return records;
}

inline std::vector<TransactionRecord> parse_transaction_file(const fs::path& path, RecordFormat format) {
    return parse_transactions(read_text(path), format, path.string());
}

inline std::string serialize_transactions(const std::vector<TransactionRecord>& records,
                                          RecordFormat format) {
    std::string out;
    if (format == RecordFormat::csv) {
        out += std::string(kRecordHeader) + "\n";
        for (const auto& r : records) {
            out += r.tx_hash + "," + r.src + "," + r.dst + "," + format_double(r.amount) + "," +
                   std::to_string(r.timestamp) + "\n";
        }
        return out;
    }
    for (const auto& r : records) {
        nlohmann::json j{{"tx_hash", r.tx_hash},
                         {"src", r.src},
                         {"dst", r.dst},
                         {"amount_eth", r.amount},
                         {"timestamp", r.timestamp}};
        out += j.dump() + "\n";
    }
    return out;
}

/// address,label rows (header "address,label").
inline std::map<std::string, Label> parse_labels(std::string_view text) {
    std::map<std::string, Label> labels;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (lineno == 1 && line == "address,label")) continue;
        auto cells = split(line, ',');
        if (cells.size() != 2) throw Error("labels line " + std::to_string(lineno) + ": expected 2 columns");
        labels[cells[0]] = parse_label(cells[1]);
    }
    return labels;
}

struct EgoNetwork {
    TxGraph graph;
    std::size_t discarded = 0;  // records that did not involve the center
};

/// First-order ego network: the center plus its direct counterparties.
inline EgoNetwork build_ego_network(const std::string& center,
                                    const std::vector<TransactionRecord>& records,
                                    Label label = Label::unlabeled) {
    std::vector<TransactionRecord> kept;
    std::size_t discarded = 0;
    for (const auto& r : records) {
        if (r.src == center || r.dst == center) {
            kept.push_back(r);
        } else {
            ++discarded;
        }
    }
    if (kept.empty()) throw Error("empty ego network");
    EgoNetwork ego{aggregate_transactions(kept, center), discarded};
    ego.graph.set_label(label);
    return ego;
}

struct EgoFilter {
    std::size_t min_nodes = 3;
    std::size_t max_edges = 5000;

    bool accepts(const TxGraph& g) const {
        return g.num_nodes() >= min_nodes && g.num_edges() <= max_edges;
    }
};

struct IngestStats {
    std::size_t built = 0;
    std::size_t filtered = 0;
    std::size_t empty = 0;
};

/// One ego network per labeled address, in address order, filtered.
inline Dataset build_labeled_dataset(const std::vector<TransactionRecord>& records,
                                     const std::map<std::string, Label>& labels,
                                     const EgoFilter& filter, IngestStats* stats = nullptr,
                                     std::string name = "ingested") {
    std::map<std::string, std::vector<TransactionRecord>> by_address;
    for (const auto& r : records) {
        if (labels.contains(r.src)) by_address[r.src].push_back(r);
        if (r.dst != r.src && labels.contains(r.dst)) by_address[r.dst].push_back(r);
    }
    IngestStats local;
    Dataset ds{std::move(name), {}};
    for (const auto& [address, label] : labels) {
        auto it = by_address.find(address);
        if (it == by_address.end()) {
            ++local.empty;
            continue;
        }
        auto ego = build_ego_network(address, it->second, label);
        if (!filter.accepts(ego.graph)) {
            ++local.filtered;
            continue;
        }
        ++local.built;
        ds.graphs.push_back(DatasetEntry{address, std::move(ego.graph)});
    }
    if (stats) *stats = local;
    return ds;
}

/// Splits labeled graphs into `n_datasets` disjoint datasets with exactly
/// `per_class` phishing and `per_class` normal graphs each, sampled without
/// replacement.
inline std::vector<Dataset> assemble_datasets(const std::vector<DatasetEntry>& graphs,
                                              std::size_t n_datasets, std::size_t per_class,
                                              std::uint64_t seed) {
    std::vector<std::size_t> phishing, normal;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (graphs[i].graph.label() == Label::phishing) phishing.push_back(i);
        if (graphs[i].graph.label() == Label::normal) normal.push_back(i);
    }
    const auto need = n_datasets * per_class;
    if (phishing.size() < need || normal.size() < need) {
        throw Error("insufficient graphs per class: need " + std::to_string(need) + ", have " +
                    std::to_string(phishing.size()) + " phishing and " +
                    std::to_string(normal.size()) + " normal");
    }
    std::mt19937_64 rng(seed);
    std::shuffle(phishing.begin(), phishing.end(), rng);
    std::shuffle(normal.begin(), normal.end(), rng);

    std::vector<Dataset> out;
    for (std::size_t d = 0; d < n_datasets; ++d) {
        Dataset ds{"dataset" + std::to_string(d + 1), {}};
        ds.graphs.reserve(2 * per_class);
        for (std::size_t k = 0; k < per_class; ++k) ds.graphs.push_back(graphs[phishing[d * per_class + k]]);
        for (std::size_t k = 0; k < per_class; ++k) ds.graphs.push_back(graphs[normal[d * per_class + k]]);
        out.push_back(std::move(ds));
    }
    return out;
}

}  // namespace tsgn
