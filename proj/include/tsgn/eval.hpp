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
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsgn/features.hpp"
#include "tsgn/forest.hpp"

namespace tsgn {

/// Harmonic mean of precision and recall for `positive`; 0 whenever either
/// is undefined or both are zero.
template <typename T>
double f1_score(const std::vector<T>& truth, const std::vector<T>& pred, const T& positive) {
    if (truth.size() != pred.size()) throw Error("f1_score: length mismatch");
    if (truth.empty()) throw Error("f1_score: empty input");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] == positive, p = pred[i] == positive;
        tp += t && p;
        fp += !t && p;
        fn += t && !p;
    }
    if (tp + fp == 0 || tp + fn == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

/// Unweighted mean of per-class F1 over every class seen in truth or pred.
template <typename T>
double macro_f1(const std::vector<T>& truth, const std::vector<T>& pred) {
    std::set<T> classes(truth.begin(), truth.end());
    classes.insert(pred.begin(), pred.end());
    double s = 0.0;
    for (const auto& c : classes) s += f1_score(truth, pred, c);
    return s / static_cast<double>(classes.size());
}

struct EvalParams {
    std::size_t runs = 500;
    double train_fraction = 0.9;
    bool population_std = true;
    std::size_t threads = 1;
};

struct Summary {
    double mean = 0.0;
    double std = 0.0;
};

inline Summary summarize(const std::vector<double>& v, bool population = true) {
    Summary s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    const auto denom = population ? v.size() : std::max<std::size_t>(v.size() - 1, 1);
    s.std = std::sqrt(ss / static_cast<double>(denom));
    return s;
}

struct EvalReport {
    std::vector<double> f1;
    std::vector<double> macro;
    Summary f1_summary;
    Summary macro_summary;
    std::size_t n_runs = 0;
    double train_fraction = 0.9;
    std::uint64_t seed = 0;
    std::map<std::string, double> timing;  // seconds per phase
};

/// "74.74±3.42": percent, two decimals.
inline std::string format_cell(const Summary& s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f±%.2f", 100.0 * s.mean, 100.0 * s.std);
    return buf;
}

struct HoldoutSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Per-class shuffle, then round((1 - train_fraction) * n_c) of each class
/// (at least one, at most n_c - 1) go to the test side.
inline HoldoutSplit stratified_split(const std::vector<Label>& labels, double train_fraction, std::uint64_t seed) {
    std::map<Label, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    if (by_class.size() < 2) throw Error("stratified split needs two classes");
    std::mt19937_64 rng(seed);
    HoldoutSplit s;
    for (auto& [label, idx] : by_class) {
        if (idx.size() < 2) {
            throw Error("cannot stratify: class '" + std::string(to_string(label)) + "' has fewer than 2 samples");
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n_test = static_cast<std::size_t>(std::lround((1.0 - train_fraction) * static_cast<double>(idx.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
        s.test.insert(s.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        s.train.insert(s.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

/// Repeated stratified random holdout with a random forest, phishing as the
/// positive class. Run r uses seeds derived from (seed, r) only.
inline EvalReport evaluate(const std::vector<std::vector<double>>& x, const std::vector<Label>& labels,
                           const EvalParams& ep, ForestParams fp, std::uint64_t seed) {
    if (x.size() != labels.size()) throw Error("feature and label counts differ");
    if (ep.runs == 0) throw Error("runs must be at least 1");
    if (!(ep.train_fraction > 0.0 && ep.train_fraction < 1.0)) throw Error("train_fraction must be in (0, 1)");

    EvalReport r;
    r.n_runs = ep.runs;
    r.train_fraction = ep.train_fraction;
    r.seed = seed;
    r.f1.assign(ep.runs, 0.0);
    r.macro.assign(ep.runs, 0.0);
    fp.threads = 1;

    const auto start = std::chrono::steady_clock::now();
    parallel_for(ep.runs, ep.threads, [&](std::size_t run) {
        const auto run_seed = derive_seed(seed, run);
        auto split = stratified_split(labels, ep.train_fraction, run_seed);
        std::vector<std::vector<double>> xtr, xte;
        std::vector<std::string> ytr;
        std::vector<Label> yte;
        for (auto i : split.train) {
            xtr.push_back(x[i]);
            ytr.emplace_back(to_string(labels[i]));
        }
        for (auto i : split.test) {
            xte.push_back(x[i]);
            yte.push_back(labels[i]);
        }
        auto forest_params = fp;
        forest_params.seed = derive_seed(run_seed, "forest");
        auto model = train_forest(xtr, ytr, forest_params);
        auto names = predict(model, xte);
        std::vector<Label> pred;
        pred.reserve(names.size());
        for (const auto& n : names) pred.push_back(parse_label(n));
        r.f1[run] = f1_score(yte, pred, Label::phishing);
        r.macro[run] = macro_f1(yte, pred);
    });
    r.timing["evaluate"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.f1_summary = summarize(r.f1, ep.population_std);
    r.macro_summary = summarize(r.macro, ep.population_std);
    return r;
}

inline EvalReport evaluate(const FeatureMatrix& m, const EvalParams& ep, const ForestParams& fp, std::uint64_t seed) {
    return evaluate(m.rows, m.labels, ep, fp, seed);
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    return {{"f1", r.f1},
            {"f1_mean", r.f1_summary.mean},
            {"f1_std", r.f1_summary.std},
            {"f1_cell", format_cell(r.f1_summary)},
            {"macro_f1", r.macro},
            {"macro_f1_mean", r.macro_summary.mean},
            {"macro_f1_std", r.macro_summary.std},
            {"n_runs", r.n_runs},
            {"train_fraction", r.train_fraction},
            {"seed", r.seed},
            {"timing", r.timing}};
}

}  // namespace tsgn
