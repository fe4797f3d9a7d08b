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
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tsgn/common.hpp"

namespace tsgn {

enum class FeatureRule { sqrt, log2, all };

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 0;  // 0: unlimited
    std::size_t min_split = 2;
    FeatureRule features_per_split = FeatureRule::sqrt;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    bool allow_single_class = false;

    std::size_t candidates(std::size_t dim) const {
        switch (features_per_split) {
            case FeatureRule::sqrt:
                return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(dim))));
            case FeatureRule::log2:
                return std::max<std::size_t>(1, static_cast<std::size_t>(std::log2(static_cast<double>(dim))));
            case FeatureRule::all:
                return dim;
        }
        return dim;
    }
};

/// A leaf has feature == -1 and non-empty class votes.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;  // go left when x[feature] <= threshold
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::vector<std::uint32_t> votes;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    /// Index of the predicted class; ties go to the smaller index.
    std::size_t predict(std::span<const double> x) const {
        const TreeNode* n = &nodes[0];
        while (n->feature >= 0) n = &nodes[x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right];
        return static_cast<std::size_t>(std::max_element(n->votes.begin(), n->votes.end()) - n->votes.begin());
    }
};

struct ForestModel {
    ForestParams params;
    std::size_t n_features = 0;
    std::vector<std::string> classes;  // sorted, so index order is lexicographic
    std::vector<DecisionTree> trees;
};

namespace detail {

class TreeBuilder {
  public:
    TreeBuilder(const std::vector<std::vector<double>>& x, const std::vector<std::size_t>& y,
                std::size_t n_classes, const ForestParams& p, std::uint64_t seed)
        : x_(x), y_(y), k_(n_classes), p_(p), rng_(seed) {}

    DecisionTree build() {
        const auto n = x_.size();
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> sample(n);
        for (auto& s : sample) s = pick(rng_);

        DecisionTree tree;
        tree.nodes.emplace_back();
        struct Task {
            std::uint32_t node;
            std::size_t begin, end, depth;
        };
        samples_ = std::move(sample);
        std::vector<Task> stack{{0, 0, samples_.size(), 0}};
        while (!stack.empty()) {
            auto t = stack.back();
            stack.pop_back();
            auto votes = count(t.begin, t.end);
            const bool pure = std::count_if(votes.begin(), votes.end(), [](auto c) { return c > 0; }) <= 1;
            const bool too_small = t.end - t.begin < std::max<std::size_t>(p_.min_split, 2);
            const bool too_deep = p_.max_depth > 0 && t.depth >= p_.max_depth;
            Split best;
            if (!pure && !too_small && !too_deep) best = find_split(t.begin, t.end, votes);
            if (best.feature < 0) {
                tree.nodes[t.node].votes = std::move(votes);
                continue;
            }
            auto mid = std::partition(samples_.begin() + static_cast<std::ptrdiff_t>(t.begin),
                                      samples_.begin() + static_cast<std::ptrdiff_t>(t.end), [&](std::size_t i) {
                                          return x_[i][static_cast<std::size_t>(best.feature)] <= best.threshold;
                                      });
            const auto m = static_cast<std::size_t>(mid - samples_.begin());
            const auto l = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            auto& node = tree.nodes[t.node];
            node.feature = best.feature;
            node.threshold = best.threshold;
            node.left = l;
            node.right = l + 1;
            stack.push_back({l + 1, m, t.end, t.depth + 1});
            stack.push_back({l, t.begin, m, t.depth + 1});
        }
        return tree;
    }

  private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double impurity = 0.0;
    };

    std::vector<std::uint32_t> count(std::size_t begin, std::size_t end) const {
        std::vector<std::uint32_t> c(k_, 0);
        for (auto i = begin; i < end; ++i) ++c[y_[samples_[i]]];
        return c;
    }

    static double gini_sum(const std::vector<double>& c, double total) {
        if (total <= 0) return 0.0;
        double s = 0.0;
        for (double v : c) s += v * v;
        return total - s / total;  // total * gini
    }

    // Best Gini split over sqrt(d) random features; if all of those are
    // constant on the node, the remaining features are tried in random order.
    Split find_split(std::size_t begin, std::size_t end, const std::vector<std::uint32_t>& votes) {
        const auto dim = x_[0].size();
        std::vector<std::size_t> features(dim);
        std::iota(features.begin(), features.end(), 0);
        std::shuffle(features.begin(), features.end(), rng_);
        const auto wanted = p_.candidates(dim);

        Split best;
        best.impurity = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, std::size_t>> col;
        std::vector<double> left(k_), right(k_);
        std::size_t tried_valid = 0;
        for (std::size_t f : features) {
            if (tried_valid >= wanted && best.feature >= 0) break;
            col.clear();
            for (auto i = begin; i < end; ++i) col.emplace_back(x_[samples_[i]][f], y_[samples_[i]]);
            std::sort(col.begin(), col.end());
            if (col.front().first == col.back().first) continue;
            ++tried_valid;
            std::fill(left.begin(), left.end(), 0.0);
            for (std::size_t c = 0; c < k_; ++c) right[c] = votes[c];
            const double total = static_cast<double>(col.size());
            for (std::size_t j = 0; j + 1 < col.size(); ++j) {
                left[col[j].second] += 1;
                right[col[j].second] -= 1;
                if (col[j].first == col[j + 1].first) continue;
                const double nl = static_cast<double>(j + 1);
                const double imp = gini_sum(left, nl) + gini_sum(right, total - nl);
                if (imp < best.impurity) {
                    double thr = col[j].first + (col[j + 1].first - col[j].first) / 2.0;
                    if (!(thr < col[j + 1].first)) thr = col[j].first;
                    best = Split{static_cast<int>(f), thr, imp};
                }
            }
        }
        return best;
    }

    const std::vector<std::vector<double>>& x_;
    const std::vector<std::size_t>& y_;
    std::size_t k_;
    const ForestParams& p_;
    std::mt19937_64 rng_;
    std::vector<std::size_t> samples_;
};

}  // namespace detail

/// Bagged CART trees with Gini impurity. Tree t uses a seed derived from
/// (params.seed, t), so results do not depend on params.threads.
inline ForestModel train_forest(const std::vector<std::vector<double>>& x, const std::vector<std::string>& y,
                                const ForestParams& p) {
    if (x.empty()) throw Error("empty training matrix");
    if (x.size() != y.size()) throw Error("feature and label counts differ");
    if (x.size() < 2) throw Error("need at least two training samples");
    const auto dim = x[0].size();
    if (dim == 0) throw Error("empty training matrix");
    for (const auto& row : x) {
        if (row.size() != dim) throw Error("ragged feature matrix");
    }
    if (p.n_trees == 0) throw Error("n_trees must be positive");

    ForestModel m;
    m.params = p;
    m.n_features = dim;
    m.classes = y;
    std::sort(m.classes.begin(), m.classes.end());
    m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
    if (m.classes.size() < 2 && !p.allow_single_class) throw Error("single-class training set");

    std::vector<std::size_t> yi(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        yi[i] = static_cast<std::size_t>(std::lower_bound(m.classes.begin(), m.classes.end(), y[i]) - m.classes.begin());
    }
    m.trees.resize(p.n_trees);
    parallel_for(p.n_trees, p.threads, [&](std::size_t t) {
        m.trees[t] = detail::TreeBuilder(x, yi, m.classes.size(), p, derive_seed(p.seed, t)).build();
    });
    return m;
}

/// Majority vote over trees; ties go to the lexicographically smaller class.
inline std::vector<std::string> predict(const ForestModel& m, const std::vector<std::vector<double>>& x) {
    std::vector<std::string> out;
    out.reserve(x.size());
    std::vector<std::size_t> tally(m.classes.size());
    for (const auto& row : x) {
        if (row.size() != m.n_features) throw Error("feature dimension mismatch");
        std::fill(tally.begin(), tally.end(), 0);
        for (const auto& t : m.trees) ++tally[t.predict(row)];
        out.push_back(m.classes[static_cast<std::size_t>(std::max_element(tally.begin(), tally.end()) - tally.begin())]);
    }
    return out;
}

}  // namespace tsgn
