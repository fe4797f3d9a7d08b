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

#include <random>

#include <gtest/gtest.h>

#include "tsgn/forest.hpp"

using namespace tsgn;

namespace {

struct Data {
    std::vector<std::vector<double>> x;
    std::vector<std::string> y;
};

// Class decided by feature 0 crossing 0.5; the other features are noise.
Data threshold_data(std::size_t n, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(dim);
        for (auto& v : row) v = u(rng);
        d.y.push_back(row[0] > 0.5 ? "phishing" : "normal");
        d.x.push_back(std::move(row));
    }
    return d;
}

}  // namespace

TEST(Forest, LearnsOneDimensionalThreshold) {
    auto train = threshold_data(200, 1, 1);
    auto model = train_forest(train.x, train.y, ForestParams{});
    EXPECT_EQ(model.classes, (std::vector<std::string>{"normal", "phishing"}));
    EXPECT_EQ(model.trees.size(), 100u);
    auto pred = predict(model, train.x);
    EXPECT_EQ(pred, train.y);
    std::vector<std::vector<double>> probe{{0.01}, {0.99}};
    EXPECT_EQ(predict(model, probe), (std::vector<std::string>{"normal", "phishing"}));
}

TEST(Forest, GeneralizesWithNoiseFeatures) {
    auto train = threshold_data(400, 6, 2), test = threshold_data(200, 6, 3);
    ForestParams p;
    p.n_trees = 50;
    auto pred = predict(train_forest(train.x, train.y, p), test.x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == test.y[i];
    EXPECT_GE(correct, 180u);
}

TEST(Forest, DeterministicAndThreadIndependent) {
    auto d = threshold_data(150, 4, 4);
    ForestParams p;
    p.n_trees = 30;
    p.seed = 17;
    auto a = predict(train_forest(d.x, d.y, p), d.x);
    p.threads = 4;
    auto m = train_forest(d.x, d.y, p);
    EXPECT_EQ(predict(m, d.x), a);
    p.threads = 1;
    auto again = train_forest(d.x, d.y, p);
    ASSERT_EQ(again.trees.size(), m.trees.size());
    for (std::size_t t = 0; t < m.trees.size(); ++t) {
        ASSERT_EQ(again.trees[t].nodes.size(), m.trees[t].nodes.size());
        for (std::size_t k = 0; k < m.trees[t].nodes.size(); ++k) {
            EXPECT_EQ(again.trees[t].nodes[k].feature, m.trees[t].nodes[k].feature);
            EXPECT_EQ(again.trees[t].nodes[k].threshold, m.trees[t].nodes[k].threshold);
        }
    }
}

TEST(Forest, SingleClassWhenAllowed) {
    std::vector<std::vector<double>> x{{1}, {2}, {3}};
    std::vector<std::string> y(3, "normal");
    EXPECT_THROW(train_forest(x, y, ForestParams{}), Error);
    ForestParams p;
    p.allow_single_class = true;
    p.n_trees = 5;
    EXPECT_EQ(predict(train_forest(x, y, p), {{0}, {10}}), (std::vector<std::string>{"normal", "normal"}));
}

TEST(Forest, SingleTreePredictsItsLeaf) {
    ForestModel m;
    m.n_features = 1;
    m.classes = {"normal", "phishing"};
    DecisionTree t;
    t.nodes.resize(3);
    t.nodes[0].feature = 0;
    t.nodes[0].threshold = 0.5;
    t.nodes[0].left = 1;
    t.nodes[0].right = 2;
    t.nodes[1].votes = {3, 1};
    t.nodes[2].votes = {0, 4};
    m.trees.push_back(t);
    EXPECT_EQ(predict(m, {{0.5}, {0.6}}), (std::vector<std::string>{"normal", "phishing"}));
}

TEST(Forest, TiedVoteGoesToSmallerClass) {
    ForestModel m;
    m.n_features = 1;
    m.classes = {"normal", "phishing"};
    DecisionTree a, b;
    a.nodes.resize(1);
    a.nodes[0].votes = {1, 0};
    b.nodes.resize(1);
    b.nodes[0].votes = {0, 1};
    m.trees = {b, a};
    EXPECT_EQ(predict(m, {{0.0}}), std::vector<std::string>{"normal"});
    // within a leaf too
    DecisionTree even;
    even.nodes.resize(1);
    even.nodes[0].votes = {2, 2};
    EXPECT_EQ(even.predict(std::vector<double>{0.0}), 0u);
}

TEST(Forest, DepthLimitYieldsStumps) {
    auto d = threshold_data(100, 3, 5);
    ForestParams p;
    p.max_depth = 1;
    p.n_trees = 10;
    for (const auto& t : train_forest(d.x, d.y, p).trees) EXPECT_LE(t.nodes.size(), 3u);
}

TEST(Forest, InputValidation) {
    ForestParams p;
    EXPECT_THROW(train_forest({}, {}, p), Error);
    EXPECT_THROW(train_forest({{1}, {2}}, {"a"}, p), Error);
    EXPECT_THROW(train_forest({{1}, {2, 3}}, {"a", "b"}, p), Error);
    p.n_trees = 0;
    EXPECT_THROW(train_forest({{1}, {2}}, {"a", "b"}, p), Error);
    auto m = train_forest({{1, 1}, {2, 2}}, {"a", "b"}, ForestParams{});
    EXPECT_THROW(predict(m, {{1}}), Error);
}

TEST(Forest, CandidateCounts) {
    ForestParams p;
    EXPECT_EQ(p.candidates(10), 3u);
    EXPECT_EQ(p.candidates(1), 1u);
    p.features_per_split = FeatureRule::log2;
    EXPECT_EQ(p.candidates(1024), 10u);
    p.features_per_split = FeatureRule::all;
    EXPECT_EQ(p.candidates(7), 7u);
}
