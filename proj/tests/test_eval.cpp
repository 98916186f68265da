// SPDX-License-Identifier: Apache-2.0
//
// beampred: multi-modal mmWave beam prediction toolkit
// Copyright (C) 2026 The beampred authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "catch_amalgamated.hpp"

#include "beampred/error.hpp"
#include "beampred/eval.hpp"
#include "beampred/scene.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace beampred;
using namespace beampred::eval;
using models::Prediction;
using Catch::Matchers::WithinAbs;

namespace
{
    Prediction from_probs(std::vector<double> p)
    {
        nn::Vector z(Eigen::Index(p.size()));
        for (std::size_t i = 0; i < p.size(); ++i)
            z(Eigen::Index(i)) = std::log(p[i]);
        return Prediction::from_logits(z);
    }

    // Full-sort oracle with ties broken by ascending index
    bool in_top_k(const std::vector<double> &p, std::size_t label, std::size_t k)
    {
        std::vector<std::size_t> idx(p.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
        return std::find(idx.begin(), idx.begin() + std::ptrdiff_t(k), label) != idx.begin() + std::ptrdiff_t(k);
    }

    std::size_t count_lines(const std::string &s)
    {
        return std::size_t(std::count(s.begin(), s.end(), '\n'));
    }

    models::VisionConfig tiny_vision(int epochs)
    {
        models::VisionConfig c;
        c.training.total_epochs = epochs;
        c.training.decay_epochs = {};
        c.hidden_dim = 32;
        c.feature_dim = 8;
        return c;
    }
}

TEST_CASE("Top-k accuracy")
{
    SECTION("hand-counted example")
    {
        const std::vector<Prediction> preds{from_probs({0.5, 0.3, 0.2}), from_probs({0.1, 0.6, 0.3}),
                                            from_probs({0.2, 0.3, 0.5}), from_probs({0.7, 0.2, 0.1})};
        const std::vector<std::size_t> labels{0, 2, 0, 2};
        CHECK(top_k_accuracy(preds, labels, 1) == 0.25);
        CHECK(top_k_accuracy(preds, labels, 2) == 0.5);
        CHECK(top_k_accuracy(preds, labels, 3) == 1.0);
    }
    SECTION("errors")
    {
        const std::vector<Prediction> preds{from_probs({0.5, 0.5})};
        const std::vector<std::size_t> one{0}, two{0, 1};
        CHECK_THROWS_AS(top_k_accuracy({}, std::vector<std::size_t>{}, 1), ConfigError);
        CHECK_THROWS_AS(top_k_accuracy(preds, one, 0), ConfigError);
        CHECK_THROWS_AS(top_k_accuracy(preds, one, 3), ConfigError);
        CHECK_THROWS_AS(top_k_accuracy(preds, two, 1), DimensionError);
    }
    SECTION("random sets: oracle agreement, monotone in k, k = M is 1")
    {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(0.01, 1.0);
        std::uniform_int_distribution<std::size_t> lab(0, 7);
        for (int trial = 0; trial < 100; ++trial)
        {
            std::vector<Prediction> preds;
            std::vector<std::vector<double>> raw;
            std::vector<std::size_t> labels;
            for (int i = 0; i < 30; ++i)
            {
                std::vector<double> p(8);
                for (auto &x : p)
                    x = u(rng);
                preds.push_back(from_probs(p));
                raw.push_back(preds.back().probabilities);
                labels.push_back(lab(rng));
            }
            double prev = 0.0;
            for (std::size_t k = 1; k <= 8; ++k)
            {
                std::size_t hits = 0;
                for (std::size_t i = 0; i < preds.size(); ++i)
                    hits += in_top_k(raw[i], labels[i], k);
                const double acc = top_k_accuracy(preds, labels, k);
                CHECK(acc == double(hits) / 30.0);
                CHECK(acc >= prev);
                prev = acc;
            }
            CHECK(prev == 1.0);
        }
    }
    SECTION("a perfect predictor scores 1")
    {
        std::vector<Prediction> preds;
        std::vector<std::size_t> labels;
        for (std::size_t i = 0; i < 32; ++i)
        {
            std::vector<double> p(32, 0.01);
            p[i] = 0.9;
            preds.push_back(from_probs(p));
            labels.push_back(i);
        }
        CHECK(evaluate_predictions("oracle", preds, labels).top == std::array<double, 3>{1.0, 1.0, 1.0});
    }
}

TEST_CASE("Model evaluation report")
{
    scene::SceneConfig sc;
    const auto ds = data::relabel(scene::generate_dataset(sc, scene::PhyConfig{}, 400));
    const auto [train, val] = data::split(ds, 0.7, 1);
    const auto stats = data::fit_normalization(train);

    auto vc = tiny_vision(5);
    vc.training.rng_seed = models::training_seed(1, models::ModelKind::vision);
    models::PositionConfig pc;
    pc.training = vc.training;
    pc.training.rng_seed = models::training_seed(1, models::ModelKind::position);
    pc.hidden_dim = 32;
    models::FusionConfig fc;
    fc.training = vc.training;
    fc.training.rng_seed = models::training_seed(1, models::ModelKind::fusion);
    fc.hidden_dim = 32;

    const auto vision = models::train_vision(train, nullptr, stats, vc).model;
    const auto position = models::train_position(train, nullptr, stats, pc).model;
    const auto fusion = models::train_fusion(train, nullptr, vision, stats, fc).model;

    SECTION("rows match direct metric calls")
    {
        const auto report = evaluate_models(vision, position, fusion, val, "synthetic");
        REQUIRE(report.rows.size() == 3);
        CHECK(report.rows[0].model == "vision");
        CHECK(report.rows[2].model == "fusion");
        CHECK(report.sample_count == val.size());
        CHECK(report.val_digest == data::dataset_digest(val));
        const auto preds = models::predict_all(position, val);
        const auto labels = val.labels();
        for (std::size_t k = 1; k <= 3; ++k)
            CHECK(report.rows[1].top[k - 1] == top_k_accuracy(preds, labels, k));
        for (const auto &row : report.rows)
        {
            CHECK(row.top[0] <= row.top[1]);
            CHECK(row.top[1] <= row.top[2]);
        }
    }
    SECTION("identical models give identical rows")
    {
        models::FusionModel twin = fusion;
        const auto a = evaluate_models(vision, position, fusion, val, "synthetic");
        const auto b = evaluate_models(vision, position, twin, val, "synthetic");
        CHECK(a.rows[2].top == b.rows[2].top);
    }
    SECTION("inconsistent normalization is rejected")
    {
        auto other = position;
        other.norm->lat_max += 1e-3;
        CHECK_THROWS_AS(evaluate_models(vision, other, fusion, val, "synthetic"), ConfigError);
    }
    SECTION("serialized forms")
    {
        const auto report = evaluate_models(vision, position, fusion, val, "synthetic");
        const auto csv = report_csv(report, 1);
        CHECK(csv.rfind("model,scenario,k,accuracy,n,seed,fraction\n", 0) == 0);
        CHECK(count_lines(csv) == 1 + 3 * 3);
        const std::vector<std::size_t> ks{1, 3};
        CHECK(count_lines(report_csv(report, 1, 1.0, ks)) == 1 + 3 * 2);
        const auto j = report_to_json(report);
        CHECK(j["rows"].size() == 3);
        const auto table = report_table(report);
        CHECK(table.find("fusion") != std::string::npos);
        CHECK(table.find("Top-3") != std::string::npos);
    }
    SECTION("full-fraction sweep reproduces the fusion row")
    {
        SweepTraining st{vc, fc};
        const auto sweep = fraction_sweep(train, val, {0.5, 1.0}, {1}, st);
        const auto report = evaluate_models(vision, position, fusion, val, "synthetic");
        CHECK(sweep.at(1.0).mean == report.rows[2].top);
        CHECK(sweep.cells.size() == 2);
        CHECK(sweep.cells[0].train_size == train.size() / 2);
        CHECK(count_lines(sweep_csv(sweep)) == 1 + 2);
        CHECK(sweep.at(1.0).stddev == std::array<double, 3>{0.0, 0.0, 0.0});
        CHECK_THROWS_AS(fraction_sweep(train, val, {1.0, 0.5}, {1}, st), ConfigError);
        CHECK_THROWS_AS(fraction_sweep(train, val, {0.5}, {}, st), ConfigError);
    }
}

TEST_CASE("Sweep summary statistics")
{
    scene::SceneConfig sc;
    const auto ds = data::relabel(scene::generate_dataset(sc, scene::PhyConfig{}, 200));
    const auto [train, val] = data::split(ds, 0.7, 2);
    models::FusionConfig fc;
    fc.training.total_epochs = 2;
    fc.hidden_dim = 16;
    const auto sweep = fraction_sweep(train, val, {1.0}, {1, 2, 3}, {tiny_vision(2), fc});
    REQUIRE(sweep.cells.size() == 3);
    for (std::size_t k = 0; k < 3; ++k)
    {
        double mean = 0.0;
        for (const auto &c : sweep.cells)
            mean += c.top[k] / 3.0;
        double var = 0.0;
        for (const auto &c : sweep.cells)
            var += (c.top[k] - mean) * (c.top[k] - mean) / 2.0;
        CHECK_THAT(sweep.summary[0].mean[k], WithinAbs(mean, 1e-12));
        CHECK_THAT(sweep.summary[0].stddev[k], WithinAbs(std::sqrt(var), 1e-12));
    }
    CHECK(sweep_to_json(sweep)["cells"].size() == 3);
    CHECK_THROWS(sweep.at(0.5));
}
