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
#include "beampred/models.hpp"
#include "beampred/scene.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>

using namespace beampred;
using namespace beampred::models;
using Catch::Matchers::WithinAbs;

namespace
{
    struct Splits
    {
        data::Dataset train, val;
        data::NormStats stats;
    };

    Splits make_splits(double gps_noise, double detection_noise, std::size_t n = 1500, std::uint64_t seed = 1)
    {
        scene::SceneConfig sc;
        sc.gps_noise_std = gps_noise;
        sc.detection_noise_std = detection_noise;
        sc.rng_seed = seed;
        const auto ds = data::relabel(scene::generate_dataset(sc, scene::PhyConfig{}, n));
        auto [train, val] = data::split(ds, 0.7, seed);
        Splits s{std::move(train), std::move(val), {}};
        s.stats = data::fit_normalization(s.train);
        return s;
    }

    nn::TrainConfig quick_training(std::uint64_t seed, int epochs = 40)
    {
        nn::TrainConfig t;
        t.total_epochs = epochs;
        t.decay_epochs = {epochs / 2, 3 * epochs / 4};
        t.rng_seed = seed;
        t.dropout_rate = 0.0;
        return t;
    }

    VisionConfig small_vision(std::uint64_t seed, int epochs = 40)
    {
        VisionConfig c;
        c.training = quick_training(seed, epochs);
        c.hidden_dim = 128;
        c.feature_dim = 32;
        return c;
    }

    double accuracy(const std::vector<Prediction> &preds, const data::Dataset &ds)
    {
        std::size_t hit = 0;
        for (std::size_t i = 0; i < preds.size(); ++i)
            hit += preds[i].predicted_index == ds.samples[i].label;
        return double(hit) / double(preds.size());
    }

    const Splits &clean()
    {
        static const Splits s = make_splits(0.0, 0.0, 2000);
        return s;
    }

    const Trained<VisionModel> &clean_vision()
    {
        static const Trained<VisionModel> v = train_vision(clean().train, nullptr, clean().stats, small_vision(3, 60));
        return v;
    }

    std::string temp_path(const std::string &name)
    {
        return (std::filesystem::temp_directory_path() / ("beampred_models_" + name)).string();
    }
}

TEST_CASE("Model kinds")
{
    CHECK(parse_kind("vision") == ModelKind::vision);
    CHECK(parse_kind("fusion") == ModelKind::fusion);
    CHECK(kind_name(ModelKind::position) == "position");
    CHECK_THROWS_AS(parse_kind("lidar"), ConfigError);
    CHECK(training_seed(1, ModelKind::vision) != training_seed(1, ModelKind::fusion));
    CHECK(training_seed(1, ModelKind::vision) != training_seed(2, ModelKind::vision));
}

TEST_CASE("Prediction and top-k")
{
    SECTION("from logits")
    {
        nn::Vector z(4);
        z << 0.1, 2.0, 2.0, -1.0;
        const auto p = Prediction::from_logits(z);
        CHECK(p.predicted_index == 1);
        CHECK(p.top_k_indices(3) == std::vector<std::size_t>{1, 2, 0});
        CHECK_THROWS_AS(p.top_k_indices(5), ConfigError);
    }
    SECTION("brute-force oracle and monotone invariance")
    {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> nd;
        for (int trial = 0; trial < 200; ++trial)
        {
            nn::Vector z(8);
            for (Eigen::Index i = 0; i < 8; ++i)
                z(i) = std::round(nd(rng) * 2.0) / 2.0; // coarse values force ties
            const auto p = Prediction::from_logits(z);
            const std::size_t k = 1 + std::size_t(trial % 8);
            // oracle: index j ranks above i iff z_j > z_i, or equal with j < i
            std::vector<std::size_t> oracle;
            for (std::size_t i = 0; i < 8; ++i)
            {
                std::size_t above = 0;
                for (std::size_t j = 0; j < 8; ++j)
                    above += z(Eigen::Index(j)) > z(Eigen::Index(i)) ||
                             (z(Eigen::Index(j)) == z(Eigen::Index(i)) && j < i);
                if (above < k)
                    oracle.push_back(i);
            }
            auto got = p.top_k_indices(k);
            std::sort(got.begin(), got.end());
            CHECK(got == oracle);
            const auto shifted = Prediction::from_logits((z.array() * 3.0 + 10.0).matrix());
            CHECK(shifted.top_k_indices(k) == p.top_k_indices(k));
        }
    }
}

TEST_CASE("Fusion vector layout")
{
    const std::vector<double> pos{0.5, 0.25};
    const auto f = fuse({{1.0, 2.0, 3.0}}, pos);
    CHECK(f.values == std::vector<double>{1.0, 2.0, 3.0, 0.5, 0.25});
    CHECK(f.feature_dim() == 3);
    CHECK(f.position() == std::array<double, 2>{0.5, 0.25});
    CHECK(fusion_order == std::vector<std::string>{"features", "lat", "lon"});
    CHECK_THROWS_AS(fuse({{1.0}}, std::vector<double>{0.5}), DimensionError);
}

TEST_CASE("Vision model")
{
    SECTION("learns clean detections")
    {
        const auto &v = clean_vision();
        CHECK(v.model.trained);
        CHECK(v.model.feature_dim() == 32);
        CHECK(v.model.num_beams() == 32);
        CHECK(accuracy(predict_all(v.model, clean().val), clean().val) > 0.9);
    }
    SECTION("constant features can only reach the majority-class rate")
    {
        Splits s = clean();
        for (auto *ds : {&s.train, &s.val})
            for (auto &smp : ds->samples)
                std::fill(smp.features.begin(), smp.features.end(), 0.0);
        s.stats = data::fit_normalization(s.train);
        const auto v = train_vision(s.train, nullptr, s.stats, small_vision(4, 10));
        const auto preds = predict_all(v.model, s.val);
        for (const auto &p : preds)
            CHECK(p.predicted_index == preds.front().predicted_index);
        const auto hist = data::label_histogram(s.val);
        const double best = double(*std::max_element(hist.begin(), hist.end())) / double(s.val.size());
        CHECK(accuracy(preds, s.val) <= best + 1e-12);
    }
    SECTION("single-beam codebook")
    {
        Splits s = clean();
        for (auto *ds : {&s.train, &s.val})
        {
            ds->codebook_size = 1;
            for (auto &smp : ds->samples)
            {
                smp.power = {1.0};
                smp.label = 0;
            }
        }
        const auto v = train_vision(s.train, nullptr, s.stats, small_vision(5, 2));
        CHECK(v.model.num_beams() == 1);
        CHECK(accuracy(predict_all(v.model, s.val), s.val) == 1.0);
    }
    SECTION("prerequisites")
    {
        VisionModel untrained;
        CHECK_THROWS_AS(predict(untrained, clean().val.samples[0]), PrerequisiteError);
        CHECK_THROWS_AS(extract_features(untrained, clean().val.samples[0]), PrerequisiteError);
        auto no_norm = clean_vision().model;
        no_norm.norm.reset();
        CHECK_THROWS_AS(predict(no_norm, clean().val.samples[0]), PrerequisiteError);
    }
}

TEST_CASE("Feature extraction")
{
    const auto &v = clean_vision().model;
    const auto &val = clean().val;
    const auto a = extract_features(v, val.samples[0]);
    CHECK(a.values.size() == 32);
    CHECK(extract_features(v, val.samples[0]).values == a.values);
    const auto all = extract_features(v, val);
    CHECK(all.rows() == 32);
    CHECK(all.cols() == Eigen::Index(val.size()));
    for (Eigen::Index d = 0; d < all.rows(); ++d)
        CHECK_THAT(all(d, 0), Catch::Matchers::WithinRel(a.values[std::size_t(d)], 1e-12));

    // features cluster by label
    double intra = 0.0, inter = 0.0;
    std::size_t n_intra = 0, n_inter = 0;
    for (Eigen::Index i = 0; i < all.cols(); ++i)
        for (Eigen::Index j = i + 1; j < all.cols(); ++j)
        {
            const double d = (all.col(i) - all.col(j)).norm();
            if (val.samples[std::size_t(i)].label == val.samples[std::size_t(j)].label)
                intra += d, ++n_intra;
            else
                inter += d, ++n_inter;
        }
    REQUIRE(n_intra > 0);
    CHECK(intra / double(n_intra) < inter / double(n_inter));
}

TEST_CASE("Position model")
{
    SECTION("learns exact positions")
    {
        PositionConfig c;
        c.training = quick_training(6, 60);
        c.hidden_dim = 128;
        const auto p = train_position(clean().train, nullptr, clean().stats, c);
        CHECK(accuracy(predict_all(p.model, clean().val), clean().val) > 0.9);
    }
    SECTION("cannot beat the Bayes rate of a discrete input set")
    {
        // four distinct positions, noisy labels
        data::Dataset ds;
        ds.codebook_size = 4;
        std::mt19937_64 rng(2);
        std::discrete_distribution<int> pick({0.6, 0.2, 0.1, 0.1});
        for (int i = 0; i < 400; ++i)
        {
            data::Sample s;
            s.features = {0, 0, 0, 0, 0};
            const int cell = i % 4;
            s.position = {33.42 + 1e-4 * cell, -111.93 + 1e-4 * (cell % 2)};
            s.label = std::size_t((pick(rng) + cell) % 4);
            s.power.assign(4, 0.0);
            s.power[s.label] = 1.0;
            ds.samples.push_back(s);
        }
        std::map<std::pair<double, double>, std::vector<int>> counts;
        for (const auto &s : ds.samples)
        {
            auto &c = counts[{s.position.latitude, s.position.longitude}];
            c.resize(4);
            ++c[s.label];
        }
        double bayes = 0.0;
        for (const auto &[key, c] : counts)
            bayes += *std::max_element(c.begin(), c.end());
        bayes /= double(ds.size());

        PositionConfig cfg;
        cfg.training = quick_training(7, 60);
        cfg.training.dropout_rate = 0.0;
        cfg.hidden_dim = 32;
        const auto stats = data::fit_normalization(ds);
        const auto p = train_position(ds, nullptr, stats, cfg);
        const double acc = accuracy(predict_all(p.model, ds), ds);
        CHECK(acc <= bayes + 1e-12);
        CHECK(acc >= bayes - 0.05);
    }
}

TEST_CASE("Fusion model")
{
    const auto s = make_splits(2.0, 0.01);
    const auto vision = train_vision(s.train, nullptr, s.stats, small_vision(8));
    FusionConfig fc;
    fc.training = quick_training(9);
    fc.hidden_dim = 128;

    SECTION("extractor stays frozen and fusion is not worse than vision")
    {
        const auto f = train_fusion(s.train, nullptr, vision.model, s.stats, fc);
        CHECK(f.model.extractor.network == vision.model.network);
        CHECK(f.model.classifier.input_dim() == 32 + 2);
        const double acc_f = accuracy(predict_all(f.model, s.val), s.val);
        const double acc_v = accuracy(predict_all(vision.model, s.val), s.val);
        CHECK(acc_f >= acc_v - 0.03);
        const auto in = fusion_inputs(vision.model, s.val, s.stats);
        CHECK(in.rows() == 34);
        const auto feats = extract_features(vision.model, s.val);
        CHECK(in.topRows(32) == feats);
    }
    SECTION("random labels give chance accuracy")
    {
        auto train = s.train, val = s.val;
        std::mt19937_64 rng(10);
        std::uniform_int_distribution<std::size_t> lab(0, 3);
        for (auto *ds : {&train, &val})
        {
            ds->codebook_size = 4;
            for (auto &smp : ds->samples)
            {
                smp.label = lab(rng);
                smp.power.assign(4, 0.0);
                smp.power[smp.label] = 1.0;
            }
        }
        const auto v4 = train_vision(train, nullptr, s.stats, small_vision(11, 10));
        fc.training.total_epochs = 10;
        const auto f = train_fusion(train, nullptr, v4.model, s.stats, fc);
        const double acc = accuracy(predict_all(f.model, val), val);
        const double se = std::sqrt(0.25 * 0.75 / double(val.size()));
        CHECK(std::abs(acc - 0.25) <= 3.0 * se);
    }
    SECTION("predictions ignore the stored labels")
    {
        const auto f = train_fusion(s.train, nullptr, vision.model, s.stats, fc);
        auto scrambled = s.val;
        for (auto &smp : scrambled.samples)
            smp.label = (smp.label + 7) % 32;
        const auto a = predict_all(f.model, s.val);
        const auto b = predict_all(f.model, scrambled);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i].probabilities == b[i].probabilities);
    }
    SECTION("prerequisites and mismatches")
    {
        CHECK_THROWS_AS(train_fusion(s.train, nullptr, VisionModel{}, s.stats, fc), PrerequisiteError);
        auto four = s.train;
        four.codebook_size = 4;
        for (auto &smp : four.samples)
        {
            smp.label %= 4;
            smp.power.resize(4);
        }
        CHECK_THROWS_AS(train_fusion(four, nullptr, vision.model, s.stats, fc), DimensionError);
    }
    SECTION("checkpoint round trip")
    {
        const auto f = train_fusion(s.train, nullptr, vision.model, s.stats, fc);
        const auto path = temp_path("fusion.json");
        save_checkpoint(AnyModel{f.model}, path);
        const auto back = load_checkpoint(path, ModelKind::fusion);
        CHECK(kind_of(back) == ModelKind::fusion);
        const auto a = predict_all(AnyModel{f.model}, s.val);
        const auto b = predict_all(back, s.val);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i].probabilities == b[i].probabilities);
        CHECK_THROWS_AS(load_checkpoint(path, ModelKind::vision), PrerequisiteError);

        auto j = checkpoint_to_json(AnyModel{f.model});
        j["feature_dim"] = 31;
        CHECK_THROWS_AS(checkpoint_from_json(j), DimensionError);
        j = checkpoint_to_json(AnyModel{f.model});
        j["format"] = "something-else";
        CHECK_THROWS_AS(checkpoint_from_json(j), ParseError);
        std::filesystem::remove(path);
        CHECK_THROWS_AS(load_checkpoint(path), IoError);
    }
}

TEST_CASE("Vision and position checkpoints")
{
    const auto &v = clean_vision().model;
    const auto path = temp_path("vision.json");
    save_checkpoint(AnyModel{v}, path);
    const auto back = std::get<VisionModel>(load_checkpoint(path, ModelKind::vision));
    CHECK(back.network == v.network);
    CHECK(back.norm == v.norm);
    CHECK(back.trained);
    std::filesystem::remove(path);

    PositionConfig c;
    c.training = quick_training(12, 2);
    c.hidden_dim = 16;
    const auto p = train_position(clean().train, nullptr, clean().stats, c);
    auto j = checkpoint_to_json(AnyModel{p.model});
    CHECK(j["model_kind"] == "position");
    CHECK(std::get<PositionModel>(checkpoint_from_json(j)).network == p.model.network);
}
