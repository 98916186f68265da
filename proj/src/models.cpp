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

#include "beampred/models.hpp"
#include "beampred/error.hpp"
#include "beampred/rng.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace beampred::models
{
    std::string_view kind_name(ModelKind kind)
    {
        switch (kind)
        {
        case ModelKind::vision:
            return "vision";
        case ModelKind::position:
            return "position";
        case ModelKind::fusion:
            return "fusion";
        }
        return "unknown";
    }

    ModelKind parse_kind(std::string_view name)
    {
        if (name == "vision")
            return ModelKind::vision;
        if (name == "position")
            return ModelKind::position;
        if (name == "fusion")
            return ModelKind::fusion;
        throw ConfigError("unknown model kind '" + std::string(name) + "' (expected vision, position or fusion)");
    }

    std::uint64_t training_seed(std::uint64_t experiment_seed, ModelKind kind)
    {
        switch (kind)
        {
        case ModelKind::vision:
            return derive_seed(experiment_seed, stream::vision);
        case ModelKind::position:
            return derive_seed(experiment_seed, stream::position);
        case ModelKind::fusion:
            return derive_seed(experiment_seed, stream::fusion);
        }
        return experiment_seed;
    }

    Prediction Prediction::from_logits(const nn::Vector &logits)
    {
        Prediction p;
        const nn::Vector probs = nn::softmax(logits);
        p.probabilities.assign(probs.data(), probs.data() + probs.size());
        p.predicted_index = data::argmax(p.probabilities);
        return p;
    }

    std::vector<std::size_t> Prediction::top_k_indices(std::size_t k) const
    {
        if (k > probabilities.size())
            throw ConfigError("top_k_indices: k = " + std::to_string(k) + " exceeds " +
                              std::to_string(probabilities.size()) + " beams");
        std::vector<std::size_t> idx(probabilities.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return probabilities[a] > probabilities[b]; });
        idx.resize(k);
        return idx;
    }

    FusedVector fuse(const FeatureVector &features, std::span<const double> normalized_position)
    {
        if (normalized_position.size() != 2)
            throw DimensionError("fuse: position must have 2 entries, got " +
                                 std::to_string(normalized_position.size()));
        FusedVector out;
        out.values.reserve(features.values.size() + 2);
        out.values = features.values;
        out.values.insert(out.values.end(), normalized_position.begin(), normalized_position.end());
        return out;
    }

    std::size_t VisionModel::feature_dim() const
    {
        const auto &dims = network.layer_dims();
        return dims.size() < 3 ? 0 : dims[dims.size() - 2];
    }

    // ---------------------------------------------------------------- inputs

    nn::Matrix vision_inputs(const data::Dataset &dataset, const data::NormStats &stats)
    {
        const auto fdim = Eigen::Index(stats.feature_min.size());
        nn::Matrix x(fdim, Eigen::Index(dataset.size()));
        for (std::size_t i = 0; i < dataset.size(); ++i)
        {
            const auto f = data::normalize_features(dataset.samples[i].features, stats);
            for (Eigen::Index d = 0; d < fdim; ++d)
                x(d, Eigen::Index(i)) = f[std::size_t(d)];
        }
        return x;
    }

    nn::Matrix position_inputs(const data::Dataset &dataset, const data::NormStats &stats)
    {
        nn::Matrix x(2, Eigen::Index(dataset.size()));
        for (std::size_t i = 0; i < dataset.size(); ++i)
        {
            const auto p = data::normalize_position(dataset.samples[i].position, stats);
            x(0, Eigen::Index(i)) = p[0];
            x(1, Eigen::Index(i)) = p[1];
        }
        return x;
    }

    namespace
    {
        void require_trained(const VisionModel &m, const char *what)
        {
            if (!m.trained)
                throw PrerequisiteError(std::string(what) + ": vision model is untrained");
            if (!m.norm)
                throw PrerequisiteError(std::string(what) + ": vision model has no normalization stats");
        }

        template <typename Model>
        const data::NormStats &require_norm(const Model &m, const char *what)
        {
            if (!m.norm)
                throw PrerequisiteError(std::string(what) + ": model has no normalization stats");
            return *m.norm;
        }

        std::size_t codebook_size_of(const data::Dataset &ds)
        {
            if (ds.codebook_size != 0)
                return ds.codebook_size;
            return ds.empty() ? 0 : ds.samples.front().power.size();
        }

        void check_training_set(const data::Dataset &train, const data::NormStats &stats, const char *what)
        {
            if (train.empty())
                throw ConfigError(std::string(what) + ": empty training set");
            train.validate();
            const std::size_t m = codebook_size_of(train);
            if (m == 0)
                throw ConfigError(std::string(what) + ": dataset has no codebook size");
            for (const auto &s : train.samples)
                if (s.label >= m)
                    throw DimensionError(std::string(what) + ": label outside codebook");
            if (train.feature_dim() != stats.feature_min.size())
                throw DimensionError(std::string(what) + ": feature dim differs from normalization stats");
        }

        nn::TrainingData labeled(nn::Matrix inputs, const data::Dataset &ds)
        {
            return {std::move(inputs), ds.labels()};
        }
    }

    nn::Matrix extract_features(const VisionModel &model, const data::Dataset &dataset)
    {
        require_trained(model, "extract_features");
        return nn::penultimate(model.network, vision_inputs(dataset, *model.norm));
    }

    FeatureVector extract_features(const VisionModel &model, const data::Sample &sample)
    {
        data::Dataset one;
        one.samples.push_back(sample);
        const nn::Matrix f = extract_features(model, one);
        return {std::vector<double>(f.data(), f.data() + f.size())};
    }

    nn::Matrix fusion_inputs(const VisionModel &extractor, const data::Dataset &dataset, const data::NormStats &stats)
    {
        const nn::Matrix features = extract_features(extractor, dataset);
        nn::Matrix x(features.rows() + 2, features.cols());
        x.topRows(features.rows()) = features;
        x.bottomRows(2) = position_inputs(dataset, stats);
        return x;
    }

    // ---------------------------------------------------------------- training

    Trained<VisionModel> train_vision(const data::Dataset &train, const data::Dataset *val,
                                      const data::NormStats &stats, const VisionConfig &config)
    {
        check_training_set(train, stats, "train_vision");
        if (config.hidden_dim < 1 || config.feature_dim < 1)
            throw ConfigError("train_vision: hidden_dim and feature_dim must be >= 1");
        const std::size_t m = codebook_size_of(train);

        nn::Mlp net({train.feature_dim(), config.hidden_dim, config.feature_dim, m}, config.training.dropout_rate);
        net.initialize(config.training.init, config.training.rng_seed);

        const auto train_set = labeled(vision_inputs(train, stats), train);
        std::optional<nn::TrainingData> val_set;
        if (val != nullptr && !val->empty())
            val_set = labeled(vision_inputs(*val, stats), *val);

        auto result = nn::train(std::move(net), train_set, config.training, val_set ? &*val_set : nullptr);
        return {VisionModel{std::move(result.model), stats, true}, std::move(result.history)};
    }

    Trained<PositionModel> train_position(const data::Dataset &train, const data::Dataset *val,
                                          const data::NormStats &stats, const PositionConfig &config)
    {
        check_training_set(train, stats, "train_position");
        if (config.hidden_dim < 1)
            throw ConfigError("train_position: hidden_dim must be >= 1");
        const std::size_t m = codebook_size_of(train);

        nn::Mlp net({2, config.hidden_dim, config.hidden_dim, m}, config.training.dropout_rate);
        net.initialize(config.training.init, config.training.rng_seed);

        const auto train_set = labeled(position_inputs(train, stats), train);
        std::optional<nn::TrainingData> val_set;
        if (val != nullptr && !val->empty())
            val_set = labeled(position_inputs(*val, stats), *val);

        auto result = nn::train(std::move(net), train_set, config.training, val_set ? &*val_set : nullptr);
        return {PositionModel{std::move(result.model), stats, true}, std::move(result.history)};
    }

    Trained<FusionModel> train_fusion(const data::Dataset &train, const data::Dataset *val,
                                      const VisionModel &vision, const data::NormStats &stats,
                                      const FusionConfig &config)
    {
        require_trained(vision, "train_fusion");
        check_training_set(train, stats, "train_fusion");
        if (config.hidden_dim < 1)
            throw ConfigError("train_fusion: hidden_dim must be >= 1");
        const std::size_t m = codebook_size_of(train);
        if (vision.num_beams() != m)
            throw DimensionError("train_fusion: vision model predicts " + std::to_string(vision.num_beams()) +
                                 " beams, dataset has " + std::to_string(m));

        const std::size_t t = vision.feature_dim();
        nn::Mlp net({t + 2, config.hidden_dim, config.hidden_dim, m}, config.training.dropout_rate);
        net.initialize(config.training.init, config.training.rng_seed);

        // Extractor is frozen: its features are computed once and never updated
        const auto train_set = labeled(fusion_inputs(vision, train, stats), train);
        std::optional<nn::TrainingData> val_set;
        if (val != nullptr && !val->empty())
            val_set = labeled(fusion_inputs(vision, *val, stats), *val);

        auto result = nn::train(std::move(net), train_set, config.training, val_set ? &*val_set : nullptr);
        return {FusionModel{vision, std::move(result.model), stats, true}, std::move(result.history)};
    }

    // ---------------------------------------------------------------- prediction

    namespace
    {
        std::vector<Prediction> from_logit_columns(const nn::Matrix &logits)
        {
            std::vector<Prediction> out;
            out.reserve(std::size_t(logits.cols()));
            for (Eigen::Index c = 0; c < logits.cols(); ++c)
                out.push_back(Prediction::from_logits(logits.col(c)));
            return out;
        }

        data::Dataset single(const data::Sample &s)
        {
            data::Dataset ds;
            ds.samples.push_back(s);
            return ds;
        }
    }

    std::vector<Prediction> predict_all(const VisionModel &model, const data::Dataset &dataset)
    {
        const auto &stats = require_norm(model, "predict");
        return from_logit_columns(nn::forward(model.network, vision_inputs(dataset, stats), nn::Mode::eval).logits);
    }

    std::vector<Prediction> predict_all(const PositionModel &model, const data::Dataset &dataset)
    {
        const auto &stats = require_norm(model, "predict");
        return from_logit_columns(nn::forward(model.network, position_inputs(dataset, stats), nn::Mode::eval).logits);
    }

    std::vector<Prediction> predict_all(const FusionModel &model, const data::Dataset &dataset)
    {
        const auto &stats = require_norm(model, "predict");
        return from_logit_columns(
            nn::forward(model.classifier, fusion_inputs(model.extractor, dataset, stats), nn::Mode::eval).logits);
    }

    std::vector<Prediction> predict_all(const AnyModel &model, const data::Dataset &dataset)
    {
        return std::visit([&](const auto &m) { return predict_all(m, dataset); }, model);
    }

    Prediction predict(const VisionModel &model, const data::Sample &sample)
    {
        return predict_all(model, single(sample)).front();
    }

    Prediction predict(const PositionModel &model, const data::Sample &sample)
    {
        return predict_all(model, single(sample)).front();
    }

    Prediction predict(const FusionModel &model, const data::Sample &sample)
    {
        return predict_all(model, single(sample)).front();
    }

    Prediction predict(const AnyModel &model, const data::Sample &sample)
    {
        return predict_all(model, single(sample)).front();
    }

    const std::optional<data::NormStats> &norm_stats(const AnyModel &model)
    {
        return std::visit([](const auto &m) -> const std::optional<data::NormStats> & { return m.norm; }, model);
    }

    ModelKind kind_of(const AnyModel &model)
    {
        return static_cast<ModelKind>(model.index());
    }

    // ---------------------------------------------------------------- checkpoints

    namespace
    {
        constexpr const char *checkpoint_format = "beampred-checkpoint";
        constexpr int checkpoint_version = 1;

        nlohmann::json base_json(ModelKind kind, const nn::Mlp &net, const std::optional<data::NormStats> &norm)
        {
            nlohmann::json j{{"format", checkpoint_format},
                             {"version", checkpoint_version},
                             {"model_kind", kind_name(kind)},
                             {"num_beams", net.output_dim()},
                             {"network", nn::mlp_to_json(net)}};
            j["norm_stats"] = norm ? data::norm_stats_to_json(*norm) : nlohmann::json(nullptr);
            return j;
        }

        nlohmann::json vision_json(const VisionModel &m)
        {
            auto j = base_json(ModelKind::vision, m.network, m.norm);
            j["feature_dim"] = m.feature_dim();
            return j;
        }

        std::optional<data::NormStats> norm_from(const nlohmann::json &j)
        {
            const auto &n = j.at("norm_stats");
            if (n.is_null())
                return std::nullopt;
            return data::norm_stats_from_json(n);
        }

        VisionModel vision_from(const nlohmann::json &j)
        {
            VisionModel m;
            m.network = nn::mlp_from_json(j.at("network"));
            m.norm = norm_from(j);
            const auto &dims = m.network.layer_dims();
            if (dims.size() != 4)
                throw DimensionError("checkpoint: vision network must have 2 hidden layers");
            if (j.at("feature_dim").get<std::size_t>() != m.feature_dim())
                throw DimensionError("checkpoint: feature_dim does not match the vision network");
            if (m.norm && m.norm->feature_min.size() != m.network.input_dim())
                throw DimensionError("checkpoint: normalization stats cover " +
                                     std::to_string(m.norm->feature_min.size()) + " features, network expects " +
                                     std::to_string(m.network.input_dim()));
            m.trained = true;
            return m;
        }

        void check_kind(const nlohmann::json &j, ModelKind kind)
        {
            if (j.at("model_kind").get<std::string>() != kind_name(kind))
                throw ParseError("checkpoint: expected model_kind " + std::string(kind_name(kind)));
        }
    }

    nlohmann::json checkpoint_to_json(const AnyModel &model)
    {
        if (const auto *v = std::get_if<VisionModel>(&model))
            return vision_json(*v);
        if (const auto *p = std::get_if<PositionModel>(&model))
            return base_json(ModelKind::position, p->network, p->norm);
        const auto &f = std::get<FusionModel>(model);
        auto j = base_json(ModelKind::fusion, f.classifier, f.norm);
        j["feature_dim"] = f.extractor.feature_dim();
        j["fusion_order"] = fusion_order;
        j["extractor"] = vision_json(f.extractor);
        return j;
    }

    AnyModel checkpoint_from_json(const nlohmann::json &j)
    {
        try
        {
            if (j.at("format").get<std::string>() != checkpoint_format)
                throw ParseError("checkpoint: unrecognized format tag");
            if (j.at("version").get<int>() != checkpoint_version)
                throw ParseError("checkpoint: unsupported version");
            const ModelKind kind = parse_kind(j.at("model_kind").get<std::string>());
            switch (kind)
            {
            case ModelKind::vision:
                return vision_from(j);
            case ModelKind::position:
            {
                PositionModel m;
                m.network = nn::mlp_from_json(j.at("network"));
                m.norm = norm_from(j);
                if (m.network.input_dim() != 2)
                    throw DimensionError("checkpoint: position network input dim must be 2");
                m.trained = true;
                return m;
            }
            case ModelKind::fusion:
            {
                FusionModel m;
                const auto &ext = j.at("extractor");
                check_kind(ext, ModelKind::vision);
                m.extractor = vision_from(ext);
                m.classifier = nn::mlp_from_json(j.at("network"));
                m.norm = norm_from(j);
                if (j.at("fusion_order").get<std::vector<std::string>>() != fusion_order)
                    throw ParseError("checkpoint: unsupported fusion_order");
                const std::size_t t = j.at("feature_dim").get<std::size_t>();
                if (t != m.extractor.feature_dim() || m.classifier.input_dim() != t + 2)
                    throw DimensionError("checkpoint: classifier input dim " +
                                         std::to_string(m.classifier.input_dim()) + " does not match feature_dim " +
                                         std::to_string(m.extractor.feature_dim()) + " + 2");
                if (m.extractor.num_beams() != m.classifier.output_dim())
                    throw DimensionError("checkpoint: extractor and classifier disagree on the beam count");
                m.trained = true;
                return m;
            }
            }
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError(std::string("checkpoint: ") + e.what());
        }
        throw ParseError("checkpoint: unreachable model kind");
    }

    void save_checkpoint(const AnyModel &model, const std::string &path)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + path + "' for writing");
        out << checkpoint_to_json(model).dump() << '\n';
        if (!out)
            throw IoError("write to '" + path + "' failed");
    }

    AnyModel load_checkpoint(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot open '" + path + "'");
        nlohmann::json j;
        try
        {
            in >> j;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError(path + ": " + e.what());
        }
        return checkpoint_from_json(j);
    }

    AnyModel load_checkpoint(const std::string &path, ModelKind expected)
    {
        AnyModel m = load_checkpoint(path);
        if (kind_of(m) != expected)
            throw PrerequisiteError(path + " holds a " + std::string(kind_name(kind_of(m))) + " model, expected " +
                                    std::string(kind_name(expected)));
        return m;
    }
}
