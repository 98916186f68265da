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

#ifndef BEAMPRED_MODELS_HPP
#define BEAMPRED_MODELS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "beampred/data.hpp"
#include "beampred/nn.hpp"

namespace beampred::models
{
    enum class ModelKind
    {
        vision,
        position,
        fusion
    };

    std::string_view kind_name(ModelKind kind);
    ModelKind parse_kind(std::string_view name); // throws ConfigError

    // Per-model training seed derived from one experiment seed
    std::uint64_t training_seed(std::uint64_t experiment_seed, ModelKind kind);

    // Softmax output over the codebook. predicted_index is the argmax, lowest index on ties.
    struct Prediction
    {
        std::vector<double> probabilities;
        std::size_t predicted_index = 0;

        static Prediction from_logits(const nn::Vector &logits);

        // k indices by descending probability; equal probabilities keep ascending index order
        std::vector<std::size_t> top_k_indices(std::size_t k) const;
    };

    struct FeatureVector
    {
        std::vector<double> values;
    };

    // [features..., lat_normalized, lon_normalized]
    struct FusedVector
    {
        std::vector<double> values;

        std::size_t feature_dim() const { return values.size() - 2; }
        std::span<const double> features() const { return {values.data(), feature_dim()}; }
        std::array<double, 2> position() const { return {values[values.size() - 2], values.back()}; }
    };

    // Concatenation order recorded in fusion checkpoints
    inline const std::vector<std::string> fusion_order{"features", "lat", "lon"};

    FusedVector fuse(const FeatureVector &features, std::span<const double> normalized_position);

    struct VisionConfig
    {
        nn::TrainConfig training;
        std::size_t hidden_dim = 256;
        std::size_t feature_dim = 64; // T

        bool operator==(const VisionConfig &) const = default;
    };

    struct PositionConfig
    {
        nn::TrainConfig training;
        std::size_t hidden_dim = 256;

        bool operator==(const PositionConfig &) const = default;
    };

    struct FusionConfig
    {
        nn::TrainConfig training;
        std::size_t hidden_dim = 256;

        bool operator==(const FusionConfig &) const = default;
    };

    // Encoder [F, hidden, T] and classifier head [T, M] held as one network;
    // the extracted feature vector is the activation of the last hidden layer.
    struct VisionModel
    {
        nn::Mlp network;
        std::optional<data::NormStats> norm;
        bool trained = false;

        std::size_t feature_dim() const;
        std::size_t num_beams() const { return network.output_dim(); }
    };

    // [2, 256, 256, M] on normalized latitude/longitude
    struct PositionModel
    {
        nn::Mlp network;
        std::optional<data::NormStats> norm;
        bool trained = false;

        std::size_t num_beams() const { return network.output_dim(); }
    };

    // Frozen vision extractor followed by a [T+2, 256, 256, M] classifier
    struct FusionModel
    {
        VisionModel extractor;
        nn::Mlp classifier;
        std::optional<data::NormStats> norm;
        bool trained = false;

        std::size_t num_beams() const { return classifier.output_dim(); }
    };

    using AnyModel = std::variant<VisionModel, PositionModel, FusionModel>;

    template <typename Model>
    struct Trained
    {
        Model model;
        std::vector<nn::EpochRecord> history;
    };

    // Network inputs, one column per sample
    nn::Matrix vision_inputs(const data::Dataset &dataset, const data::NormStats &stats);
    nn::Matrix position_inputs(const data::Dataset &dataset, const data::NormStats &stats);
    nn::Matrix fusion_inputs(const VisionModel &extractor, const data::Dataset &dataset, const data::NormStats &stats);

    // `val` may be null. Labels must lie below train.codebook_size.
    Trained<VisionModel> train_vision(const data::Dataset &train, const data::Dataset *val,
                                      const data::NormStats &stats, const VisionConfig &config);
    Trained<PositionModel> train_position(const data::Dataset &train, const data::Dataset *val,
                                          const data::NormStats &stats, const PositionConfig &config);
    Trained<FusionModel> train_fusion(const data::Dataset &train, const data::Dataset *val,
                                      const VisionModel &vision, const data::NormStats &stats,
                                      const FusionConfig &config);

    FeatureVector extract_features(const VisionModel &model, const data::Sample &sample);
    nn::Matrix extract_features(const VisionModel &model, const data::Dataset &dataset);

    Prediction predict(const VisionModel &model, const data::Sample &sample);
    Prediction predict(const PositionModel &model, const data::Sample &sample);
    Prediction predict(const FusionModel &model, const data::Sample &sample);
    Prediction predict(const AnyModel &model, const data::Sample &sample);

    std::vector<Prediction> predict_all(const VisionModel &model, const data::Dataset &dataset);
    std::vector<Prediction> predict_all(const PositionModel &model, const data::Dataset &dataset);
    std::vector<Prediction> predict_all(const FusionModel &model, const data::Dataset &dataset);
    std::vector<Prediction> predict_all(const AnyModel &model, const data::Dataset &dataset);

    const std::optional<data::NormStats> &norm_stats(const AnyModel &model);
    ModelKind kind_of(const AnyModel &model);

    // Checkpoints: nn network format plus model_kind, feature_dim, fusion_order and the NormStats
    nlohmann::json checkpoint_to_json(const AnyModel &model);
    AnyModel checkpoint_from_json(const nlohmann::json &j);
    void save_checkpoint(const AnyModel &model, const std::string &path);
    AnyModel load_checkpoint(const std::string &path);
    // Throws PrerequisiteError if the file holds a different kind
    AnyModel load_checkpoint(const std::string &path, ModelKind expected);
}

#endif
