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

#ifndef BEAMPRED_NN_HPP
#define BEAMPRED_NN_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "beampred/rng.hpp"

namespace beampred::nn
{
    using Matrix = Eigen::MatrixXd;
    using Vector = Eigen::VectorXd;

    struct DenseLayer
    {
        Matrix weights; // out x in
        Vector biases;  // out
    };

    enum class Mode
    {
        train,
        eval
    };

    // he_normal: every layer N(0, 2/fan_in).
    // unit_normal_head: hidden layers He, output layer N(0, 1).
    enum class Init
    {
        he_normal,
        unit_normal_head
    };

    // Dense -> ReLU -> dropout for every hidden layer, plain dense output layer (logits)
    class Mlp
    {
    public:
        Mlp() = default;
        // Zero weights and biases
        Mlp(std::vector<std::size_t> layer_dims, double dropout_rate);

        const std::vector<std::size_t> &layer_dims() const { return dims_; }
        std::size_t input_dim() const { return dims_.front(); }
        std::size_t output_dim() const { return dims_.back(); }
        std::size_t num_layers() const { return layers_.size(); }
        std::size_t parameter_count() const;

        double dropout_rate() const { return dropout_rate_; }
        void set_dropout_rate(double rate);

        std::vector<DenseLayer> &layers() { return layers_; }
        const std::vector<DenseLayer> &layers() const { return layers_; }

        void initialize(Init init, std::uint64_t seed);

        bool operator==(const Mlp &other) const;

    private:
        std::vector<std::size_t> dims_;
        std::vector<DenseLayer> layers_;
        double dropout_rate_ = 0.0;
    };

    // Columns of every matrix are samples
    struct ForwardCache
    {
        std::vector<Matrix> inputs;          // input to each layer
        std::vector<Matrix> pre_activations; // z of each hidden layer
        std::vector<Matrix> masks;           // inverted-dropout masks (0 or 1/(1-r)); empty in eval mode
        Matrix logits;
    };

    // Train mode draws dropout masks from rng (required when dropout_rate > 0)
    ForwardCache forward(const Mlp &mlp, const Matrix &inputs, Mode mode, Rng *rng = nullptr);
    Vector forward(const Mlp &mlp, const Vector &input);

    // Eval-mode post-ReLU activation of the last hidden layer
    Matrix penultimate(const Mlp &mlp, const Matrix &inputs);

    Vector softmax(const Vector &logits);
    Matrix softmax_columns(const Matrix &logits);

    inline constexpr double probability_floor = 1e-12;

    // -ln(p[label] + 1e-12)
    double cross_entropy(const Vector &probabilities, std::size_t label);
    double mean_cross_entropy(const Matrix &probabilities, std::span<const std::size_t> labels);

    struct Gradients
    {
        std::vector<Matrix> weights;
        std::vector<Vector> biases;
    };

    // Gradient of the batch-mean cross entropy of softmax(logits); dropout masks are replayed from the cache
    Gradients backward(const Mlp &mlp, const ForwardCache &cache, std::span<const std::size_t> labels);

    struct AdamConfig
    {
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;

        bool operator==(const AdamConfig &) const = default;
    };

    struct AdamMoments
    {
        std::vector<double> first;
        std::vector<double> second;
        long step = 0;
    };

    // One bias-corrected Adam update of a flat parameter vector
    void adam_step(std::span<double> params, std::span<const double> grads, AdamMoments &state, double lr,
                   const AdamConfig &config = {});

    class AdamOptimizer
    {
    public:
        AdamOptimizer(const Mlp &mlp, AdamConfig config = {});
        void step(Mlp &mlp, const Gradients &grads, double lr);
        long steps() const { return step_; }

    private:
        AdamConfig config_;
        std::vector<Matrix> m_w_, v_w_;
        std::vector<Vector> m_b_, v_b_;
        long step_ = 0;
    };

    struct TrainConfig
    {
        std::size_t batch_size = 32;
        double learning_rate = 1e-2;
        std::vector<int> decay_epochs{20, 40};
        double decay_factor = 0.1;
        double dropout_rate = 0.3;
        int total_epochs = 50;
        AdamConfig adam;
        Init init = Init::he_normal;
        std::uint64_t rng_seed = 0;

        void validate() const;
        bool operator==(const TrainConfig &) const = default;
    };

    // Epochs are 1-indexed; each decay epoch k scales the rate for every epoch after k
    double learning_rate_at(const TrainConfig &config, int epoch);

    struct TrainingData
    {
        Matrix inputs; // dim x n
        std::vector<std::size_t> labels;

        std::size_t size() const { return labels.size(); }
    };

    struct EpochRecord
    {
        int epoch = 0;
        double learning_rate = 0.0;
        double train_loss = 0.0;
        double val_top1 = 0.0; // NaN without a validation set
    };

    struct TrainResult
    {
        Mlp model;
        std::vector<EpochRecord> history;
    };

    // Mini-batch Adam on mean cross entropy; returns the last-epoch model
    TrainResult train(Mlp mlp, const TrainingData &train_set, const TrainConfig &config,
                      const TrainingData *val_set = nullptr);

    // Top-1 accuracy of eval-mode predictions
    double top1_accuracy(const Mlp &mlp, const TrainingData &set);

    nlohmann::json mlp_to_json(const Mlp &mlp);
    Mlp mlp_from_json(const nlohmann::json &j);
    // Same, but rejects a network whose layer dims differ from expected_dims
    Mlp mlp_from_json(const nlohmann::json &j, const std::vector<std::size_t> &expected_dims);

    std::string history_csv(const std::vector<EpochRecord> &history);
}

#endif
