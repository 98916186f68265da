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

#include "beampred/nn.hpp"
#include "beampred/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace beampred::nn
{
    Mlp::Mlp(std::vector<std::size_t> layer_dims, double dropout_rate) : dims_(std::move(layer_dims))
    {
        if (dims_.size() < 2)
            throw ConfigError("Mlp: need at least input and output dims");
        for (auto d : dims_)
            if (d == 0)
                throw ConfigError("Mlp: layer dims must be >= 1");
        set_dropout_rate(dropout_rate);
        layers_.reserve(dims_.size() - 1);
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l)
            layers_.push_back({Matrix::Zero(Eigen::Index(dims_[l + 1]), Eigen::Index(dims_[l])),
                               Vector::Zero(Eigen::Index(dims_[l + 1]))});
    }

    std::size_t Mlp::parameter_count() const
    {
        std::size_t n = 0;
        for (const auto &layer : layers_)
            n += std::size_t(layer.weights.size() + layer.biases.size());
        return n;
    }

    void Mlp::set_dropout_rate(double rate)
    {
        if (!(rate >= 0.0 && rate < 1.0))
            throw ConfigError("Mlp: dropout_rate must lie in [0, 1)");
        dropout_rate_ = rate;
    }

    void Mlp::initialize(Init init, std::uint64_t seed)
    {
        Rng rng(derive_seed(seed, stream::init));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t l = 0; l < layers_.size(); ++l)
        {
            auto &layer = layers_[l];
            const bool head = l + 1 == layers_.size();
            const double std_dev = (head && init == Init::unit_normal_head)
                                       ? 1.0
                                       : std::sqrt(2.0 / double(layer.weights.cols()));
            // column-major fill keeps the draw order fixed
            for (Eigen::Index i = 0; i < layer.weights.size(); ++i)
                layer.weights.data()[i] = std_dev * normal(rng);
            layer.biases.setZero();
        }
    }

    bool Mlp::operator==(const Mlp &other) const
    {
        if (dims_ != other.dims_ || dropout_rate_ != other.dropout_rate_)
            return false;
        for (std::size_t l = 0; l < layers_.size(); ++l)
            if (layers_[l].weights != other.layers_[l].weights || layers_[l].biases != other.layers_[l].biases)
                return false;
        return true;
    }

    ForwardCache forward(const Mlp &mlp, const Matrix &inputs, Mode mode, Rng *rng)
    {
        if (std::size_t(inputs.rows()) != mlp.input_dim())
            throw DimensionError("forward: input dim " + std::to_string(inputs.rows()) + ", network expects " +
                                 std::to_string(mlp.input_dim()));
        const bool drop = mode == Mode::train && mlp.dropout_rate() > 0.0;
        if (drop && rng == nullptr)
            throw ConfigError("forward: train-mode dropout needs an rng");

        const auto &layers = mlp.layers();
        const std::size_t n_layers = layers.size();
        ForwardCache cache;
        cache.inputs.reserve(n_layers);
        cache.pre_activations.reserve(n_layers - 1);
        if (drop)
            cache.masks.reserve(n_layers - 1);

        const double keep_scale = 1.0 / (1.0 - mlp.dropout_rate());
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        cache.inputs.push_back(inputs);
        for (std::size_t l = 0; l < n_layers; ++l)
        {
            Matrix z = layers[l].weights * cache.inputs.back();
            z.colwise() += layers[l].biases;
            if (l + 1 == n_layers)
            {
                cache.logits = std::move(z);
                break;
            }
            Matrix a = z.cwiseMax(0.0);
            if (drop)
            {
                Matrix mask(a.rows(), a.cols());
                for (Eigen::Index i = 0; i < mask.size(); ++i)
                    mask.data()[i] = unit(*rng) < mlp.dropout_rate() ? 0.0 : keep_scale;
                a = a.cwiseProduct(mask);
                cache.masks.push_back(std::move(mask));
            }
            cache.pre_activations.push_back(std::move(z));
            cache.inputs.push_back(std::move(a));
        }
        return cache;
    }

    Vector forward(const Mlp &mlp, const Vector &input)
    {
        Matrix logits = forward(mlp, Matrix(input), Mode::eval).logits;
        return logits.col(0);
    }

    Matrix penultimate(const Mlp &mlp, const Matrix &inputs)
    {
        if (mlp.num_layers() < 2)
            throw ConfigError("penultimate: network has no hidden layer");
        ForwardCache cache = forward(mlp, inputs, Mode::eval);
        return std::move(cache.inputs.back());
    }

    Vector softmax(const Vector &logits)
    {
        const double top = logits.maxCoeff();
        Vector e = (logits.array() - top).exp().matrix();
        return e / e.sum();
    }

    Matrix softmax_columns(const Matrix &logits)
    {
        Matrix p(logits.rows(), logits.cols());
        for (Eigen::Index c = 0; c < logits.cols(); ++c)
            p.col(c) = softmax(logits.col(c));
        return p;
    }

    double cross_entropy(const Vector &probabilities, std::size_t label)
    {
        if (label >= std::size_t(probabilities.size()))
            throw DimensionError("cross_entropy: label " + std::to_string(label) + " outside " +
                                 std::to_string(probabilities.size()) + " classes");
        return -std::log(probabilities[Eigen::Index(label)] + probability_floor);
    }

    double mean_cross_entropy(const Matrix &probabilities, std::span<const std::size_t> labels)
    {
        if (std::size_t(probabilities.cols()) != labels.size())
            throw DimensionError("mean_cross_entropy: label count differs from batch size");
        double sum = 0.0;
        for (std::size_t i = 0; i < labels.size(); ++i)
            sum += cross_entropy(probabilities.col(Eigen::Index(i)), labels[i]);
        return sum / double(labels.size());
    }

    Gradients backward(const Mlp &mlp, const ForwardCache &cache, std::span<const std::size_t> labels)
    {
        const auto &layers = mlp.layers();
        const std::size_t n_layers = layers.size();
        if (cache.inputs.size() != n_layers || cache.pre_activations.size() + 1 != n_layers ||
            (!cache.masks.empty() && cache.masks.size() + 1 != n_layers))
            throw DimensionError("backward: forward cache does not match the network depth");
        if (std::size_t(cache.logits.rows()) != mlp.output_dim() || std::size_t(cache.logits.cols()) != labels.size())
            throw DimensionError("backward: cached logits do not match network output / label count");
        for (std::size_t l = 0; l < n_layers; ++l)
            if (cache.inputs[l].rows() != layers[l].weights.cols())
                throw DimensionError("backward: cached activation dims do not match layer " + std::to_string(l));

        const auto batch = Eigen::Index(labels.size());
        Matrix delta = softmax_columns(cache.logits);
        for (Eigen::Index i = 0; i < batch; ++i)
        {
            const auto y = labels[std::size_t(i)];
            if (y >= mlp.output_dim())
                throw DimensionError("backward: label " + std::to_string(y) + " outside output range");
            delta(Eigen::Index(y), i) -= 1.0;
        }
        delta /= double(batch);

        Gradients g;
        g.weights.resize(n_layers);
        g.biases.resize(n_layers);
        for (std::size_t l = n_layers; l-- > 0;)
        {
            g.weights[l] = delta * cache.inputs[l].transpose();
            g.biases[l] = delta.rowwise().sum();
            if (l == 0)
                break;
            Matrix upstream = layers[l].weights.transpose() * delta;
            if (!cache.masks.empty())
                upstream = upstream.cwiseProduct(cache.masks[l - 1]);
            const Matrix &z = cache.pre_activations[l - 1];
            delta = (z.array() > 0.0).select(upstream, 0.0);
        }
        return g;
    }

    namespace
    {
        void adam_update(double *p, const double *g, double *m, double *v, std::size_t n, long step, double lr,
                         const AdamConfig &c)
        {
            const double bc1 = 1.0 - std::pow(c.beta1, double(step));
            const double bc2 = 1.0 - std::pow(c.beta2, double(step));
            for (std::size_t i = 0; i < n; ++i)
            {
                m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
                v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
                const double m_hat = m[i] / bc1;
                const double v_hat = v[i] / bc2;
                p[i] -= lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
            }
        }
    }

    void adam_step(std::span<double> params, std::span<const double> grads, AdamMoments &state, double lr,
                   const AdamConfig &config)
    {
        if (params.size() != grads.size())
            throw DimensionError("adam_step: parameter/gradient size mismatch");
        if (state.first.empty() && state.second.empty())
        {
            state.first.assign(params.size(), 0.0);
            state.second.assign(params.size(), 0.0);
        }
        if (state.first.size() != params.size() || state.second.size() != params.size())
            throw DimensionError("adam_step: optimizer state size mismatch");
        ++state.step;
        adam_update(params.data(), grads.data(), state.first.data(), state.second.data(), params.size(), state.step,
                    lr, config);
    }

    AdamOptimizer::AdamOptimizer(const Mlp &mlp, AdamConfig config) : config_(config)
    {
        for (const auto &layer : mlp.layers())
        {
            m_w_.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
            v_w_.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
            m_b_.push_back(Vector::Zero(layer.biases.size()));
            v_b_.push_back(Vector::Zero(layer.biases.size()));
        }
    }

    void AdamOptimizer::step(Mlp &mlp, const Gradients &grads, double lr)
    {
        auto &layers = mlp.layers();
        if (grads.weights.size() != layers.size() || grads.biases.size() != layers.size() ||
            m_w_.size() != layers.size())
            throw DimensionError("AdamOptimizer: gradient set does not match the network");
        ++step_;
        for (std::size_t l = 0; l < layers.size(); ++l)
        {
            auto &w = layers[l].weights;
            auto &b = layers[l].biases;
            if (grads.weights[l].rows() != w.rows() || grads.weights[l].cols() != w.cols() ||
                grads.biases[l].size() != b.size() || m_w_[l].size() != w.size())
                throw DimensionError("AdamOptimizer: shape mismatch at layer " + std::to_string(l));
            adam_update(w.data(), grads.weights[l].data(), m_w_[l].data(), v_w_[l].data(), std::size_t(w.size()),
                        step_, lr, config_);
            adam_update(b.data(), grads.biases[l].data(), m_b_[l].data(), v_b_[l].data(), std::size_t(b.size()),
                        step_, lr, config_);
        }
    }

    void TrainConfig::validate() const
    {
        if (batch_size < 1)
            throw ConfigError("training: batch_size must be >= 1");
        if (!(learning_rate > 0.0))
            throw ConfigError("training: learning_rate must be > 0");
        if (!(decay_factor > 0.0 && decay_factor <= 1.0))
            throw ConfigError("training: decay_factor must lie in (0, 1]");
        if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
            throw ConfigError("training: dropout_rate must lie in [0, 1)");
        if (total_epochs < 1)
            throw ConfigError("training: total_epochs must be >= 1");
        if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 && adam.epsilon > 0.0))
            throw ConfigError("training: invalid Adam constants");
    }

    double learning_rate_at(const TrainConfig &config, int epoch)
    {
        double lr = config.learning_rate;
        for (int k : config.decay_epochs)
            if (epoch > k)
                lr *= config.decay_factor;
        return lr;
    }

    double top1_accuracy(const Mlp &mlp, const TrainingData &set)
    {
        if (set.size() == 0)
            throw ConfigError("top1_accuracy: empty set");
        const Matrix logits = forward(mlp, set.inputs, Mode::eval).logits;
        std::size_t hits = 0;
        for (Eigen::Index c = 0; c < logits.cols(); ++c)
        {
            Eigen::Index best = 0;
            for (Eigen::Index r = 1; r < logits.rows(); ++r)
                if (logits(r, c) > logits(best, c))
                    best = r;
            hits += std::size_t(best) == set.labels[std::size_t(c)];
        }
        return double(hits) / double(set.size());
    }

    namespace
    {
        void check_set(const Mlp &mlp, const TrainingData &set, const char *what)
        {
            if (std::size_t(set.inputs.cols()) != set.labels.size())
                throw DimensionError(std::string(what) + ": input columns differ from label count");
            if (std::size_t(set.inputs.rows()) != mlp.input_dim())
                throw DimensionError(std::string(what) + ": input dim " + std::to_string(set.inputs.rows()) +
                                     ", network expects " + std::to_string(mlp.input_dim()));
            for (auto y : set.labels)
                if (y >= mlp.output_dim())
                    throw DimensionError(std::string(what) + ": label " + std::to_string(y) + " outside " +
                                         std::to_string(mlp.output_dim()) + " classes");
        }
    }

    TrainResult train(Mlp mlp, const TrainingData &train_set, const TrainConfig &config,
                      const TrainingData *val_set)
    {
        config.validate();
        if (train_set.size() == 0)
            throw ConfigError("train: empty training set");
        check_set(mlp, train_set, "train");
        if (val_set != nullptr && val_set->size() > 0)
            check_set(mlp, *val_set, "validation");

        AdamOptimizer optimizer(mlp, config.adam);
        const std::size_t n = train_set.size();
        const Eigen::Index dim = train_set.inputs.rows();
        std::vector<std::size_t> order(n);

        TrainResult result;
        result.history.reserve(std::size_t(config.total_epochs));
        for (int epoch = 1; epoch <= config.total_epochs; ++epoch)
        {
            const double lr = learning_rate_at(config, epoch);
            std::iota(order.begin(), order.end(), std::size_t{0});
            Rng shuffle_rng(derive_seed(config.rng_seed, stream::shuffle, std::uint64_t(epoch)));
            std::shuffle(order.begin(), order.end(), shuffle_rng);
            Rng dropout_rng(derive_seed(config.rng_seed, stream::dropout, std::uint64_t(epoch)));

            double loss_sum = 0.0;
            for (std::size_t start = 0; start < n; start += config.batch_size)
            {
                const std::size_t count = std::min(config.batch_size, n - start);
                Matrix batch(dim, Eigen::Index(count));
                std::vector<std::size_t> labels(count);
                for (std::size_t i = 0; i < count; ++i)
                {
                    batch.col(Eigen::Index(i)) = train_set.inputs.col(Eigen::Index(order[start + i]));
                    labels[i] = train_set.labels[order[start + i]];
                }
                const ForwardCache cache = forward(mlp, batch, Mode::train, &dropout_rng);
                loss_sum += mean_cross_entropy(softmax_columns(cache.logits), labels) * double(count);
                optimizer.step(mlp, backward(mlp, cache, labels), lr);
            }

            EpochRecord rec;
            rec.epoch = epoch;
            rec.learning_rate = lr;
            rec.train_loss = loss_sum / double(n);
            rec.val_top1 = (val_set != nullptr && val_set->size() > 0) ? top1_accuracy(mlp, *val_set)
                                                                       : std::numeric_limits<double>::quiet_NaN();
            result.history.push_back(rec);
        }
        result.model = std::move(mlp);
        return result;
    }

    nlohmann::json mlp_to_json(const Mlp &mlp)
    {
        nlohmann::json layers = nlohmann::json::array();
        for (const auto &layer : mlp.layers())
        {
            std::vector<double> w;
            w.reserve(std::size_t(layer.weights.size()));
            for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
                for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
                    w.push_back(layer.weights(r, c));
            std::vector<double> b(layer.biases.data(), layer.biases.data() + layer.biases.size());
            layers.push_back({{"weights", std::move(w)}, {"biases", std::move(b)}});
        }
        return {{"layer_dims", mlp.layer_dims()}, {"dropout_rate", mlp.dropout_rate()}, {"layers", std::move(layers)}};
    }

    Mlp mlp_from_json(const nlohmann::json &j)
    {
        try
        {
            Mlp mlp(j.at("layer_dims").get<std::vector<std::size_t>>(), j.at("dropout_rate").get<double>());
            const auto &layers = j.at("layers");
            if (layers.size() != mlp.num_layers())
                throw DimensionError("checkpoint: layer count does not match layer_dims");
            for (std::size_t l = 0; l < mlp.num_layers(); ++l)
            {
                auto &layer = mlp.layers()[l];
                const auto w = layers[l].at("weights").get<std::vector<double>>();
                const auto b = layers[l].at("biases").get<std::vector<double>>();
                if (w.size() != std::size_t(layer.weights.size()) || b.size() != std::size_t(layer.biases.size()))
                    throw DimensionError("checkpoint: layer " + std::to_string(l) +
                                         " parameter count does not match layer_dims");
                std::size_t k = 0;
                for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
                    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
                        layer.weights(r, c) = w[k++];
                for (std::size_t i = 0; i < b.size(); ++i)
                    layer.biases[Eigen::Index(i)] = b[i];
            }
            return mlp;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError(std::string("checkpoint: ") + e.what());
        }
    }

    Mlp mlp_from_json(const nlohmann::json &j, const std::vector<std::size_t> &expected_dims)
    {
        Mlp mlp = mlp_from_json(j);
        if (mlp.layer_dims() != expected_dims)
        {
            std::ostringstream os;
            os << "checkpoint: layer dims [";
            for (std::size_t i = 0; i < mlp.layer_dims().size(); ++i)
                os << (i ? "," : "") << mlp.layer_dims()[i];
            os << "] do not match the expected [";
            for (std::size_t i = 0; i < expected_dims.size(); ++i)
                os << (i ? "," : "") << expected_dims[i];
            os << "]";
            throw DimensionError(os.str());
        }
        return mlp;
    }

    std::string history_csv(const std::vector<EpochRecord> &history)
    {
        std::ostringstream os;
        os << "epoch,learning_rate,train_loss,val_top1\n";
        for (const auto &r : history)
        {
            os << r.epoch << ',' << nlohmann::json(r.learning_rate).dump() << ','
               << nlohmann::json(r.train_loss).dump() << ',';
            if (std::isnan(r.val_top1))
                os << "nan";
            else
                os << nlohmann::json(r.val_top1).dump();
            os << '\n';
        }
        return os.str();
    }
}
