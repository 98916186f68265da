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

#ifndef BEAMPRED_EVAL_HPP
#define BEAMPRED_EVAL_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "beampred/data.hpp"
#include "beampred/models.hpp"

namespace beampred::eval
{
    inline constexpr std::array<std::size_t, 3> report_ks{1, 2, 3};

    // Fraction of samples whose label is among the k most probable beams
    double top_k_accuracy(std::span<const models::Prediction> predictions, std::span<const std::size_t> labels,
                          std::size_t k);

    struct ModelAccuracy
    {
        std::string model;
        std::array<double, 3> top{}; // top-1, top-2, top-3
    };

    // Accuracies measured on real camera/GPS data, printed next to the synthetic results for orientation
    struct ReferenceRow
    {
        const char *model;
        std::array<double, 3> day;
        std::array<double, 3> night;
    };

    inline constexpr std::array<ReferenceRow, 3> reference_accuracies{{
        {"vision", {0.7127, 0.9482, 0.9913}, {0.7225, 0.9531, 0.9903}},
        {"position", {0.6163, 0.8965, 0.9741}, {0.5331, 0.7876, 0.8933}},
        {"fusion", {0.7586, 0.9655, 0.9955}, {0.7371, 0.9634, 0.9919}},
    }};

    struct EvalReport
    {
        std::string scenario;
        std::size_t sample_count = 0;
        std::string val_digest;
        std::vector<ModelAccuracy> rows; // vision, position, fusion
    };

    ModelAccuracy evaluate_predictions(const std::string &model, std::span<const models::Prediction> predictions,
                                       std::span<const std::size_t> labels);

    // Throws ConfigError if the models were not trained with identical normalization stats
    EvalReport evaluate_models(const models::VisionModel &vision, const models::PositionModel &position,
                               const models::FusionModel &fusion, const data::Dataset &val,
                               const std::string &scenario);

    nlohmann::json report_to_json(const EvalReport &report);
    // Columns: model,scenario,k,accuracy,n,seed,fraction; one row per model and k (k within 1..3)
    std::string report_csv(const EvalReport &report, std::uint64_t seed, double fraction = 1.0,
                           std::span<const std::size_t> ks = report_ks);
    std::string report_table(const EvalReport &report);

    struct SweepCell
    {
        double fraction = 0.0;
        std::uint64_t seed = 0;
        std::size_t train_size = 0;
        std::array<double, 3> top{};
    };

    struct SweepSummary
    {
        double fraction = 0.0;
        std::array<double, 3> mean{};
        std::array<double, 3> stddev{}; // sample standard deviation over seeds, 0 for one seed
    };

    struct FractionSweep
    {
        std::string scenario;
        std::vector<double> fractions;
        std::vector<std::uint64_t> seeds;
        std::size_t val_size = 0;
        std::string val_digest;
        std::vector<SweepCell> cells; // fraction-major
        std::vector<SweepSummary> summary;

        const SweepSummary &at(double fraction) const;
    };

    struct SweepTraining
    {
        models::VisionConfig vision;
        models::FusionConfig fusion;
    };

    // For every (fraction, seed): subsample the training split, retrain the vision extractor and the
    // fusion classifier from scratch, evaluate on the full validation split
    FractionSweep fraction_sweep(const data::Dataset &train, const data::Dataset &val,
                                 const std::vector<double> &fractions, const std::vector<std::uint64_t> &seeds,
                                 const SweepTraining &training, const std::string &scenario = "synthetic");

    nlohmann::json sweep_to_json(const FractionSweep &sweep);
    // One row per (fraction, seed): fraction,seed,n_train,n_val,top1,top2,top3
    std::string sweep_csv(const FractionSweep &sweep);
    std::string sweep_table(const FractionSweep &sweep);
}

#endif
