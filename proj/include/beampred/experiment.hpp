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

#ifndef BEAMPRED_EXPERIMENT_HPP
#define BEAMPRED_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "beampred/eval.hpp"
#include "beampred/models.hpp"
#include "beampred/scene.hpp"

namespace beampred::experiment
{
    struct CodebookConfig
    {
        std::size_t num_elements = 16;
        double element_spacing = 0.5;
        std::size_t num_beams_raw = data::raw_beams;
        bool downsample = true;

        bool operator==(const CodebookConfig &) const = default;
    };

    struct LinkSettings
    {
        double carrier_hz = phy::default_carrier_hz;
        double ref_gain_at_1m = 1.0;
        double tx_power = 1.0;
        double noise_variance = 0.0;

        bool operator==(const LinkSettings &) const = default;
    };

    struct PipelineConfig
    {
        std::size_t num_samples = 3000;
        double train_fraction = 0.7;
        std::uint64_t seed = 1;

        bool operator==(const PipelineConfig &) const = default;
    };

    struct TrainingConfigs
    {
        models::VisionConfig vision;
        models::PositionConfig position;
        models::FusionConfig fusion;

        bool operator==(const TrainingConfigs &) const = default;
    };

    struct EvalConfig
    {
        std::vector<std::size_t> ks{1, 2, 3};
        std::vector<double> fractions{0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
        std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

        bool operator==(const EvalConfig &) const = default;
    };

    // Training defaults for all three models:
    // batch 32, lr 1e-2, decay x0.1 after epochs 20 and 40, dropout 0.3, 50 epochs.
    struct ExperimentConfig
    {
        std::string scenario = "synthetic";
        scene::SceneConfig scene;
        CodebookConfig codebook;
        LinkSettings link;
        PipelineConfig pipeline;
        TrainingConfigs training;
        EvalConfig eval;
        std::string output_dir = "out";

        // Defaults with all seeds derived from seed 1
        static ExperimentConfig defaults();

        // Reseeds the scene, the split and every model's training from one seed
        void apply_seed(std::uint64_t seed);

        scene::PhyConfig phy_config() const;
        std::size_t num_beams() const; // after optional downsampling
        void validate() const;

        bool operator==(const ExperimentConfig &) const = default;
    };

    // Strict: unknown keys raise ConfigError naming the dotted key path. Missing keys keep defaults.
    ExperimentConfig config_from_json(const nlohmann::json &j);
    nlohmann::json config_to_json(const ExperimentConfig &config);
    ExperimentConfig load_config(const std::string &path);
    void save_config(const ExperimentConfig &config, const std::string &path);

    // Output layout inside output_dir
    namespace files
    {
        inline constexpr const char *config = "config.json";
        inline constexpr const char *codebook = "codebook.json";
        inline constexpr const char *raw_jsonl = "raw.jsonl";
        inline constexpr const char *raw_csv = "raw.csv";
        inline constexpr const char *train_jsonl = "train.jsonl";
        inline constexpr const char *val_jsonl = "val.jsonl";
        inline constexpr const char *train_csv = "train.csv";
        inline constexpr const char *val_csv = "val.csv";
        inline constexpr const char *train_normalized = "train_normalized.jsonl";
        inline constexpr const char *val_normalized = "val_normalized.jsonl";
        inline constexpr const char *norm_stats = "norm_stats.json";
        inline constexpr const char *report_json = "report.json";
        inline constexpr const char *report_csv = "report.csv";
        inline constexpr const char *report_txt = "report.txt";
        inline constexpr const char *sweep_json = "sweep.json";
        inline constexpr const char *sweep_csv = "sweep.csv";
        inline constexpr const char *sweep_txt = "sweep.txt";

        std::string checkpoint(models::ModelKind kind); // <kind>_model.json
        std::string history(models::ModelKind kind);    // <kind>_history.csv
    }

    // In-memory form of what cmd_generate writes
    struct ProcessedData
    {
        data::Dataset raw;
        data::Dataset train;
        data::Dataset val;
        data::NormStats stats;
    };

    ProcessedData build_datasets(const ExperimentConfig &config);

    struct CommandResult
    {
        std::vector<std::string> written; // paths
        std::string summary;              // human-readable, printed by the CLI
    };

    // Synthetic scene -> raw 64-beam dataset -> downsample/relabel -> split -> normalization stats
    CommandResult cmd_generate(const ExperimentConfig &config);

    // Trains one model on the processed split; fusion needs the vision checkpoint
    CommandResult cmd_train(const ExperimentConfig &config, models::ModelKind kind);

    // Top-k table for the three checkpoints on the validation split
    CommandResult cmd_eval(const ExperimentConfig &config);

    // Training-fraction sweep of the fusion pipeline
    CommandResult cmd_sweep(const ExperimentConfig &config);
}

#endif
