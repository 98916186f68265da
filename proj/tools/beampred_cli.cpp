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

// Command-line front end: generate / train / eval / sweep / config

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "beampred/error.hpp"
#include "beampred/experiment.hpp"

using namespace beampred;

namespace
{
    struct CommonOptions
    {
        std::string config_path;
        std::string out_dir;
        std::optional<std::uint64_t> seed;
    };

    void add_common(CLI::App *cmd, CommonOptions &opts)
    {
        cmd->add_option("--config", opts.config_path, "Experiment config (JSON); defaults are used when omitted");
        cmd->add_option("--out", opts.out_dir, "Output directory (overrides output_dir)");
        cmd->add_option("--seed", opts.seed, "Master seed: reseeds scene, split and training");
    }

    experiment::ExperimentConfig resolve(const CommonOptions &opts)
    {
        auto config = opts.config_path.empty() ? experiment::ExperimentConfig::defaults()
                                               : experiment::load_config(opts.config_path);
        if (!opts.out_dir.empty())
            config.output_dir = opts.out_dir;
        if (opts.seed)
            config.apply_seed(*opts.seed);
        config.validate();
        return config;
    }

    int exit_code(ErrorCategory c)
    {
        switch (c)
        {
        case ErrorCategory::config:
            return 2;
        case ErrorCategory::io:
            return 3;
        case ErrorCategory::parse:
            return 4;
        case ErrorCategory::dimension:
            return 5;
        case ErrorCategory::prerequisite:
            return 6;
        case ErrorCategory::geometry:
            return 7;
        }
        return 1;
    }

    void report(const experiment::CommandResult &r)
    {
        std::cout << r.summary;
        for (const auto &f : r.written)
            std::cout << "wrote " << f << '\n';
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Multi-modal (vision + position) mmWave beam prediction toolkit"};
    app.require_subcommand(1);

    CommonOptions gen_opts, train_opts, eval_opts, sweep_opts, cfg_opts;
    std::string model_kind;

    auto *gen = app.add_subcommand("generate", "Generate the synthetic scenario and the processed train/val split");
    add_common(gen, gen_opts);

    auto *train = app.add_subcommand("train", "Train one model on the processed split");
    add_common(train, train_opts);
    train->add_option("--model", model_kind, "vision | position | fusion")
        ->required()
        ->check(CLI::IsMember({"vision", "position", "fusion"}));

    auto *ev = app.add_subcommand("eval", "Evaluate the three trained models (top-1/2/3)");
    add_common(ev, eval_opts);

    auto *sweep = app.add_subcommand("sweep", "Training-fraction sweep of the fusion model");
    add_common(sweep, sweep_opts);

    auto *cfg = app.add_subcommand("config", "Print the resolved experiment config as JSON");
    add_common(cfg, cfg_opts);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e);
    }

    try
    {
        if (*gen)
            report(experiment::cmd_generate(resolve(gen_opts)));
        else if (*train)
            report(experiment::cmd_train(resolve(train_opts), models::parse_kind(model_kind)));
        else if (*ev)
            report(experiment::cmd_eval(resolve(eval_opts)));
        else if (*sweep)
            report(experiment::cmd_sweep(resolve(sweep_opts)));
        else if (*cfg)
            std::cout << experiment::config_to_json(resolve(cfg_opts)).dump(2) << '\n';
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << category_name(e.category()) << ": " << e.what() << '\n';
        return exit_code(e.category());
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
