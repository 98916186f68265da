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

#include "beampred/experiment.hpp"
#include "beampred/error.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace fs = std::filesystem;

namespace beampred::experiment
{
    using nlohmann::json;

    ExperimentConfig ExperimentConfig::defaults()
    {
        ExperimentConfig c;
        c.apply_seed(1);
        return c;
    }

    void ExperimentConfig::apply_seed(std::uint64_t seed)
    {
        scene.rng_seed = seed;
        pipeline.seed = seed;
        training.vision.training.rng_seed = models::training_seed(seed, models::ModelKind::vision);
        training.position.training.rng_seed = models::training_seed(seed, models::ModelKind::position);
        training.fusion.training.rng_seed = models::training_seed(seed, models::ModelKind::fusion);
    }

    scene::PhyConfig ExperimentConfig::phy_config() const
    {
        scene::PhyConfig p;
        p.array.num_elements = codebook.num_elements;
        p.array.element_spacing = codebook.element_spacing;
        p.array.boresight_azimuth = scene.bs_boresight_azimuth;
        p.num_beams = codebook.num_beams_raw;
        p.ref_gain_at_1m = link.ref_gain_at_1m;
        p.carrier_hz = link.carrier_hz;
        p.link.tx_power = link.tx_power;
        p.link.noise_variance = link.noise_variance;
        return p;
    }

    std::size_t ExperimentConfig::num_beams() const
    {
        return codebook.downsample ? data::downsampled_beams : codebook.num_beams_raw;
    }

    void ExperimentConfig::validate() const
    {
        scene.validate();
        phy_config().validate();
        if (codebook.downsample && codebook.num_beams_raw != data::raw_beams)
            throw ConfigError("codebook.downsample requires num_beams_raw = 64");
        if (pipeline.num_samples < 2)
            throw ConfigError("pipeline.num_samples must be >= 2");
        if (!(pipeline.train_fraction > 0.0 && pipeline.train_fraction < 1.0))
            throw ConfigError("pipeline.train_fraction must lie in (0, 1)");
        training.vision.training.validate();
        training.position.training.validate();
        training.fusion.training.validate();
        if (training.vision.feature_dim < 1 || training.vision.hidden_dim < 1 || training.position.hidden_dim < 1 ||
            training.fusion.hidden_dim < 1)
            throw ConfigError("training: layer widths must be >= 1");
        if (eval.ks.empty())
            throw ConfigError("eval.ks must not be empty");
        for (auto k : eval.ks)
            if (std::find(eval::report_ks.begin(), eval::report_ks.end(), k) == eval::report_ks.end() ||
                k > num_beams())
                throw ConfigError("eval.ks: k = " + std::to_string(k) + " is not a reported top-k column");
        if (eval.fractions.empty())
            throw ConfigError("eval.fractions must not be empty");
        for (std::size_t i = 0; i < eval.fractions.size(); ++i)
            if (!(eval.fractions[i] > 0.0 && eval.fractions[i] <= 1.0) ||
                (i > 0 && !(eval.fractions[i] > eval.fractions[i - 1])))
                throw ConfigError("eval.fractions must be strictly increasing values in (0, 1]");
        if (eval.seeds.empty())
            throw ConfigError("eval.seeds must not be empty");
        if (output_dir.empty())
            throw ConfigError("output_dir must not be empty");
    }

    // ---------------------------------------------------------------- config (de)serialization

    namespace
    {
        // Reads known keys of one JSON object and rejects everything else
        class ObjectReader
        {
        public:
            ObjectReader(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    throw ConfigError("config: '" + (path_.empty() ? std::string("<root>") : path_) +
                                      "' must be an object");
            }

            template <typename T>
            void get(const char *key, T &out)
            {
                seen_.insert(key);
                const auto it = j_.find(key);
                if (it == j_.end())
                    return;
                try
                {
                    read(*it, out);
                }
                catch (const json::exception &)
                {
                    throw ConfigError("config: '" + name(key) + "' has the wrong type");
                }
            }

            ObjectReader child(const char *key)
            {
                seen_.insert(key);
                const auto it = j_.find(key);
                return it == j_.end() ? ObjectReader(empty(), name(key)) : ObjectReader(*it, name(key));
            }

            void finish() const
            {
                for (const auto &item : j_.items())
                    if (!seen_.contains(item.key()))
                        throw ConfigError("config: unknown key '" + name(item.key()) + "'");
            }

        private:
            static const json &empty()
            {
                static const json e = json::object();
                return e;
            }

            std::string name(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            static void read(const json &v, double &out)
            {
                if (!v.is_number())
                    throw json::type_error::create(302, "number expected", &v);
                out = v.get<double>();
            }

            static void read(const json &v, bool &out)
            {
                if (!v.is_boolean())
                    throw json::type_error::create(302, "boolean expected", &v);
                out = v.get<bool>();
            }

            template <typename T>
                requires std::is_integral_v<T>
            static void read(const json &v, T &out)
            {
                if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0 && !v.is_number_unsigned()))
                    throw json::type_error::create(302, "integer expected", &v);
                out = v.get<T>();
            }

            static void read(const json &v, std::string &out)
            {
                if (!v.is_string())
                    throw json::type_error::create(302, "string expected", &v);
                out = v.get<std::string>();
            }

            template <typename T, std::size_t N>
            static void read(const json &v, std::array<T, N> &out)
            {
                if (!v.is_array() || v.size() != N)
                    throw json::type_error::create(302, "fixed-size array expected", &v);
                for (std::size_t i = 0; i < N; ++i)
                    read(v[i], out[i]);
            }

            template <typename T>
            static void read(const json &v, std::vector<T> &out)
            {
                if (!v.is_array())
                    throw json::type_error::create(302, "array expected", &v);
                std::vector<T> tmp(v.size());
                for (std::size_t i = 0; i < v.size(); ++i)
                    read(v[i], tmp[i]);
                out = std::move(tmp);
            }

            const json &j_;
            std::string path_;
            std::set<std::string> seen_;
        };

        std::string init_name(nn::Init init)
        {
            return init == nn::Init::he_normal ? "he_normal" : "unit_normal_head";
        }

        nn::Init parse_init(const std::string &s)
        {
            if (s == "he_normal")
                return nn::Init::he_normal;
            if (s == "unit_normal_head")
                return nn::Init::unit_normal_head;
            throw ConfigError("config: unknown init '" + s + "' (expected he_normal or unit_normal_head)");
        }

        void read_train(ObjectReader &r, nn::TrainConfig &t)
        {
            r.get("batch_size", t.batch_size);
            r.get("learning_rate", t.learning_rate);
            r.get("decay_epochs", t.decay_epochs);
            r.get("decay_factor", t.decay_factor);
            r.get("dropout_rate", t.dropout_rate);
            r.get("total_epochs", t.total_epochs);
            r.get("adam_beta1", t.adam.beta1);
            r.get("adam_beta2", t.adam.beta2);
            r.get("adam_epsilon", t.adam.epsilon);
            std::string init = init_name(t.init);
            r.get("init", init);
            t.init = parse_init(init);
            r.get("rng_seed", t.rng_seed);
        }

        json write_train(const nn::TrainConfig &t)
        {
            return {{"batch_size", t.batch_size},
                    {"learning_rate", t.learning_rate},
                    {"decay_epochs", t.decay_epochs},
                    {"decay_factor", t.decay_factor},
                    {"dropout_rate", t.dropout_rate},
                    {"total_epochs", t.total_epochs},
                    {"adam_beta1", t.adam.beta1},
                    {"adam_beta2", t.adam.beta2},
                    {"adam_epsilon", t.adam.epsilon},
                    {"init", init_name(t.init)},
                    {"rng_seed", t.rng_seed}};
        }
    }

    ExperimentConfig config_from_json(const json &j)
    {
        ExperimentConfig c = ExperimentConfig::defaults();
        ObjectReader root(j, "");
        root.get("scenario", c.scenario);
        root.get("output_dir", c.output_dir);

        {
            auto s = root.child("scene");
            auto &sc = c.scene;
            s.get("bs_position", sc.bs_position);
            s.get("bs_boresight_azimuth", sc.bs_boresight_azimuth);
            s.get("road_start", sc.road_start);
            s.get("road_end", sc.road_end);
            s.get("lateral_jitter", sc.lateral_jitter);
            s.get("user_height", sc.user_height);
            s.get("vehicle_length", sc.vehicle_length);
            s.get("vehicle_height", sc.vehicle_height);
            s.get("gps_noise_std", sc.gps_noise_std);
            s.get("detection_noise_std", sc.detection_noise_std);
            s.get("rng_seed", sc.rng_seed);
            {
                auto cam = s.child("camera");
                cam.get("width_px", sc.camera.width_px);
                cam.get("height_px", sc.camera.height_px);
                cam.get("channels", sc.camera.channels);
                cam.get("horizontal_fov", sc.camera.horizontal_fov);
                cam.get("mount_height", sc.camera.mount_height);
                cam.finish();
            }
            {
                auto geo = s.child("geo_anchor");
                geo.get("latitude", sc.geo_anchor.latitude);
                geo.get("longitude", sc.geo_anchor.longitude);
                geo.finish();
            }
            s.finish();
        }
        {
            auto cb = root.child("codebook");
            cb.get("num_elements", c.codebook.num_elements);
            cb.get("element_spacing", c.codebook.element_spacing);
            cb.get("num_beams_raw", c.codebook.num_beams_raw);
            cb.get("downsample", c.codebook.downsample);
            cb.finish();
        }
        {
            auto l = root.child("link");
            l.get("carrier_hz", c.link.carrier_hz);
            l.get("ref_gain_at_1m", c.link.ref_gain_at_1m);
            l.get("tx_power", c.link.tx_power);
            l.get("noise_variance", c.link.noise_variance);
            l.finish();
        }
        {
            auto p = root.child("pipeline");
            p.get("num_samples", c.pipeline.num_samples);
            p.get("train_fraction", c.pipeline.train_fraction);
            p.get("seed", c.pipeline.seed);
            p.finish();
        }
        {
            auto t = root.child("training");
            {
                auto v = t.child("vision");
                v.get("hidden_dim", c.training.vision.hidden_dim);
                v.get("feature_dim", c.training.vision.feature_dim);
                read_train(v, c.training.vision.training);
                v.finish();
            }
            {
                auto p = t.child("position");
                p.get("hidden_dim", c.training.position.hidden_dim);
                read_train(p, c.training.position.training);
                p.finish();
            }
            {
                auto f = t.child("fusion");
                f.get("hidden_dim", c.training.fusion.hidden_dim);
                read_train(f, c.training.fusion.training);
                f.finish();
            }
            t.finish();
        }
        {
            auto e = root.child("eval");
            e.get("ks", c.eval.ks);
            e.get("fractions", c.eval.fractions);
            e.get("seeds", c.eval.seeds);
            e.finish();
        }
        root.finish();
        c.validate();
        return c;
    }

    json config_to_json(const ExperimentConfig &c)
    {
        const auto &sc = c.scene;
        json vision = write_train(c.training.vision.training);
        vision["hidden_dim"] = c.training.vision.hidden_dim;
        vision["feature_dim"] = c.training.vision.feature_dim;
        json position = write_train(c.training.position.training);
        position["hidden_dim"] = c.training.position.hidden_dim;
        json fusion = write_train(c.training.fusion.training);
        fusion["hidden_dim"] = c.training.fusion.hidden_dim;

        return {{"scenario", c.scenario},
                {"output_dir", c.output_dir},
                {"scene",
                 {{"bs_position", sc.bs_position},
                  {"bs_boresight_azimuth", sc.bs_boresight_azimuth},
                  {"road_start", sc.road_start},
                  {"road_end", sc.road_end},
                  {"lateral_jitter", sc.lateral_jitter},
                  {"user_height", sc.user_height},
                  {"vehicle_length", sc.vehicle_length},
                  {"vehicle_height", sc.vehicle_height},
                  {"gps_noise_std", sc.gps_noise_std},
                  {"detection_noise_std", sc.detection_noise_std},
                  {"rng_seed", sc.rng_seed},
                  {"camera",
                   {{"width_px", sc.camera.width_px},
                    {"height_px", sc.camera.height_px},
                    {"channels", sc.camera.channels},
                    {"horizontal_fov", sc.camera.horizontal_fov},
                    {"mount_height", sc.camera.mount_height}}},
                  {"geo_anchor", {{"latitude", sc.geo_anchor.latitude}, {"longitude", sc.geo_anchor.longitude}}}}},
                {"codebook",
                 {{"num_elements", c.codebook.num_elements},
                  {"element_spacing", c.codebook.element_spacing},
                  {"num_beams_raw", c.codebook.num_beams_raw},
                  {"downsample", c.codebook.downsample}}},
                {"link",
                 {{"carrier_hz", c.link.carrier_hz},
                  {"ref_gain_at_1m", c.link.ref_gain_at_1m},
                  {"tx_power", c.link.tx_power},
                  {"noise_variance", c.link.noise_variance}}},
                {"pipeline",
                 {{"num_samples", c.pipeline.num_samples},
                  {"train_fraction", c.pipeline.train_fraction},
                  {"seed", c.pipeline.seed}}},
                {"training", {{"vision", vision}, {"position", position}, {"fusion", fusion}}},
                {"eval", {{"ks", c.eval.ks}, {"fractions", c.eval.fractions}, {"seeds", c.eval.seeds}}}};
    }

    ExperimentConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open config '" + path + "'");
        json j;
        try
        {
            in >> j;
        }
        catch (const json::exception &e)
        {
            throw ParseError(path + ": " + e.what());
        }
        return config_from_json(j);
    }

    namespace
    {
        void write_text(const fs::path &path, const std::string &text)
        {
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw IoError("cannot open '" + path.string() + "' for writing");
            out << text;
            if (!out)
                throw IoError("write to '" + path.string() + "' failed");
        }

        fs::path prepare_dir(const ExperimentConfig &c)
        {
            const fs::path dir(c.output_dir);
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec)
                throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
            return dir;
        }

        fs::path require_file(const fs::path &dir, const std::string &name, const std::string &hint)
        {
            const fs::path p = dir / name;
            if (!fs::exists(p))
                throw PrerequisiteError("missing " + p.string() + " (" + hint + ")");
            return p;
        }
    }

    void save_config(const ExperimentConfig &config, const std::string &path)
    {
        write_text(path, config_to_json(config).dump(2) + "\n");
    }

    // ---------------------------------------------------------------- commands

    std::string files::checkpoint(models::ModelKind kind)
    {
        return std::string(models::kind_name(kind)) + "_model.json";
    }

    std::string files::history(models::ModelKind kind)
    {
        return std::string(models::kind_name(kind)) + "_history.csv";
    }

    ProcessedData build_datasets(const ExperimentConfig &config)
    {
        config.validate();
        ProcessedData pd;
        pd.raw = scene::generate_dataset(config.scene, config.phy_config(), config.pipeline.num_samples);
        const data::Dataset processed = config.codebook.downsample ? data::relabel(pd.raw) : pd.raw;
        std::tie(pd.train, pd.val) = data::split(processed, config.pipeline.train_fraction, config.pipeline.seed);
        pd.stats = data::fit_normalization(pd.train);
        return pd;
    }

    CommandResult cmd_generate(const ExperimentConfig &config)
    {
        config.validate();
        const fs::path dir = prepare_dir(config);
        CommandResult res;
        auto out = [&](const char *name) {
            res.written.push_back((dir / name).string());
            return res.written.back();
        };

        const scene::PhyConfig phy_config = config.phy_config();
        const ProcessedData pd = build_datasets(config);
        const auto &[raw, train, val, stats] = pd;

        save_config(config, out(files::config));
        phy::save_codebook(phy::dft_codebook(scene::aligned_geometry(config.scene, phy_config), phy_config.num_beams),
                           out(files::codebook));
        data::save_jsonl(raw, out(files::raw_jsonl));
        data::save_csv(raw, out(files::raw_csv));
        data::save_jsonl(train, out(files::train_jsonl));
        data::save_jsonl(val, out(files::val_jsonl));
        data::save_csv(train, out(files::train_csv));
        data::save_csv(val, out(files::val_csv));
        data::save_jsonl(data::apply_normalization(train, stats), out(files::train_normalized));
        data::save_jsonl(data::apply_normalization(val, stats), out(files::val_normalized));
        data::save_norm_stats(stats, out(files::norm_stats));

        std::ostringstream os;
        os << "generated " << raw.size() << " samples (" << train.size() << " train / " << val.size()
           << " val), " << train.codebook_size << " beams\n";
        os << "label histogram (beam: count)\n";
        auto hist = data::label_histogram(train);
        const auto val_hist = data::label_histogram(val);
        for (std::size_t m = 0; m < hist.size(); ++m)
            hist[m] += val_hist[m];
        for (std::size_t m = 0; m < hist.size(); ++m)
            os << "  " << m << ": " << hist[m] << '\n';
        res.summary = os.str();
        return res;
    }

    namespace
    {
        struct ProcessedSplit
        {
            data::Dataset train;
            data::Dataset val;
            data::NormStats stats;
        };

        ProcessedSplit load_processed(const fs::path &dir)
        {
            const char *hint = "run `generate` first";
            ProcessedSplit p;
            p.train = data::load_jsonl(require_file(dir, files::train_jsonl, hint).string());
            p.val = data::load_jsonl(require_file(dir, files::val_jsonl, hint).string());
            p.stats = data::load_norm_stats(require_file(dir, files::norm_stats, hint).string());
            if (p.train.empty())
                throw PrerequisiteError("training split in " + dir.string() + " is empty");
            return p;
        }

        template <typename Model>
        Model load_typed(const fs::path &dir, models::ModelKind kind, const std::string &hint)
        {
            const fs::path p = require_file(dir, files::checkpoint(kind), hint);
            return std::get<Model>(models::load_checkpoint(p.string(), kind));
        }
    }

    CommandResult cmd_train(const ExperimentConfig &config, models::ModelKind kind)
    {
        config.validate();
        const fs::path dir = prepare_dir(config);
        const ProcessedSplit split = load_processed(dir);

        models::AnyModel model;
        std::vector<nn::EpochRecord> history;
        switch (kind)
        {
        case models::ModelKind::vision:
        {
            auto t = models::train_vision(split.train, &split.val, split.stats, config.training.vision);
            model = std::move(t.model);
            history = std::move(t.history);
            break;
        }
        case models::ModelKind::position:
        {
            auto t = models::train_position(split.train, &split.val, split.stats, config.training.position);
            model = std::move(t.model);
            history = std::move(t.history);
            break;
        }
        case models::ModelKind::fusion:
        {
            const auto vision =
                load_typed<models::VisionModel>(dir, models::ModelKind::vision, "fusion needs `train --model vision` first");
            auto t = models::train_fusion(split.train, &split.val, vision, split.stats, config.training.fusion);
            model = std::move(t.model);
            history = std::move(t.history);
            break;
        }
        }

        CommandResult res;
        const fs::path ckpt = dir / files::checkpoint(kind);
        const fs::path hist = dir / files::history(kind);
        models::save_checkpoint(model, ckpt.string());
        write_text(hist, nn::history_csv(history));
        res.written = {ckpt.string(), hist.string()};

        std::ostringstream os;
        os << "trained " << models::kind_name(kind) << " model for " << history.size() << " epochs; final train loss "
           << history.back().train_loss << ", val top-1 " << history.back().val_top1 << '\n';
        res.summary = os.str();
        return res;
    }

    CommandResult cmd_eval(const ExperimentConfig &config)
    {
        config.validate();
        const fs::path dir = prepare_dir(config);
        const ProcessedSplit split = load_processed(dir);
        const char *hint = "run `train` for every model first";
        const auto vision = load_typed<models::VisionModel>(dir, models::ModelKind::vision, hint);
        const auto position = load_typed<models::PositionModel>(dir, models::ModelKind::position, hint);
        const auto fusion = load_typed<models::FusionModel>(dir, models::ModelKind::fusion, hint);

        const eval::EvalReport report = eval::evaluate_models(vision, position, fusion, split.val, config.scenario);

        CommandResult res;
        write_text(dir / files::report_json, eval::report_to_json(report).dump(2) + "\n");
        write_text(dir / files::report_csv, eval::report_csv(report, config.pipeline.seed, 1.0, config.eval.ks));
        const std::string table = eval::report_table(report);
        write_text(dir / files::report_txt, table);
        res.written = {(dir / files::report_json).string(), (dir / files::report_csv).string(),
                       (dir / files::report_txt).string()};
        res.summary = table;
        return res;
    }

    CommandResult cmd_sweep(const ExperimentConfig &config)
    {
        config.validate();
        const fs::path dir = prepare_dir(config);
        const ProcessedSplit split = load_processed(dir);

        eval::SweepTraining training{config.training.vision, config.training.fusion};
        const eval::FractionSweep sweep = eval::fraction_sweep(split.train, split.val, config.eval.fractions,
                                                               config.eval.seeds, training, config.scenario);

        CommandResult res;
        write_text(dir / files::sweep_json, eval::sweep_to_json(sweep).dump(2) + "\n");
        write_text(dir / files::sweep_csv, eval::sweep_csv(sweep));
        const std::string table = eval::sweep_table(sweep);
        write_text(dir / files::sweep_txt, table);
        res.written = {(dir / files::sweep_json).string(), (dir / files::sweep_csv).string(),
                       (dir / files::sweep_txt).string()};
        res.summary = table;
        return res;
    }
}
