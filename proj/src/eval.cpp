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

#include "beampred/eval.hpp"
#include "beampred/error.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace beampred::eval
{
    double top_k_accuracy(std::span<const models::Prediction> predictions, std::span<const std::size_t> labels,
                          std::size_t k)
    {
        if (predictions.empty())
            throw ConfigError("top_k_accuracy: empty evaluation set");
        if (predictions.size() != labels.size())
            throw DimensionError("top_k_accuracy: " + std::to_string(predictions.size()) + " predictions, " +
                                 std::to_string(labels.size()) + " labels");
        const std::size_t m = predictions.front().probabilities.size();
        if (k < 1 || k > m)
            throw ConfigError("top_k_accuracy: k = " + std::to_string(k) + " outside [1, " + std::to_string(m) + "]");

        std::size_t hits = 0;
        for (std::size_t i = 0; i < predictions.size(); ++i)
        {
            const auto &p = predictions[i].probabilities;
            if (p.size() != m)
                throw DimensionError("top_k_accuracy: predictions disagree on the beam count");
            const std::size_t y = labels[i];
            if (y >= m)
                throw DimensionError("top_k_accuracy: label " + std::to_string(y) + " outside " + std::to_string(m) +
                                     " beams");
            // rank of the label under (descending probability, ascending index)
            std::size_t ahead = 0;
            for (std::size_t j = 0; j < m && ahead < k; ++j)
                if (p[j] > p[y] || (p[j] == p[y] && j < y))
                    ++ahead;
            hits += ahead < k;
        }
        return double(hits) / double(predictions.size());
    }

    ModelAccuracy evaluate_predictions(const std::string &model, std::span<const models::Prediction> predictions,
                                       std::span<const std::size_t> labels)
    {
        ModelAccuracy row;
        row.model = model;
        const std::size_t m = predictions.empty() ? 0 : predictions.front().probabilities.size();
        for (std::size_t i = 0; i < report_ks.size(); ++i)
            row.top[i] = report_ks[i] <= m ? top_k_accuracy(predictions, labels, report_ks[i]) : 1.0;
        return row;
    }

    EvalReport evaluate_models(const models::VisionModel &vision, const models::PositionModel &position,
                               const models::FusionModel &fusion, const data::Dataset &val,
                               const std::string &scenario)
    {
        if (val.empty())
            throw ConfigError("evaluate_models: empty validation set");
        if (!vision.norm || !position.norm || !fusion.norm || !fusion.extractor.norm)
            throw PrerequisiteError("evaluate_models: every model needs normalization stats");
        if (*vision.norm != *position.norm || *vision.norm != *fusion.norm || *vision.norm != *fusion.extractor.norm)
            throw ConfigError("evaluate_models: inconsistent normalization stats across models");

        const auto labels = val.labels();
        EvalReport r;
        r.scenario = scenario;
        r.sample_count = val.size();
        r.val_digest = data::dataset_digest(val);
        r.rows.push_back(evaluate_predictions("vision", models::predict_all(vision, val), labels));
        r.rows.push_back(evaluate_predictions("position", models::predict_all(position, val), labels));
        r.rows.push_back(evaluate_predictions("fusion", models::predict_all(fusion, val), labels));
        return r;
    }

    namespace
    {
        std::string num(double x)
        {
            return nlohmann::json(x).dump();
        }

        std::string fixed4(double x)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", x);
            return buf;
        }

        nlohmann::json reference_json()
        {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto &r : reference_accuracies)
                rows.push_back({{"model", r.model}, {"day", r.day}, {"night", r.night}});
            return {{"note", "accuracies measured on real camera/GPS data, for orientation only"}, {"rows", rows}};
        }
    }

    nlohmann::json report_to_json(const EvalReport &report)
    {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &r : report.rows)
            rows.push_back({{"model", r.model}, {"top1", r.top[0]}, {"top2", r.top[1]}, {"top3", r.top[2]}});
        return {{"scenario", report.scenario},
                {"sample_count", report.sample_count},
                {"val_digest", report.val_digest},
                {"rows", rows},
                {"reference", reference_json()}};
    }

    std::string report_csv(const EvalReport &report, std::uint64_t seed, double fraction,
                           std::span<const std::size_t> ks)
    {
        std::ostringstream os;
        os << "model,scenario,k,accuracy,n,seed,fraction\n";
        for (const auto &r : report.rows)
            for (auto k : ks)
            {
                if (k < 1 || k > r.top.size())
                    throw ConfigError("report_csv: k = " + std::to_string(k) + " is not a reported column");
                os << r.model << ',' << report.scenario << ',' << k << ',' << num(r.top[k - 1]) << ','
                   << report.sample_count << ',' << seed << ',' << num(fraction) << '\n';
            }
        return os.str();
    }

    std::string report_table(const EvalReport &report)
    {
        std::ostringstream os;
        os << "Beam prediction accuracy: scenario " << report.scenario << ", " << report.sample_count
           << " validation samples\n\n";
        os << "  Model       Top-1   Top-2   Top-3\n";
        os << "  ---------   -----   -----   -----\n";
        for (const auto &r : report.rows)
        {
            char buf[96];
            std::snprintf(buf, sizeof buf, "  %-10s  %s  %s  %s\n", r.model.c_str(), fixed4(r.top[0]).c_str(),
                          fixed4(r.top[1]).c_str(), fixed4(r.top[2]).c_str());
            os << buf;
        }
        os << "\nReference (real-data measurements, not comparable in absolute terms)\n\n";
        os << "  Model       Day Top-1/2/3          Night Top-1/2/3\n";
        for (const auto &r : reference_accuracies)
        {
            char buf[128];
            std::snprintf(buf, sizeof buf, "  %-10s  %.4f %.4f %.4f   %.4f %.4f %.4f\n", r.model, r.day[0], r.day[1],
                          r.day[2], r.night[0], r.night[1], r.night[2]);
            os << buf;
        }
        return os.str();
    }

    // ---------------------------------------------------------------- fraction sweep

    const SweepSummary &FractionSweep::at(double fraction) const
    {
        for (const auto &s : summary)
            if (s.fraction == fraction)
                return s;
        throw ConfigError("sweep has no fraction " + std::to_string(fraction));
    }

    FractionSweep fraction_sweep(const data::Dataset &train, const data::Dataset &val,
                                 const std::vector<double> &fractions, const std::vector<std::uint64_t> &seeds,
                                 const SweepTraining &training, const std::string &scenario)
    {
        if (fractions.empty())
            throw ConfigError("fraction_sweep: no fractions");
        if (seeds.empty())
            throw ConfigError("fraction_sweep: at least one seed is required");
        for (std::size_t i = 0; i < fractions.size(); ++i)
        {
            if (!(fractions[i] > 0.0 && fractions[i] <= 1.0))
                throw ConfigError("fraction_sweep: fraction " + std::to_string(fractions[i]) + " outside (0, 1]");
            if (i > 0 && !(fractions[i] > fractions[i - 1]))
                throw ConfigError("fraction_sweep: fractions must be strictly increasing");
        }
        if (val.empty())
            throw ConfigError("fraction_sweep: empty validation set");

        FractionSweep sweep;
        sweep.scenario = scenario;
        sweep.fractions = fractions;
        sweep.seeds = seeds;
        sweep.val_size = val.size();
        sweep.val_digest = data::dataset_digest(val);
        const auto labels = val.labels();

        for (double f : fractions)
        {
            SweepSummary sum;
            sum.fraction = f;
            std::vector<std::array<double, 3>> tops;
            for (auto seed : seeds)
            {
                const data::Dataset sub = data::subsample(train, f, seed);
                const data::NormStats stats = data::fit_normalization(sub);

                models::VisionConfig vc = training.vision;
                vc.training.rng_seed = models::training_seed(seed, models::ModelKind::vision);
                models::FusionConfig fc = training.fusion;
                fc.training.rng_seed = models::training_seed(seed, models::ModelKind::fusion);

                const auto vision = models::train_vision(sub, nullptr, stats, vc);
                const auto fusion = models::train_fusion(sub, nullptr, vision.model, stats, fc);
                const auto row = evaluate_predictions("fusion", models::predict_all(fusion.model, val), labels);

                sweep.cells.push_back({f, seed, sub.size(), row.top});
                tops.push_back(row.top);
            }
            for (std::size_t k = 0; k < 3; ++k)
            {
                double mean = 0.0;
                for (const auto &t : tops)
                    mean += t[k];
                mean /= double(tops.size());
                double var = 0.0;
                for (const auto &t : tops)
                    var += (t[k] - mean) * (t[k] - mean);
                sum.mean[k] = mean;
                sum.stddev[k] = tops.size() > 1 ? std::sqrt(var / double(tops.size() - 1)) : 0.0;
            }
            sweep.summary.push_back(sum);
        }
        return sweep;
    }

    nlohmann::json sweep_to_json(const FractionSweep &sweep)
    {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto &c : sweep.cells)
            cells.push_back({{"fraction", c.fraction},
                             {"seed", c.seed},
                             {"n_train", c.train_size},
                             {"top1", c.top[0]},
                             {"top2", c.top[1]},
                             {"top3", c.top[2]}});
        nlohmann::json summary = nlohmann::json::array();
        for (const auto &s : sweep.summary)
            summary.push_back({{"fraction", s.fraction}, {"mean", s.mean}, {"std", s.stddev}});
        return {{"scenario", sweep.scenario},
                {"fractions", sweep.fractions},
                {"seeds", sweep.seeds},
                {"val_size", sweep.val_size},
                {"val_digest", sweep.val_digest},
                {"cells", cells},
                {"summary", summary}};
    }

    std::string sweep_csv(const FractionSweep &sweep)
    {
        std::ostringstream os;
        os << "fraction,seed,n_train,n_val,top1,top2,top3\n";
        for (const auto &c : sweep.cells)
            os << num(c.fraction) << ',' << c.seed << ',' << c.train_size << ',' << sweep.val_size << ','
               << num(c.top[0]) << ',' << num(c.top[1]) << ',' << num(c.top[2]) << '\n';
        return os.str();
    }

    std::string sweep_table(const FractionSweep &sweep)
    {
        std::ostringstream os;
        os << "Fusion accuracy vs. training fraction: scenario " << sweep.scenario << ", " << sweep.seeds.size()
           << " seed(s), " << sweep.val_size << " validation samples\n\n";
        os << "  Fraction   Top-1 (mean +- std)   Top-2 (mean +- std)   Top-3 (mean +- std)\n";
        for (const auto &s : sweep.summary)
        {
            char buf[160];
            std::snprintf(buf, sizeof buf, "  %8.3f   %.4f +- %.4f      %.4f +- %.4f      %.4f +- %.4f\n", s.fraction,
                          s.mean[0], s.stddev[0], s.mean[1], s.stddev[1], s.mean[2], s.stddev[2]);
            os << buf;
        }
        return os.str();
    }
}
