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

#ifndef BEAMPRED_DATA_HPP
#define BEAMPRED_DATA_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace beampred::data
{
    inline constexpr std::size_t raw_beams = 64;
    inline constexpr std::size_t downsampled_beams = 32;

    struct Position
    {
        double latitude = 0.0;  // degrees
        double longitude = 0.0; // degrees

        bool operator==(const Position &) const = default;
    };

    // One labeled observation. `power` holds one received power per beam of the codebook
    // the sample is labeled against (64 raw, 32 after relabel); label = argmax(power).
    struct Sample
    {
        std::vector<double> features;
        Position position;
        std::vector<double> power;
        std::size_t label = 0;
        std::array<double, 2> true_xy{0.0, 0.0}; // meters, scene frame

        bool operator==(const Sample &) const = default;
    };

    // Min-max statistics of the training split, per input dimension
    struct NormStats
    {
        double lat_min = 0.0, lat_max = 0.0;
        double lon_min = 0.0, lon_max = 0.0;
        std::vector<double> feature_min;
        std::vector<double> feature_max;

        bool operator==(const NormStats &) const = default;
    };

    struct Dataset
    {
        std::vector<Sample> samples;
        std::optional<NormStats> normalization; // set when the sample values are normalized
        std::size_t codebook_size = 0;

        std::size_t size() const { return samples.size(); }
        bool empty() const { return samples.empty(); }
        std::size_t feature_dim() const { return samples.empty() ? 0 : samples.front().features.size(); }
        std::vector<std::size_t> labels() const;

        // Throws DimensionError on mixed feature/power sizes or labels outside the codebook
        void validate() const;

        bool operator==(const Dataset &) const = default;
    };

    // Lowest index on ties
    std::size_t argmax(std::span<const double> values);

    // Keeps the even-indexed entries 0, 2, ..., 62 of a 64-beam power vector
    std::vector<double> downsample_power(std::span<const double> power64);

    // Replaces every 64-beam power vector with its downsampled form and relabels by argmax
    Dataset relabel(const Dataset &raw);

    // Seeded random permutation; the first floor(n * train_fraction) go to train
    std::pair<Dataset, Dataset> split(const Dataset &dataset, double train_fraction, std::uint64_t seed);

    // Seeded subset of floor(n * fraction) samples, kept in their original relative order.
    // fraction == 1 returns the dataset unchanged.
    Dataset subsample(const Dataset &dataset, double fraction, std::uint64_t seed);

    NormStats fit_normalization(const Dataset &train);

    // (x - min) / (max - min); a degenerate dimension maps to 0.5. No clamping.
    double normalize_value(double x, double lo, double hi);
    std::array<double, 2> normalize_position(const Position &p, const NormStats &stats);
    std::vector<double> normalize_features(std::span<const double> features, const NormStats &stats);

    // Normalizes features and position of every sample, records the stats in the result
    Dataset apply_normalization(const Dataset &dataset, const NormStats &stats);

    // Serialization. JSON-lines keys: features, lat, lon, power, label, true_xy
    nlohmann::json sample_to_json(const Sample &s);
    Sample sample_from_json(const nlohmann::json &j);
    void save_jsonl(const Dataset &dataset, const std::string &path);
    Dataset load_jsonl(const std::string &path);
    void save_csv(const Dataset &dataset, const std::string &path);

    nlohmann::json norm_stats_to_json(const NormStats &stats);
    NormStats norm_stats_from_json(const nlohmann::json &j);
    void save_norm_stats(const NormStats &stats, const std::string &path);
    NormStats load_norm_stats(const std::string &path);

    // Order-sensitive FNV-1a digest of the samples' serialized form
    std::string dataset_digest(const Dataset &dataset);

    std::vector<std::size_t> label_histogram(const Dataset &dataset);
}

#endif
