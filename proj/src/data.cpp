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

#include "beampred/data.hpp"
#include "beampred/error.hpp"
#include "beampred/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace beampred::data
{
    std::vector<std::size_t> Dataset::labels() const
    {
        std::vector<std::size_t> out;
        out.reserve(samples.size());
        for (const auto &s : samples)
            out.push_back(s.label);
        return out;
    }

    void Dataset::validate() const
    {
        if (samples.empty())
            return;
        const std::size_t fdim = samples.front().features.size();
        const std::size_t pdim = samples.front().power.size();
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            const auto &s = samples[i];
            if (s.features.size() != fdim)
                throw DimensionError("sample " + std::to_string(i) + ": feature length " +
                                     std::to_string(s.features.size()) + " differs from " + std::to_string(fdim));
            if (s.power.size() != pdim)
                throw DimensionError("sample " + std::to_string(i) + ": power length " +
                                     std::to_string(s.power.size()) + " differs from " + std::to_string(pdim));
            if (codebook_size != 0 && s.label >= codebook_size)
                throw DimensionError("sample " + std::to_string(i) + ": label " + std::to_string(s.label) +
                                     " outside codebook of size " + std::to_string(codebook_size));
        }
    }

    std::size_t argmax(std::span<const double> values)
    {
        std::size_t best = 0;
        for (std::size_t i = 1; i < values.size(); ++i)
            if (values[i] > values[best])
                best = i;
        return best;
    }

    std::vector<double> downsample_power(std::span<const double> power64)
    {
        if (power64.size() != raw_beams)
            throw DimensionError("downsample_power: expected " + std::to_string(raw_beams) +
                                 " beam powers, got " + std::to_string(power64.size()));
        std::vector<double> out;
        out.reserve(downsampled_beams);
        for (std::size_t i = 0; i < raw_beams; i += 2)
            out.push_back(power64[i]);
        return out;
    }

    Dataset relabel(const Dataset &raw)
    {
        Dataset out;
        out.normalization = raw.normalization;
        out.codebook_size = downsampled_beams;
        out.samples.reserve(raw.size());
        for (const auto &s : raw.samples)
        {
            Sample t = s;
            t.power = downsample_power(s.power);
            t.label = argmax(t.power);
            out.samples.push_back(std::move(t));
        }
        return out;
    }

    std::pair<Dataset, Dataset> split(const Dataset &dataset, double train_fraction, std::uint64_t seed)
    {
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw ConfigError("split: train_fraction must lie in (0, 1)");
        const std::size_t n = dataset.size();
        const auto n_train = static_cast<std::size_t>(std::floor(double(n) * train_fraction));
        if (n_train == 0 || n_train == n)
            throw ConfigError("split: fraction " + std::to_string(train_fraction) + " of " + std::to_string(n) +
                              " samples leaves an empty split");

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(seed, stream::split));
        std::shuffle(order.begin(), order.end(), rng);

        Dataset train, val;
        train.codebook_size = val.codebook_size = dataset.codebook_size;
        train.normalization = val.normalization = dataset.normalization;
        train.samples.reserve(n_train);
        val.samples.reserve(n - n_train);
        for (std::size_t i = 0; i < n; ++i)
            (i < n_train ? train : val).samples.push_back(dataset.samples[order[i]]);
        return {std::move(train), std::move(val)};
    }

    Dataset subsample(const Dataset &dataset, double fraction, std::uint64_t seed)
    {
        if (!(fraction > 0.0 && fraction <= 1.0))
            throw ConfigError("subsample: fraction must lie in (0, 1]");
        const std::size_t n = dataset.size();
        const auto k = static_cast<std::size_t>(std::floor(double(n) * fraction));
        if (k == 0)
            throw ConfigError("subsample: fraction " + std::to_string(fraction) + " of " + std::to_string(n) +
                              " samples is empty");
        if (k == n)
            return dataset;

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(seed, stream::subsample));
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(k);
        std::sort(order.begin(), order.end());

        Dataset out;
        out.codebook_size = dataset.codebook_size;
        out.normalization = dataset.normalization;
        out.samples.reserve(k);
        for (auto i : order)
            out.samples.push_back(dataset.samples[i]);
        return out;
    }

    NormStats fit_normalization(const Dataset &train)
    {
        if (train.empty())
            throw ConfigError("fit_normalization: training set is empty");
        train.validate();
        NormStats st;
        const auto &first = train.samples.front();
        st.lat_min = st.lat_max = first.position.latitude;
        st.lon_min = st.lon_max = first.position.longitude;
        st.feature_min = st.feature_max = first.features;
        for (const auto &s : train.samples)
        {
            st.lat_min = std::min(st.lat_min, s.position.latitude);
            st.lat_max = std::max(st.lat_max, s.position.latitude);
            st.lon_min = std::min(st.lon_min, s.position.longitude);
            st.lon_max = std::max(st.lon_max, s.position.longitude);
            for (std::size_t d = 0; d < s.features.size(); ++d)
            {
                st.feature_min[d] = std::min(st.feature_min[d], s.features[d]);
                st.feature_max[d] = std::max(st.feature_max[d], s.features[d]);
            }
        }
        return st;
    }

    double normalize_value(double x, double lo, double hi)
    {
        if (hi == lo)
            return 0.5;
        return (x - lo) / (hi - lo);
    }

    std::array<double, 2> normalize_position(const Position &p, const NormStats &stats)
    {
        return {normalize_value(p.latitude, stats.lat_min, stats.lat_max),
                normalize_value(p.longitude, stats.lon_min, stats.lon_max)};
    }

    std::vector<double> normalize_features(std::span<const double> features, const NormStats &stats)
    {
        if (features.size() != stats.feature_min.size())
            throw DimensionError("normalize_features: " + std::to_string(features.size()) +
                                 " features, stats cover " + std::to_string(stats.feature_min.size()));
        std::vector<double> out(features.size());
        for (std::size_t d = 0; d < features.size(); ++d)
            out[d] = normalize_value(features[d], stats.feature_min[d], stats.feature_max[d]);
        return out;
    }

    Dataset apply_normalization(const Dataset &dataset, const NormStats &stats)
    {
        Dataset out = dataset;
        out.normalization = stats;
        for (auto &s : out.samples)
        {
            s.features = normalize_features(s.features, stats);
            const auto p = normalize_position(s.position, stats);
            s.position = {p[0], p[1]};
        }
        return out;
    }

    // ---------------------------------------------------------------- serialization

    nlohmann::json sample_to_json(const Sample &s)
    {
        return {{"features", s.features},
                {"lat", s.position.latitude},
                {"lon", s.position.longitude},
                {"power", s.power},
                {"label", s.label},
                {"true_xy", s.true_xy}};
    }

    namespace
    {
        const nlohmann::json &field(const nlohmann::json &j, const char *key)
        {
            const auto it = j.find(key);
            if (it == j.end())
                throw ParseError(std::string("missing \"") + key + "\"");
            return *it;
        }

        double number(const nlohmann::json &j, const char *key)
        {
            const auto &v = field(j, key);
            if (!v.is_number())
                throw ParseError(std::string("\"") + key + "\" is not a number");
            return v.get<double>();
        }

        std::vector<double> numbers(const nlohmann::json &j, const char *key)
        {
            const auto &v = field(j, key);
            if (!v.is_array())
                throw ParseError(std::string("\"") + key + "\" is not an array");
            std::vector<double> out;
            out.reserve(v.size());
            for (const auto &x : v)
            {
                if (!x.is_number())
                    throw ParseError(std::string("\"") + key + "\" holds a non-numeric entry");
                out.push_back(x.get<double>());
            }
            return out;
        }

        std::string csv_number(double x)
        {
            return nlohmann::json(x).dump();
        }
    }

    Sample sample_from_json(const nlohmann::json &j)
    {
        if (!j.is_object())
            throw ParseError("record is not a JSON object");
        Sample s;
        s.features = numbers(j, "features");
        s.position.latitude = number(j, "lat");
        s.position.longitude = number(j, "lon");
        s.power = numbers(j, "power");
        const auto &label = field(j, "label");
        if (!label.is_number_integer() || label.get<long long>() < 0)
            throw ParseError("\"label\" is not a non-negative integer");
        s.label = label.get<std::size_t>();
        const auto xy = numbers(j, "true_xy");
        if (xy.size() != 2)
            throw ParseError("\"true_xy\" must hold 2 values");
        s.true_xy = {xy[0], xy[1]};
        for (double p : s.power)
            if (p < 0.0)
                throw ParseError("negative beam power");
        return s;
    }

    void save_jsonl(const Dataset &dataset, const std::string &path)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + path + "' for writing");
        for (const auto &s : dataset.samples)
            out << sample_to_json(s).dump() << '\n';
        if (!out)
            throw IoError("write to '" + path + "' failed");
    }

    Dataset load_jsonl(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot open '" + path + "'");
        Dataset ds;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            try
            {
                ds.samples.push_back(sample_from_json(nlohmann::json::parse(line)));
            }
            catch (const nlohmann::json::exception &e)
            {
                throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
            }
            catch (const ParseError &e)
            {
                throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
            }
            const auto &s = ds.samples.back();
            const auto &first = ds.samples.front();
            if (s.features.size() != first.features.size() || s.power.size() != first.power.size())
                throw DimensionError(path + ":" + std::to_string(line_no) +
                                     ": record dimensions differ from the first record");
            if (s.label >= s.power.size())
                throw DimensionError(path + ":" + std::to_string(line_no) + ": label " + std::to_string(s.label) +
                                     " outside " + std::to_string(s.power.size()) + " beams");
        }
        if (!ds.empty())
            ds.codebook_size = ds.samples.front().power.size();
        return ds;
    }

    void save_csv(const Dataset &dataset, const std::string &path)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + path + "' for writing");
        const std::size_t fdim = dataset.feature_dim();
        const std::size_t pdim = dataset.empty() ? 0 : dataset.samples.front().power.size();
        for (std::size_t d = 0; d < fdim; ++d)
            out << "feature_" << d << ',';
        out << "lat,lon";
        for (std::size_t m = 0; m < pdim; ++m)
            out << ",power_" << m;
        out << ",label,true_x,true_y\n";
        for (const auto &s : dataset.samples)
        {
            for (double f : s.features)
                out << csv_number(f) << ',';
            out << csv_number(s.position.latitude) << ',' << csv_number(s.position.longitude);
            for (double p : s.power)
                out << ',' << csv_number(p);
            out << ',' << s.label << ',' << csv_number(s.true_xy[0]) << ',' << csv_number(s.true_xy[1]) << '\n';
        }
        if (!out)
            throw IoError("write to '" + path + "' failed");
    }

    nlohmann::json norm_stats_to_json(const NormStats &st)
    {
        return {{"lat_min", st.lat_min},
                {"lat_max", st.lat_max},
                {"lon_min", st.lon_min},
                {"lon_max", st.lon_max},
                {"feature_min", st.feature_min},
                {"feature_max", st.feature_max}};
    }

    NormStats norm_stats_from_json(const nlohmann::json &j)
    {
        NormStats st;
        st.lat_min = number(j, "lat_min");
        st.lat_max = number(j, "lat_max");
        st.lon_min = number(j, "lon_min");
        st.lon_max = number(j, "lon_max");
        st.feature_min = numbers(j, "feature_min");
        st.feature_max = numbers(j, "feature_max");
        if (st.feature_min.size() != st.feature_max.size())
            throw DimensionError("norm stats: feature_min/feature_max length mismatch");
        if (st.lat_max < st.lat_min || st.lon_max < st.lon_min)
            throw ParseError("norm stats: max < min");
        for (std::size_t d = 0; d < st.feature_min.size(); ++d)
            if (st.feature_max[d] < st.feature_min[d])
                throw ParseError("norm stats: max < min");
        return st;
    }

    void save_norm_stats(const NormStats &stats, const std::string &path)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + path + "' for writing");
        out << norm_stats_to_json(stats).dump(2) << '\n';
    }

    NormStats load_norm_stats(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open '" + path + "'");
        try
        {
            nlohmann::json j;
            in >> j;
            return norm_stats_from_json(j);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError(path + ": " + e.what());
        }
    }

    std::string dataset_digest(const Dataset &dataset)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const auto &s : dataset.samples)
        {
            const std::string line = sample_to_json(s).dump();
            for (unsigned char c : line)
            {
                h ^= c;
                h *= 0x100000001b3ULL;
            }
            h ^= '\n';
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    std::vector<std::size_t> label_histogram(const Dataset &dataset)
    {
        std::size_t m = dataset.codebook_size;
        for (const auto &s : dataset.samples)
            m = std::max(m, s.label + 1);
        std::vector<std::size_t> hist(m, 0);
        for (const auto &s : dataset.samples)
            ++hist[s.label];
        return hist;
    }
}
