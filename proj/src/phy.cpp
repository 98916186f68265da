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

#include "beampred/phy.hpp"
#include "beampred/error.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace beampred::phy
{
    void ArrayGeometry::validate() const
    {
        if (num_elements < 1)
            throw ConfigError("ArrayGeometry: num_elements must be >= 1");
        if (!(element_spacing > 0.0))
            throw ConfigError("ArrayGeometry: element_spacing must be > 0");
    }

    void LinkConfig::validate() const
    {
        if (!(tx_power > 0.0))
            throw ConfigError("LinkConfig: tx_power must be > 0");
        if (!(noise_variance >= 0.0))
            throw ConfigError("LinkConfig: noise_variance must be >= 0");
    }

    double wrap_angle(double angle)
    {
        constexpr double pi = std::numbers::pi;
        double a = std::remainder(angle, 2.0 * pi);
        if (a <= -pi)
            a += 2.0 * pi;
        return a;
    }

    cvec steering_vector_from_sine(double sine, const ArrayGeometry &geometry)
    {
        geometry.validate();
        const std::size_t n_el = geometry.num_elements;
        const double scale = 1.0 / std::sqrt(double(n_el));
        const double phase_step = 2.0 * std::numbers::pi * geometry.element_spacing * sine;
        cvec a(n_el);
        for (std::size_t n = 0; n < n_el; ++n)
            a[n] = std::polar(scale, phase_step * double(n));
        return a;
    }

    cvec steering_vector(double theta, const ArrayGeometry &geometry)
    {
        return steering_vector_from_sine(std::sin(theta), geometry);
    }

    Codebook dft_codebook(const ArrayGeometry &geometry, std::size_t num_beams)
    {
        geometry.validate();
        if (num_beams < 1)
            throw ConfigError("dft_codebook: num_beams must be >= 1");

        Codebook cb;
        cb.num_elements = geometry.num_elements;
        cb.weights.reserve(num_beams);
        cb.steering_sines.reserve(num_beams);
        const double m_total = double(num_beams);
        for (std::size_t m = 0; m < num_beams; ++m)
        {
            const double s = -1.0 + (2.0 * double(m) + 1.0) / m_total;
            cvec w = steering_vector_from_sine(s, geometry);
            for (auto &x : w)
                x = std::conj(x);
            cb.steering_sines.push_back(s);
            cb.weights.push_back(std::move(w));
        }
        return cb;
    }

    double beam_gain(std::span<const complex> channel, std::span<const complex> weight)
    {
        if (channel.size() != weight.size())
            throw DimensionError("beam_gain: channel has " + std::to_string(channel.size()) +
                                 " elements, weight has " + std::to_string(weight.size()));
        complex acc{0.0, 0.0};
        for (std::size_t n = 0; n < channel.size(); ++n)
            acc += channel[n] * weight[n];
        return std::norm(acc);
    }

    double beam_gain(const Channel &channel, std::span<const complex> weight)
    {
        return beam_gain(std::span<const complex>(channel.coefficients), weight);
    }

    BeamSelection optimal_beam(const Channel &channel, const Codebook &codebook)
    {
        BeamSelection sel;
        sel.powers.reserve(codebook.num_beams());
        double best = -1.0;
        for (std::size_t m = 0; m < codebook.num_beams(); ++m)
        {
            const double g = beam_gain(channel, codebook.weights[m]);
            sel.powers.push_back(g);
            if (g > best)
            {
                best = g;
                sel.index = m;
            }
        }
        return sel;
    }

    complex received_signal(const Channel &channel, std::span<const complex> weight,
                            const LinkConfig &link, complex noise_draw)
    {
        link.validate();
        if (channel.coefficients.size() != weight.size())
            throw DimensionError("received_signal: channel/weight length mismatch");
        complex hf{0.0, 0.0};
        for (std::size_t n = 0; n < weight.size(); ++n)
            hf += channel.coefficients[n] * weight[n];
        return hf * std::sqrt(link.tx_power) + std::sqrt(link.noise_variance) * noise_draw;
    }

    Channel channel_from_geometry(const Vec3 &user_xyz, const Vec3 &bs_xyz, const ArrayGeometry &geometry,
                                  double ref_gain_at_1m, double wavelength_m)
    {
        geometry.validate();
        const double dx = user_xyz[0] - bs_xyz[0];
        const double dy = user_xyz[1] - bs_xyz[1];
        const double dz = user_xyz[2] - bs_xyz[2];
        const double distance = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (!(distance > 0.0))
            throw GeometryError("channel_from_geometry: user and base station positions coincide");
        if (!(wavelength_m > 0.0))
            throw ConfigError("channel_from_geometry: wavelength must be > 0");

        Channel ch;
        // A user directly above/below the array has no defined azimuth; treat it as broadside
        const double azimuth = (dx == 0.0 && dy == 0.0) ? geometry.boresight_azimuth : std::atan2(dy, dx);
        ch.aoa_azimuth = wrap_angle(azimuth - geometry.boresight_azimuth);
        ch.path_gain = ref_gain_at_1m / distance;

        const double phase = std::fmod(-2.0 * std::numbers::pi * distance / wavelength_m, 2.0 * std::numbers::pi);
        const complex rot = std::polar(ch.path_gain * std::sqrt(double(geometry.num_elements)), phase);
        ch.coefficients = steering_vector(ch.aoa_azimuth, geometry);
        for (auto &c : ch.coefficients)
            c *= rot;
        return ch;
    }

    nlohmann::json codebook_to_json(const Codebook &codebook)
    {
        nlohmann::json weights = nlohmann::json::array();
        for (const auto &w : codebook.weights)
        {
            nlohmann::json row = nlohmann::json::array();
            for (const auto &x : w)
                row.push_back({x.real(), x.imag()});
            weights.push_back(std::move(row));
        }
        return {{"num_elements", codebook.num_elements},
                {"num_beams", codebook.num_beams()},
                {"weights", std::move(weights)},
                {"steering_sines", codebook.steering_sines}};
    }

    Codebook codebook_from_json(const nlohmann::json &j)
    {
        Codebook cb;
        try
        {
            cb.num_elements = j.at("num_elements").get<std::size_t>();
            const auto num_beams = j.at("num_beams").get<std::size_t>();
            cb.steering_sines = j.at("steering_sines").get<std::vector<double>>();
            for (const auto &row : j.at("weights"))
            {
                cvec w;
                w.reserve(row.size());
                for (const auto &pair : row)
                {
                    if (!pair.is_array() || pair.size() != 2)
                        throw ParseError("codebook: weights must be [re, im] pairs");
                    w.emplace_back(pair[0].get<double>(), pair[1].get<double>());
                }
                if (w.size() != cb.num_elements)
                    throw DimensionError("codebook: weight vector length differs from num_elements");
                cb.weights.push_back(std::move(w));
            }
            if (cb.weights.size() != num_beams || cb.steering_sines.size() != num_beams)
                throw DimensionError("codebook: num_beams does not match weights/steering_sines");
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError(std::string("codebook: ") + e.what());
        }
        return cb;
    }

    void save_codebook(const Codebook &codebook, const std::string &path)
    {
        std::ofstream out(path);
        if (!out)
            throw IoError("cannot open '" + path + "' for writing");
        out << codebook_to_json(codebook).dump(1) << '\n';
    }

    Codebook load_codebook(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open '" + path + "'");
        nlohmann::json j;
        try
        {
            in >> j;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError(path + ": " + e.what());
        }
        return codebook_from_json(j);
    }
}
