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

#ifndef BEAMPRED_PHY_HPP
#define BEAMPRED_PHY_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace beampred::phy
{
    using complex = std::complex<double>;
    using cvec = std::vector<complex>;
    using Vec3 = std::array<double, 3>;

    inline constexpr double speed_of_light = 299792458.0;
    inline constexpr double default_carrier_hz = 60e9;

    // Uniform linear array. Elements lie along the axis perpendicular to the boresight
    // in the horizontal plane; angles are azimuths in the world frame (counter-clockwise from +x).
    struct ArrayGeometry
    {
        std::size_t num_elements = 16;
        double element_spacing = 0.5; // in wavelengths
        double boresight_azimuth = 0.0;

        void validate() const;
        bool operator==(const ArrayGeometry &) const = default;
    };

    // Beam m is applied as y = h^T f_m; steering_sines[m] is the sine-space direction it targets
    struct Codebook
    {
        std::size_t num_elements = 0;
        std::vector<cvec> weights;
        std::vector<double> steering_sines;

        std::size_t num_beams() const { return weights.size(); }
    };

    struct Channel
    {
        cvec coefficients;
        double path_gain = 0.0;   // |alpha|
        double aoa_azimuth = 0.0; // relative to the array boresight, radians
    };

    struct LinkConfig
    {
        double tx_power = 1.0;       // linear
        double noise_variance = 0.0; // sigma^2

        void validate() const;
        bool operator==(const LinkConfig &) const = default;
    };

    struct BeamSelection
    {
        std::size_t index = 0;
        std::vector<double> powers; // beam_gain for every codebook entry
    };

    // (1/sqrt(N)) exp(j 2 pi d n sin(theta)), n = 0..N-1
    cvec steering_vector(double theta, const ArrayGeometry &geometry);

    // Same response parameterized directly by the sine of the angle
    cvec steering_vector_from_sine(double sine, const ArrayGeometry &geometry);

    // Cell-centered DFT codebook: beam m targets s_m = -1 + (2m+1)/M, weights are conj(a(s_m))
    Codebook dft_codebook(const ArrayGeometry &geometry, std::size_t num_beams);

    // |h^T f|^2 (unconjugated transpose product)
    double beam_gain(std::span<const complex> channel, std::span<const complex> weight);
    double beam_gain(const Channel &channel, std::span<const complex> weight);

    // Exhaustive search over the codebook, ties go to the lowest index
    BeamSelection optimal_beam(const Channel &channel, const Codebook &codebook);

    // y = h^T f sqrt(P_T) + sigma n, where noise_draw is a unit-variance complex normal sample
    complex received_signal(const Channel &channel, std::span<const complex> weight,
                            const LinkConfig &link, complex noise_draw);

    // Single LOS path with free-space 1/d amplitude. The azimuth is taken in the horizontal plane,
    // the distance in 3-D. Throws GeometryError for coincident positions.
    Channel channel_from_geometry(const Vec3 &user_xyz, const Vec3 &bs_xyz, const ArrayGeometry &geometry,
                                  double ref_gain_at_1m = 1.0,
                                  double wavelength_m = speed_of_light / default_carrier_hz);

    // Wraps an angle to (-pi, pi]
    double wrap_angle(double angle);

    nlohmann::json codebook_to_json(const Codebook &codebook);
    Codebook codebook_from_json(const nlohmann::json &j);
    void save_codebook(const Codebook &codebook, const std::string &path);
    Codebook load_codebook(const std::string &path);
}

#endif
