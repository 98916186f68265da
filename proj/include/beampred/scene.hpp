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

#ifndef BEAMPRED_SCENE_HPP
#define BEAMPRED_SCENE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "beampred/data.hpp"
#include "beampred/phy.hpp"
#include "beampred/rng.hpp"

namespace beampred::scene
{
    using Vec2 = std::array<double, 2>;
    using Vec3 = phy::Vec3;

    inline constexpr double earth_radius_m = 6378137.0;

    struct CameraConfig
    {
        int width_px = 1280;
        int height_px = 720;
        int channels = 3;
        double horizontal_fov = 2.0 * std::numbers::pi / 3.0; // 120 deg
        double mount_height = 4.0;                           // meters above ground

        void validate() const;
        bool operator==(const CameraConfig &) const = default;
    };

    struct GeoAnchor
    {
        double latitude = 33.4200;
        double longitude = -111.9300;

        bool operator==(const GeoAnchor &) const = default;
    };

    // World frame: x east, y north, z up, meters. The camera sits above the base station and
    // looks along the array boresight, so both share one field of view.
    struct SceneConfig
    {
        Vec3 bs_position{0.0, 0.0, 4.0};
        double bs_boresight_azimuth = std::numbers::pi / 2.0; // facing north
        Vec2 road_start{-20.0, 15.0};
        Vec2 road_end{20.0, 15.0};
        double lateral_jitter = 0.5; // half-width of the uniform lateral offset, meters
        double user_height = 1.5;    // transmitter antenna height, meters
        double vehicle_length = 4.5; // bbox width source, meters
        double vehicle_height = 1.8; // bbox height source, meters
        CameraConfig camera;
        double gps_noise_std = 2.0;         // meters, isotropic horizontal
        double detection_noise_std = 0.01;  // normalized image units, applied to the bbox center
        GeoAnchor geo_anchor;
        std::uint64_t rng_seed = 1;

        void validate() const;
        bool operator==(const SceneConfig &) const = default;
    };

    struct PhyConfig
    {
        phy::ArrayGeometry array;
        std::size_t num_beams = data::raw_beams;
        double ref_gain_at_1m = 1.0;
        double carrier_hz = phy::default_carrier_hz;
        phy::LinkConfig link;

        void validate() const;
        bool operator==(const PhyConfig &) const = default;
    };

    // Flattened order: center_x, center_y, width, height, detected
    struct VisualFeatures
    {
        double bbox_center_x = 0.0;
        double bbox_center_y = 0.0;
        double bbox_width = 0.0;
        double bbox_height = 0.0;
        bool detected = false;

        static constexpr std::size_t dim = 5;
        std::vector<double> flatten() const;
    };

    // Array geometry whose boresight matches the scene's base station
    phy::ArrayGeometry aligned_geometry(const SceneConfig &scene, const PhyConfig &phy_config);

    Vec2 sample_road_point(const SceneConfig &config, Rng &rng);
    std::vector<Vec2> sample_trajectory(const SceneConfig &config, std::size_t num_points, Rng &rng);

    // Pinhole projection. Image x grows with azimuth (counter-clockwise), y grows downward.
    VisualFeatures project_to_camera(const Vec3 &user_xyz, const SceneConfig &config);

    // Inverse of the horizontal pinhole map: world azimuth of a detection at bbox_center_x
    double azimuth_from_bbox_center_x(double bbox_center_x, const SceneConfig &config);

    // Local equirectangular conversion around the anchor
    data::Position meters_to_geo(const Vec2 &xy, const GeoAnchor &anchor);
    Vec2 geo_to_meters(const data::Position &p, const GeoAnchor &anchor);

    data::Position gps_observe(const Vec2 &true_xy, const SceneConfig &config, Rng &rng);

    // Samples [first, first + count) of the scene's sample sequence. Sample i depends only on
    // (rng_seed, i), so any partition of the index range yields the same samples.
    std::vector<data::Sample> generate_samples(const SceneConfig &scene, const PhyConfig &phy_config,
                                               std::size_t first, std::size_t count);

    // Raw dataset with one power per codebook beam and the argmax label
    data::Dataset generate_dataset(const SceneConfig &scene, const PhyConfig &phy_config, std::size_t num_samples);
}

#endif
