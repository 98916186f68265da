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

#include "beampred/scene.hpp"
#include "beampred/error.hpp"

#include <algorithm>
#include <cmath>

namespace beampred::scene
{
    void CameraConfig::validate() const
    {
        if (width_px < 1 || height_px < 1)
            throw ConfigError("camera: width_px and height_px must be >= 1");
        if (channels < 1)
            throw ConfigError("camera: channels must be >= 1");
        if (!(horizontal_fov > 0.0 && horizontal_fov < std::numbers::pi))
            throw ConfigError("camera: horizontal_fov must lie in (0, pi)");
    }

    void SceneConfig::validate() const
    {
        camera.validate();
        if (road_start == road_end)
            throw ConfigError("scene: road segment endpoints coincide");
        if (!(gps_noise_std >= 0.0))
            throw ConfigError("scene: gps_noise_std must be >= 0");
        if (!(detection_noise_std >= 0.0))
            throw ConfigError("scene: detection_noise_std must be >= 0");
        if (!(lateral_jitter >= 0.0))
            throw ConfigError("scene: lateral_jitter must be >= 0");
        if (!(vehicle_length > 0.0 && vehicle_height > 0.0))
            throw ConfigError("scene: vehicle dimensions must be > 0");
        if (std::abs(geo_anchor.latitude) >= 90.0 || std::abs(geo_anchor.longitude) > 180.0)
            throw ConfigError("scene: geo anchor outside valid latitude/longitude range");
    }

    void PhyConfig::validate() const
    {
        array.validate();
        link.validate();
        if (num_beams < 1)
            throw ConfigError("phy: num_beams must be >= 1");
        if (!(carrier_hz > 0.0))
            throw ConfigError("phy: carrier_hz must be > 0");
        if (!(ref_gain_at_1m > 0.0))
            throw ConfigError("phy: ref_gain_at_1m must be > 0");
    }

    std::vector<double> VisualFeatures::flatten() const
    {
        return {bbox_center_x, bbox_center_y, bbox_width, bbox_height, detected ? 1.0 : 0.0};
    }

    phy::ArrayGeometry aligned_geometry(const SceneConfig &scene, const PhyConfig &phy_config)
    {
        phy::ArrayGeometry g = phy_config.array;
        g.boresight_azimuth = scene.bs_boresight_azimuth;
        return g;
    }

    Vec2 sample_road_point(const SceneConfig &config, Rng &rng)
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double t = unit(rng);
        const double u = (2.0 * unit(rng) - 1.0) * config.lateral_jitter;
        const double dx = config.road_end[0] - config.road_start[0];
        const double dy = config.road_end[1] - config.road_start[1];
        const double len = std::hypot(dx, dy);
        // unit normal to the road
        const double nx = -dy / len, ny = dx / len;
        return {config.road_start[0] + t * dx + u * nx, config.road_start[1] + t * dy + u * ny};
    }

    std::vector<Vec2> sample_trajectory(const SceneConfig &config, std::size_t num_points, Rng &rng)
    {
        config.validate();
        if (num_points < 1)
            throw ConfigError("sample_trajectory: num_points must be >= 1");
        std::vector<Vec2> pts;
        pts.reserve(num_points);
        for (std::size_t i = 0; i < num_points; ++i)
            pts.push_back(sample_road_point(config, rng));
        return pts;
    }

    VisualFeatures project_to_camera(const Vec3 &user_xyz, const SceneConfig &config)
    {
        const double dx = user_xyz[0] - config.bs_position[0];
        const double dy = user_xyz[1] - config.bs_position[1];
        const double c = std::cos(config.bs_boresight_azimuth);
        const double s = std::sin(config.bs_boresight_azimuth);
        const double depth = dx * c + dy * s;
        const double lateral = -dx * s + dy * c; // positive to the left of the boresight

        VisualFeatures vf;
        const double half_fov = 0.5 * config.camera.horizontal_fov;
        if (!(depth > 0.0) || std::abs(std::atan2(lateral, depth)) >= half_fov)
            return vf;

        const double tan_half = std::tan(half_fov);
        const double focal_px = 0.5 * double(config.camera.width_px) / tan_half;
        const double h = double(config.camera.height_px);
        const double center_z = 0.5 * config.vehicle_height;
        const double dz = center_z - config.camera.mount_height;

        vf.detected = true;
        vf.bbox_center_x = std::clamp(0.5 + lateral / depth / (2.0 * tan_half), 0.0, 1.0);
        vf.bbox_center_y = std::clamp(0.5 - focal_px * dz / depth / h, 0.0, 1.0);
        vf.bbox_width = std::clamp(config.vehicle_length / depth / (2.0 * tan_half), 0.0, 1.0);
        vf.bbox_height = std::clamp(focal_px * config.vehicle_height / depth / h, 0.0, 1.0);
        return vf;
    }

    double azimuth_from_bbox_center_x(double bbox_center_x, const SceneConfig &config)
    {
        const double tan_half = std::tan(0.5 * config.camera.horizontal_fov);
        return config.bs_boresight_azimuth + std::atan((bbox_center_x - 0.5) * 2.0 * tan_half);
    }

    data::Position meters_to_geo(const Vec2 &xy, const GeoAnchor &anchor)
    {
        constexpr double rad2deg = 180.0 / std::numbers::pi;
        const double lat0 = anchor.latitude / rad2deg;
        return {anchor.latitude + xy[1] / earth_radius_m * rad2deg,
                anchor.longitude + xy[0] / (earth_radius_m * std::cos(lat0)) * rad2deg};
    }

    Vec2 geo_to_meters(const data::Position &p, const GeoAnchor &anchor)
    {
        constexpr double deg2rad = std::numbers::pi / 180.0;
        const double lat0 = anchor.latitude * deg2rad;
        return {(p.longitude - anchor.longitude) * deg2rad * earth_radius_m * std::cos(lat0),
                (p.latitude - anchor.latitude) * deg2rad * earth_radius_m};
    }

    data::Position gps_observe(const Vec2 &true_xy, const SceneConfig &config, Rng &rng)
    {
        if (!(config.gps_noise_std >= 0.0))
            throw ConfigError("gps_observe: gps_noise_std must be >= 0");
        std::normal_distribution<double> normal(0.0, 1.0);
        const double ex = normal(rng);
        const double ey = normal(rng);
        return meters_to_geo({true_xy[0] + config.gps_noise_std * ex, true_xy[1] + config.gps_noise_std * ey},
                             config.geo_anchor);
    }

    std::vector<data::Sample> generate_samples(const SceneConfig &scene, const PhyConfig &phy_config,
                                               std::size_t first, std::size_t count)
    {
        scene.validate();
        phy_config.validate();
        const phy::ArrayGeometry geometry = aligned_geometry(scene, phy_config);
        const phy::Codebook codebook = phy::dft_codebook(geometry, phy_config.num_beams);
        const double wavelength = phy::speed_of_light / phy_config.carrier_hz;

        std::vector<data::Sample> out;
        out.reserve(count);
        for (std::size_t i = first; i < first + count; ++i)
        {
            Rng traj_rng(derive_seed(scene.rng_seed, stream::trajectory, i));
            Rng gps_rng(derive_seed(scene.rng_seed, stream::gps, i));
            Rng det_rng(derive_seed(scene.rng_seed, stream::detection, i));

            const Vec2 xy = sample_road_point(scene, traj_rng);
            const Vec3 user{xy[0], xy[1], scene.user_height};
            const phy::Channel ch = phy::channel_from_geometry(user, scene.bs_position, geometry,
                                                               phy_config.ref_gain_at_1m, wavelength);
            phy::BeamSelection sel = phy::optimal_beam(ch, codebook);

            data::Sample s;
            s.power = std::move(sel.powers);
            for (auto &p : s.power)
                p *= phy_config.link.tx_power;
            s.label = sel.index;
            s.true_xy = xy;
            s.position = gps_observe(xy, scene, gps_rng);

            VisualFeatures vf = project_to_camera(user, scene);
            if (vf.detected && scene.detection_noise_std > 0.0)
            {
                std::normal_distribution<double> normal(0.0, 1.0);
                vf.bbox_center_x = std::clamp(vf.bbox_center_x + scene.detection_noise_std * normal(det_rng), 0.0, 1.0);
                vf.bbox_center_y = std::clamp(vf.bbox_center_y + scene.detection_noise_std * normal(det_rng), 0.0, 1.0);
            }
            s.features = vf.flatten();
            out.push_back(std::move(s));
        }
        return out;
    }

    data::Dataset generate_dataset(const SceneConfig &scene, const PhyConfig &phy_config, std::size_t num_samples)
    {
        if (num_samples < 1)
            throw ConfigError("generate_dataset: num_samples must be >= 1");
        data::Dataset ds;
        ds.samples = generate_samples(scene, phy_config, 0, num_samples);
        ds.codebook_size = phy_config.num_beams;
        return ds;
    }
}
