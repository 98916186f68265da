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

#include "catch_amalgamated.hpp"

#include "beampred/error.hpp"
#include "beampred/scene.hpp"

#include <cmath>
#include <numbers>

using namespace beampred;
using namespace beampred::scene;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    // Perpendicular distance from p to the infinite line through the road
    double distance_to_road(const Vec2 &p, const SceneConfig &c)
    {
        const double dx = c.road_end[0] - c.road_start[0];
        const double dy = c.road_end[1] - c.road_start[1];
        const double cross = (p[0] - c.road_start[0]) * dy - (p[1] - c.road_start[1]) * dx;
        return std::abs(cross) / std::hypot(dx, dy);
    }

    Vec3 at_relative_azimuth(double az, double range, const SceneConfig &c, double z = 0.0)
    {
        const double world = c.bs_boresight_azimuth + az;
        return {c.bs_position[0] + range * std::cos(world), c.bs_position[1] + range * std::sin(world), z};
    }
}

TEST_CASE("Trajectory sampling")
{
    SceneConfig cfg;
    SECTION("points stay within the lateral jitter band")
    {
        Rng rng(1);
        const auto pts = sample_trajectory(cfg, 2000, rng);
        REQUIRE(pts.size() == 2000);
        for (const auto &p : pts)
        {
            CHECK(distance_to_road(p, cfg) <= cfg.lateral_jitter + 1e-12);
            CHECK(p[0] >= cfg.road_start[0] - 1e-12);
            CHECK(p[0] <= cfg.road_end[0] + 1e-12);
        }
    }
    SECTION("zero jitter lies on the segment")
    {
        cfg.lateral_jitter = 0.0;
        Rng rng(2);
        for (const auto &p : sample_trajectory(cfg, 100, rng))
            CHECK_THAT(p[1], WithinAbs(15.0, 1e-12));
    }
    SECTION("same seed, same points")
    {
        Rng a(42), b(42);
        CHECK(sample_trajectory(cfg, 50, a) == sample_trajectory(cfg, 50, b));
    }
    SECTION("invalid requests")
    {
        Rng rng(1);
        CHECK_THROWS_AS(sample_trajectory(cfg, 0, rng), ConfigError);
        cfg.road_end = cfg.road_start;
        CHECK_THROWS_AS(sample_trajectory(cfg, 3, rng), ConfigError);
    }
}

TEST_CASE("Camera projection")
{
    SceneConfig cfg;
    cfg.bs_position = {0.0, 0.0, 4.0};

    SECTION("on the optical axis lands at the horizontal center")
    {
        const auto vf = project_to_camera(at_relative_azimuth(0.0, 10.0, cfg), cfg);
        CHECK(vf.detected);
        CHECK_THAT(vf.bbox_center_x, WithinAbs(0.5, 1e-12));
    }
    SECTION("mirror symmetry about the boresight")
    {
        for (double az : {0.1, 0.4, 0.8})
        {
            const auto l = project_to_camera(at_relative_azimuth(az, 12.0, cfg), cfg);
            const auto r = project_to_camera(at_relative_azimuth(-az, 12.0, cfg), cfg);
            CHECK_THAT(l.bbox_center_x + r.bbox_center_x, WithinAbs(1.0, 1e-12));
            CHECK_THAT(l.bbox_width, WithinAbs(r.bbox_width, 1e-12));
        }
    }
    SECTION("outside the field of view or behind the camera is undetected")
    {
        const auto side = project_to_camera(at_relative_azimuth(1.2, 10.0, cfg), cfg);
        CHECK_FALSE(side.detected);
        CHECK(side.flatten() == std::vector<double>(5, 0.0));
        CHECK_FALSE(project_to_camera(at_relative_azimuth(std::numbers::pi, 10.0, cfg), cfg).detected);
    }
    SECTION("halving the depth doubles the box size")
    {
        const auto far = project_to_camera(at_relative_azimuth(0.0, 20.0, cfg), cfg);
        const auto near = project_to_camera(at_relative_azimuth(0.0, 10.0, cfg), cfg);
        CHECK_THAT(near.bbox_width, WithinRel(2.0 * far.bbox_width, 1e-12));
        CHECK_THAT(near.bbox_height, WithinRel(2.0 * far.bbox_height, 1e-12));
    }
    SECTION("center x grows monotonically with azimuth")
    {
        double prev = -1.0;
        for (double az = -0.9; az <= 0.9; az += 0.05)
        {
            const auto vf = project_to_camera(at_relative_azimuth(az, 15.0, cfg), cfg);
            REQUIRE(vf.detected);
            CHECK(vf.bbox_center_x > prev);
            prev = vf.bbox_center_x;
        }
    }
    SECTION("azimuth recovered from the box center")
    {
        for (double az = -0.95; az <= 0.95; az += 0.1)
        {
            const auto vf = project_to_camera(at_relative_azimuth(az, 15.0, cfg), cfg);
            CHECK_THAT(azimuth_from_bbox_center_x(vf.bbox_center_x, cfg), WithinAbs(cfg.bs_boresight_azimuth + az, 1e-9));
        }
    }
    SECTION("features are bounded")
    {
        Rng rng(9);
        for (const auto &p : sample_trajectory(cfg, 500, rng))
            for (double x : project_to_camera({p[0], p[1], 0.0}, cfg).flatten())
            {
                CHECK(x >= 0.0);
                CHECK(x <= 1.0);
            }
    }
}

TEST_CASE("GPS observation")
{
    SceneConfig cfg;
    SECTION("meter/degree round trip")
    {
        for (const Vec2 xy : {Vec2{0.0, 0.0}, Vec2{-20.0, 15.0}, Vec2{123.4, -56.7}})
        {
            const auto back = geo_to_meters(meters_to_geo(xy, cfg.geo_anchor), cfg.geo_anchor);
            CHECK_THAT(back[0], WithinAbs(xy[0], 1e-6));
            CHECK_THAT(back[1], WithinAbs(xy[1], 1e-6));
        }
    }
    SECTION("one meter north is 1/R radians of latitude")
    {
        const auto p = meters_to_geo({0.0, 1.0}, cfg.geo_anchor);
        CHECK_THAT(p.latitude - cfg.geo_anchor.latitude, WithinRel(180.0 / (std::numbers::pi * earth_radius_m), 1e-9));
        CHECK(p.longitude == cfg.geo_anchor.longitude);
    }
    SECTION("zero noise reports the true position")
    {
        cfg.gps_noise_std = 0.0;
        Rng rng(3);
        const auto p = gps_observe({5.0, 15.0}, cfg, rng);
        CHECK(p == meters_to_geo({5.0, 15.0}, cfg.geo_anchor));
    }
    SECTION("noisy observations are unbiased with the configured spread")
    {
        cfg.gps_noise_std = 2.0;
        Rng rng(4);
        const int draws = 10000;
        double sx = 0.0, sy = 0.0, sxx = 0.0;
        for (int i = 0; i < draws; ++i)
        {
            const auto m = geo_to_meters(gps_observe({5.0, 15.0}, cfg, rng), cfg.geo_anchor);
            sx += m[0] - 5.0;
            sy += m[1] - 15.0;
            sxx += (m[0] - 5.0) * (m[0] - 5.0);
        }
        const double tol = 3.0 * cfg.gps_noise_std / std::sqrt(double(draws));
        CHECK(std::abs(sx / draws) <= tol);
        CHECK(std::abs(sy / draws) <= tol);
        CHECK_THAT(std::sqrt(sxx / draws), WithinRel(2.0, 0.05));
    }
}

TEST_CASE("Sample generation")
{
    SceneConfig scene;
    PhyConfig phy_cfg;

    SECTION("labels, power lengths and features")
    {
        const auto ds = generate_dataset(scene, phy_cfg, 300);
        REQUIRE(ds.size() == 300);
        CHECK(ds.codebook_size == 64);
        for (const auto &s : ds.samples)
        {
            CHECK(s.label < 64);
            CHECK(s.power.size() == 64);
            CHECK(s.label == data::argmax(s.power));
            CHECK(s.features.size() == VisualFeatures::dim);
        }
        CHECK_NOTHROW(ds.validate());
    }
    SECTION("labels do not depend on GPS noise")
    {
        SceneConfig noisy = scene;
        noisy.gps_noise_std = 8.0;
        const auto a = generate_dataset(scene, phy_cfg, 200);
        const auto b = generate_dataset(noisy, phy_cfg, 200);
        CHECK(a.labels() == b.labels());
        bool any_moved = false;
        for (std::size_t i = 0; i < a.size(); ++i)
            any_moved = any_moved || !(a.samples[i].position == b.samples[i].position);
        CHECK(any_moved);
    }
    SECTION("mirrored users select mirrored beams")
    {
        const auto geometry = aligned_geometry(scene, phy_cfg);
        const auto cb = phy::dft_codebook(geometry, 64);
        for (double x : {2.3, 7.1, 11.9, 16.4})
        {
            const auto a = phy::optimal_beam(phy::channel_from_geometry({x, 15.0, 1.5}, scene.bs_position, geometry), cb);
            const auto b = phy::optimal_beam(phy::channel_from_geometry({-x, 15.0, 1.5}, scene.bs_position, geometry), cb);
            CHECK(a.index + b.index == 63);
        }
    }
    SECTION("any partition of the index range yields the same samples")
    {
        const auto whole = generate_samples(scene, phy_cfg, 0, 60);
        auto parts = generate_samples(scene, phy_cfg, 0, 17);
        const auto rest = generate_samples(scene, phy_cfg, 17, 43);
        parts.insert(parts.end(), rest.begin(), rest.end());
        CHECK(parts == whole);
    }
    SECTION("seeded reproducibility")
    {
        CHECK(generate_dataset(scene, phy_cfg, 40) == generate_dataset(scene, phy_cfg, 40));
        SceneConfig other = scene;
        other.rng_seed = 2;
        CHECK_FALSE(generate_dataset(scene, phy_cfg, 40) == generate_dataset(other, phy_cfg, 40));
    }
    SECTION("invalid configuration")
    {
        CHECK_THROWS_AS(generate_dataset(scene, phy_cfg, 0), ConfigError);
        SceneConfig bad = scene;
        bad.gps_noise_std = -1.0;
        CHECK_THROWS_AS(generate_dataset(bad, phy_cfg, 5), ConfigError);
    }
}
