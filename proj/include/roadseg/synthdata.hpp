#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roadseg/core.hpp"
#include "roadseg/geometry.hpp"
#include "roadseg/ingest.hpp"

namespace roadseg {

/// Knobs of the procedural scene generator. The scene is rendered on a
/// 5 m native grid and area-averaged into the 10/20/60 m band groups, so
/// coarse bands are exact means of their finer children (before the
/// per-band noise injection).
struct SceneParams {
    int size_px = 240;      // 10 m grid; must be a multiple of 12
    int n_timesteps = 12;
    double road_density = 0.8;  // expected roads per km^2
    std::vector<double> cloud_coverage = {0.0};  // per timestep, or one value broadcast
    double noise_std = 0.02;
    double missing_prob = 0.3;  // chance of a zeroed column stripe per timestep
    int start_year = 2016;
    int start_month = 3;  // quarterly revisit: 3, 6, 9, 12
};

struct SyntheticScene {
    Tensor full, half, sixth;      // (C, T, H, W) at 10/20/60 m
    ByteTensor cloud_mask;         // (T, H, W) on the 10 m grid
    ByteTensor missing_mask;       // (T, H, W)
    std::vector<RoadSegment> roads;
    uint64_t seed = 0;
    Extent extent;
    std::vector<std::pair<int, int>> timestamps;
};

/// Deterministic per seed. Road geometry, texture, clouds and noise are
/// drawn from independent derived streams, so overriding cloud coverage
/// leaves the road network of a seed untouched.
SyntheticScene generate_scene(uint64_t seed, const SceneParams& params);

SyntheticScene generate_scene(uint64_t seed, int size_px, int n_timesteps, double road_density,
                              double cloud_coverage);

/// Whole-scene sample with the label rasterized at 10 or 5 m.
PatchSample scene_to_patch(const SyntheticScene& scene, double label_resolution_m);

/// Bands plus labels at both resolutions, ready for patch extraction.
TileData scene_to_tile(const SyntheticScene& scene, const std::string& tile_id);

void write_scene_container(const std::string& path, const SyntheticScene& scene);
SyntheticScene read_scene_container(const std::string& path);

}  // namespace roadseg
