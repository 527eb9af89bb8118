#pragma once

#include <string>
#include <vector>

#include "roadseg/container.hpp"
#include "roadseg/core.hpp"
#include "roadseg/geometry.hpp"

namespace roadseg {

/// OSM highway tag -> road class. Case-sensitive; the canonical tag list is
/// lowercase. Empty string means "not a road".
RoadClass map_highway_tag(const std::string& tag);

/// Draws each polyline one pixel wide along its centerline using supercover
/// traversal: every cell the segment passes through is set. Where classes
/// overlap, the higher class wins. width_m is ignored.
ByteTensor rasterize_centerlines(const std::vector<RoadSegment>& segments, double resolution_m,
                                 const Extent& extent);

/// Full tile: band stacks plus labels at both raster resolutions.
struct TileData {
    std::string tile_id;
    Tensor full, half, sixth;  // (C, T, H, W) at 10/20/60 m per pixel
    ByteTensor label10;        // (H, W)
    ByteTensor label5;         // (2H, 2W)
    std::vector<std::pair<int, int>> timestamps;
    Extent extent;
};

/// Uniformly random aligned window corners (row, col) in full-band pixels,
/// sampled with replacement. Corners are multiples of 6 so the 20 m and
/// 60 m windows land on whole pixels.
std::vector<std::pair<int, int>> sample_patch_corners(int tile_h, int tile_w, int patch_full_px,
                                                      int n, uint64_t seed);

/// Cuts one aligned patch at a given corner; label resolution 10 or 5 m.
PatchSample cut_patch(const TileData& tile, int row0, int col0, int patch_full_px,
                      double label_resolution_m);

/// n random patches from a tile (with replacement), deterministic per seed.
std::vector<PatchSample> extract_patches(const TileData& tile, int n, int patch_full_px,
                                         uint64_t seed, double label_resolution_m = 5.0);

// --- Patch container layout ----------------------------------------------
//
// One container file holds all patches of a tile. Tensor names are
//   patch/<i>/full, patch/<i>/half, patch/<i>/sixth   (f32)
//   patch/<i>/label5, patch/<i>/label10               (u8)
// plus "meta/patches" (u8, JSON: extents, corners, timestamps, tile id).

void write_patch_container(const std::string& path, const TileData& tile,
                           const std::vector<std::pair<int, int>>& corners, int patch_full_px);

/// Loads all patches of a container with the label at the requested
/// resolution (5 or 10 m).
std::vector<PatchSample> read_patch_container(const std::string& path,
                                              double label_resolution_m);

// --- Dataset manifest ------------------------------------------------------

struct ManifestEntry {
    std::string path;     // container path, relative to the manifest file
    std::string tile_id;
    std::string split;    // train / test / ... (free-form)
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
};

void write_manifest(const std::string& path, const DatasetManifest& m);
DatasetManifest read_manifest(const std::string& path);

/// Loads every patch of the manifest entries whose split matches.
std::vector<PatchSample> load_split(const std::string& manifest_path, const std::string& split,
                                    double label_resolution_m);

}  // namespace roadseg
