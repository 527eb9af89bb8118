#include "roadseg/ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

namespace roadseg {
namespace {

using nlohmann::json;

const std::set<std::string>& big_tags() {
    static const std::set<std::string> tags = {
        "motorway", "motorway_link", "primary",  "primary_link",
        "secondary", "secondary_link", "tertiary", "tertiary_link",
    };
    return tags;
}

/// Liang-Barsky clip of a segment to the box [0,w]x[0,h] in grid coords.
bool clip_to_grid(double& c0, double& r0, double& c1, double& r1, double w, double h) {
    double t0 = 0.0, t1 = 1.0;
    const double dc = c1 - c0, dr = r1 - r0;
    const double p[4] = {-dc, dc, -dr, dr};
    const double q[4] = {c0, w - c0, r0, h - r0};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
        } else {
            const double t = q[i] / p[i];
            if (p[i] < 0.0) {
                if (t > t1) return false;
                t0 = std::max(t0, t);
            } else {
                if (t < t0) return false;
                t1 = std::min(t1, t);
            }
        }
    }
    const double nc0 = c0 + t0 * dc, nr0 = r0 + t0 * dr;
    const double nc1 = c0 + t1 * dc, nr1 = r0 + t1 * dr;
    c0 = nc0; r0 = nr0; c1 = nc1; r1 = nr1;
    return true;
}

template <typename Fn>
void supercover_cells(double c0, double r0, double c1, double r1, int64_t w, int64_t h, Fn&& fn) {
    if (!clip_to_grid(c0, r0, c1, r1, static_cast<double>(w), static_cast<double>(h))) return;
    auto cell = [](double x, int64_t n) {
        int64_t i = static_cast<int64_t>(std::floor(x));
        return std::clamp<int64_t>(i, 0, n - 1);
    };
    int64_t c = cell(c0, w), r = cell(r0, h);
    const int64_t ce = cell(c1, w), re = cell(r1, h);
    const double dc = c1 - c0, dr = r1 - r0;
    const int64_t step_c = dc > 0 ? 1 : -1;
    const int64_t step_r = dr > 0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    const double tdc = dc != 0.0 ? std::abs(1.0 / dc) : inf;
    const double tdr = dr != 0.0 ? std::abs(1.0 / dr) : inf;
    double tmc = inf, tmr = inf;
    if (dc > 0) tmc = (static_cast<double>(c) + 1.0 - c0) / dc;
    else if (dc < 0) tmc = (static_cast<double>(c) - c0) / dc;
    if (dr > 0) tmr = (static_cast<double>(r) + 1.0 - r0) / dr;
    else if (dr < 0) tmr = (static_cast<double>(r) - r0) / dr;

    const int64_t max_steps = 2 * (w + h) + 4;
    for (int64_t i = 0; i <= max_steps; ++i) {
        fn(r, c);
        if (c == ce && r == re) return;
        if (tmc < tmr) {
            c += step_c;
            tmc += tdc;
        } else if (tmr < tmc) {
            r += step_r;
            tmr += tdr;
        } else {
            // exact corner crossing: advance both axes
            c += step_c;
            r += step_r;
            tmc += tdc;
            tmr += tdr;
        }
        if (c < 0 || c >= w || r < 0 || r >= h) return;
    }
}

ByteTensor window2d(const ByteTensor& src, int64_t r0, int64_t c0, int64_t h, int64_t w) {
    ByteTensor out({h, w});
    for (int64_t r = 0; r < h; ++r)
        std::copy_n(src.data() + (r0 + r) * src.dim(1) + c0, w, out.data() + r * w);
    return out;
}

Tensor window_bands(const Tensor& src, int64_t r0, int64_t c0, int64_t h, int64_t w) {
    const int64_t C = src.dim(0), T = src.dim(1), H = src.dim(2), W = src.dim(3);
    (void)H;
    Tensor out({C, T, h, w});
    for (int64_t c = 0; c < C; ++c)
        for (int64_t t = 0; t < T; ++t) {
            const float* sp = src.data() + ((c * T + t) * src.dim(2) + r0) * W + c0;
            float* op = out.data() + ((c * T + t) * h) * w;
            for (int64_t r = 0; r < h; ++r) std::copy_n(sp + r * W, w, op + r * w);
        }
    return out;
}

json extent_to_json(const Extent& e) { return json::array({e.x0, e.y0, e.x1, e.y1}); }

Extent extent_from_json(const json& j) {
    return Extent{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
                  j.at(3).get<double>()};
}

}  // namespace

RoadClass map_highway_tag(const std::string& tag) {
    if (tag.empty()) return RoadClass::no_road;
    if (big_tags().count(tag)) return RoadClass::big;
    if (tag == "unclassified") return RoadClass::medium;
    return RoadClass::small;
}

ByteTensor rasterize_centerlines(const std::vector<RoadSegment>& segments, double resolution_m,
                                 const Extent& extent) {
    if (!(extent.width() > 0.0) || !(extent.height() > 0.0))
        throw std::invalid_argument("rasterize_centerlines: empty extent");
    const double wq = extent.width() / resolution_m;
    const double hq = extent.height() / resolution_m;
    const int64_t w = static_cast<int64_t>(std::llround(wq));
    const int64_t h = static_cast<int64_t>(std::llround(hq));
    if (std::abs(wq - static_cast<double>(w)) > 1e-9 || std::abs(hq - static_cast<double>(h)) > 1e-9)
        throw std::invalid_argument(
            "rasterize_centerlines: extent is not an integer multiple of the resolution");

    ByteTensor raster({h, w});
    for (const RoadSegment& seg : segments) {
        const uint8_t cls = static_cast<uint8_t>(seg.road_class);
        for (size_t i = 0; i + 1 < seg.polyline.size(); ++i) {
            double c0, r0, c1, r1;
            world_to_grid(extent, resolution_m, seg.polyline[i], &c0, &r0);
            world_to_grid(extent, resolution_m, seg.polyline[i + 1], &c1, &r1);
            supercover_cells(c0, r0, c1, r1, w, h, [&](int64_t r, int64_t c) {
                uint8_t& px = raster.v[static_cast<size_t>(r * w + c)];
                px = std::max(px, cls);
            });
        }
    }
    return raster;
}

std::vector<std::pair<int, int>> sample_patch_corners(int tile_h, int tile_w, int patch_full_px,
                                                      int n, uint64_t seed) {
    if (patch_full_px <= 0 || patch_full_px % 12 != 0)
        throw std::invalid_argument("extract_patches: patch size must be a positive multiple of 12");
    if (tile_h < patch_full_px || tile_w < patch_full_px)
        throw std::invalid_argument("extract_patches: tile smaller than patch");
    // corners stay multiples of 6 so every band grid windows on whole pixels
    const int nr = (tile_h - patch_full_px) / 6 + 1;
    const int nc = (tile_w - patch_full_px) / 6 + 1;
    std::mt19937_64 rng = make_rng(seed, 11);
    std::uniform_int_distribution<int> dr(0, nr - 1), dc(0, nc - 1);
    std::vector<std::pair<int, int>> corners;
    corners.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int r = dr(rng) * 6;
        const int c = dc(rng) * 6;
        corners.emplace_back(r, c);
    }
    return corners;
}

PatchSample cut_patch(const TileData& tile, int row0, int col0, int patch_full_px,
                      double label_resolution_m) {
    const int64_t p = patch_full_px;
    if (row0 % 6 != 0 || col0 % 6 != 0)
        throw std::invalid_argument("cut_patch: corner must be a multiple of 6");
    PatchSample s;
    s.full = window_bands(tile.full, row0, col0, p, p);
    s.half = window_bands(tile.half, row0 / 2, col0 / 2, p / 2, p / 2);
    s.sixth = window_bands(tile.sixth, row0 / 6, col0 / 6, p / 6, p / 6);
    s.timestamps = tile.timestamps;
    s.label_resolution_m = label_resolution_m;
    if (label_resolution_m == 5.0) {
        s.label = window2d(tile.label5, 2 * row0, 2 * col0, 2 * p, 2 * p);
    } else if (label_resolution_m == 10.0) {
        s.label = window2d(tile.label10, row0, col0, p, p);
    } else {
        throw std::invalid_argument("cut_patch: label resolution must be 5 or 10 m");
    }
    s.extent.x0 = tile.extent.x0 + 10.0 * col0;
    s.extent.x1 = s.extent.x0 + 10.0 * static_cast<double>(p);
    s.extent.y1 = tile.extent.y1 - 10.0 * row0;
    s.extent.y0 = s.extent.y1 - 10.0 * static_cast<double>(p);
    return s;
}

std::vector<PatchSample> extract_patches(const TileData& tile, int n, int patch_full_px,
                                         uint64_t seed, double label_resolution_m) {
    const auto corners = sample_patch_corners(static_cast<int>(tile.full.dim(2)),
                                              static_cast<int>(tile.full.dim(3)), patch_full_px,
                                              n, seed);
    std::vector<PatchSample> out;
    out.reserve(corners.size());
    for (const auto& [r, c] : corners)
        out.push_back(cut_patch(tile, r, c, patch_full_px, label_resolution_m));
    return out;
}

void write_patch_container(const std::string& path, const TileData& tile,
                           const std::vector<std::pair<int, int>>& corners, int patch_full_px) {
    std::vector<ContainerEntry> entries;
    json meta;
    meta["tile_id"] = tile.tile_id;
    meta["patch_full_px"] = patch_full_px;
    meta["extent"] = extent_to_json(tile.extent);
    meta["timestamps"] = tile.timestamps;
    meta["patches"] = json::array();
    for (size_t i = 0; i < corners.size(); ++i) {
        const auto [r, c] = corners[i];
        PatchSample s = cut_patch(tile, r, c, patch_full_px, 5.0);
        const std::string prefix = "patch/" + std::to_string(i) + "/";
        entries.push_back(make_entry(prefix + "full", s.full));
        entries.push_back(make_entry(prefix + "half", s.half));
        entries.push_back(make_entry(prefix + "sixth", s.sixth));
        entries.push_back(make_entry(prefix + "label5", s.label));
        entries.push_back(make_entry(
            prefix + "label10", window2d(tile.label10, r, c, patch_full_px, patch_full_px)));
        meta["patches"].push_back(
            {{"row", r}, {"col", c}, {"extent", extent_to_json(s.extent)}});
    }
    entries.push_back(make_json_entry("meta/patches", meta.dump()));
    write_container(path, entries);
}

std::vector<PatchSample> read_patch_container(const std::string& path,
                                              double label_resolution_m) {
    if (label_resolution_m != 5.0 && label_resolution_m != 10.0)
        throw std::invalid_argument("read_patch_container: label resolution must be 5 or 10 m");
    ContainerIndex idx = read_container_index(path);
    json meta;
    try {
        meta = json::parse(idx.json_text("meta/patches"));
    } catch (const json::exception& ex) {
        throw DataError("patch container: invalid meta/patches in '" + path + "': " + ex.what());
    }
    std::vector<std::pair<int, int>> timestamps;
    for (const auto& ts : meta.at("timestamps"))
        timestamps.emplace_back(ts.at(0).get<int>(), ts.at(1).get<int>());

    std::vector<PatchSample> out;
    const auto& patches = meta.at("patches");
    for (size_t i = 0; i < patches.size(); ++i) {
        const std::string prefix = "patch/" + std::to_string(i) + "/";
        PatchSample s;
        s.full = idx.tensor(prefix + "full");
        s.half = idx.tensor(prefix + "half");
        s.sixth = idx.tensor(prefix + "sixth");
        s.label = idx.bytes(prefix + (label_resolution_m == 5.0 ? "label5" : "label10"));
        s.label_resolution_m = label_resolution_m;
        s.timestamps = timestamps;
        s.extent = extent_from_json(patches.at(i).at("extent"));
        out.push_back(std::move(s));
    }
    return out;
}

void write_manifest(const std::string& path, const DatasetManifest& m) {
    json j;
    j["entries"] = json::array();
    for (const ManifestEntry& e : m.entries)
        j["entries"].push_back({{"path", e.path}, {"tile_id", e.tile_id}, {"split", e.split}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("manifest: cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("manifest: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw DataError("manifest: invalid JSON in '" + path + "': " + ex.what());
    }
    DatasetManifest m;
    try {
        for (const auto& e : j.at("entries"))
            m.entries.push_back({e.at("path").get<std::string>(), e.at("tile_id").get<std::string>(),
                                 e.at("split").get<std::string>()});
    } catch (const json::exception& ex) {
        throw DataError("manifest: malformed entry in '" + path + "': " + ex.what());
    }
    return m;
}

std::vector<PatchSample> load_split(const std::string& manifest_path, const std::string& split,
                                    double label_resolution_m) {
    const DatasetManifest m = read_manifest(manifest_path);
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    std::vector<PatchSample> out;
    for (const ManifestEntry& e : m.entries) {
        if (e.split != split) continue;
        const std::filesystem::path p =
            std::filesystem::path(e.path).is_absolute() ? e.path : base / e.path;
        auto patches = read_patch_container(p.string(), label_resolution_m);
        for (auto& s : patches) out.push_back(std::move(s));
    }
    return out;
}

}  // namespace roadseg
