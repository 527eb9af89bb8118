#include "roadseg/synthdata.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace roadseg {
namespace {

using nlohmann::json;

constexpr int kFullBands = 4, kHalfBands = 6, kSixthBands = 3;
constexpr int kTotalBands = kFullBands + kHalfBands + kSixthBands;
constexpr double kMetersPerPixel = 10.0;
constexpr double kNativeRes = 5.0;

// Mean background reflectance per band (full group first, then half, sixth).
constexpr float kBackgroundBase[kTotalBands] = {
    0.10f, 0.14f, 0.12f, 0.28f,                 // B02 B03 B04 B08
    0.16f, 0.22f, 0.25f, 0.27f, 0.20f, 0.14f,   // B05 B06 B07 B8A B11 B12
    0.11f, 0.09f, 0.05f,                        // B01 B09 B10
};

// Road reflectance by class; different spectra keep the classes separable
// even where widths overlap visually.
constexpr float kRoadAlbedo[3][kTotalBands] = {
    // small: dirt-like, warm
    {0.30f, 0.34f, 0.42f, 0.38f, 0.40f, 0.38f, 0.37f, 0.36f, 0.45f, 0.43f, 0.30f, 0.28f, 0.10f},
    // medium: gravel
    {0.42f, 0.44f, 0.46f, 0.40f, 0.45f, 0.43f, 0.42f, 0.41f, 0.50f, 0.48f, 0.40f, 0.35f, 0.12f},
    // big: sealed asphalt/concrete, flat bright spectrum
    {0.55f, 0.56f, 0.57f, 0.52f, 0.55f, 0.54f, 0.53f, 0.52f, 0.58f, 0.56f, 0.50f, 0.45f, 0.15f},
};

constexpr float kCloudBrightness = 1.05f;
constexpr float kCloudRange = 0.25f;
constexpr double kSeasonAmp = 0.15;

double class_width(RoadClass c, std::mt19937_64& rng) {
    double lo = 1.0, hi = 4.0;
    if (c == RoadClass::medium) {
        lo = 4.0;
        hi = 8.0;
    } else if (c == RoadClass::big) {
        lo = 8.0;
        hi = 20.0;
    }
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Point2 random_edge_point(int edge, double w, double h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (edge & 3) {
        case 0: return {u(rng) * w, 0.0};
        case 1: return {u(rng) * w, h};
        case 2: return {0.0, u(rng) * h};
        default: return {w, u(rng) * h};
    }
}

std::vector<RoadSegment> make_roads(uint64_t seed, double size_m, double density) {
    std::mt19937_64 rng = make_rng(seed, 1);
    const double area_km2 = (size_m / 1000.0) * (size_m / 1000.0);
    const int n = static_cast<int>(std::llround(density * area_km2));
    std::vector<RoadSegment> roads;
    std::uniform_int_distribution<int> cls_d(1, 3);
    std::uniform_int_distribution<int> edge_d(0, 3);
    std::uniform_real_distribution<double> jitter(-0.06 * size_m, 0.06 * size_m);
    for (int i = 0; i < n; ++i) {
        RoadSegment seg;
        seg.road_class = static_cast<RoadClass>(cls_d(rng));
        seg.width_m = class_width(seg.road_class, rng);
        int e0 = edge_d(rng);
        int e1 = edge_d(rng);
        if (e1 == e0) e1 = (e0 + 1 + edge_d(rng) % 3) & 3;
        const Point2 a = random_edge_point(e0, size_m, size_m, rng);
        const Point2 b = random_edge_point(e1, size_m, size_m, rng);
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int waypoints = std::max(1, static_cast<int>(len / 500.0));
        seg.polyline.push_back(a);
        const double nx = -(b.y - a.y) / std::max(len, 1e-9);
        const double ny = (b.x - a.x) / std::max(len, 1e-9);
        for (int k = 1; k < waypoints; ++k) {
            const double t = static_cast<double>(k) / waypoints;
            const double off = jitter(rng);
            Point2 p{a.x + t * (b.x - a.x) + off * nx, a.y + t * (b.y - a.y) + off * ny};
            p.x = std::clamp(p.x, 0.0, size_m);
            p.y = std::clamp(p.y, 0.0, size_m);
            seg.polyline.push_back(p);
        }
        seg.polyline.push_back(b);
        roads.push_back(std::move(seg));
    }
    return roads;
}

/// Coarse random grid bilinearly upsampled to the native raster; one shared
/// texture field modulates all bands.
std::vector<float> make_texture(uint64_t seed, int native) {
    std::mt19937_64 rng = make_rng(seed, 2);
    const int coarse = std::max(2, native / 24);
    std::vector<float> grid(static_cast<size_t>((coarse + 1) * (coarse + 1)));
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (float& g : grid) g = u(rng);
    std::vector<float> tex(static_cast<size_t>(native) * native);
    const double scale = static_cast<double>(coarse) / native;
    for (int r = 0; r < native; ++r) {
        const double fy = (r + 0.5) * scale - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, coarse - 1);
        const double wy = std::clamp(fy - y0, 0.0, 1.0);
        for (int c = 0; c < native; ++c) {
            const double fx = (c + 0.5) * scale - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, coarse - 1);
            const double wx = std::clamp(fx - x0, 0.0, 1.0);
            const float v00 = grid[static_cast<size_t>(y0 * (coarse + 1) + x0)];
            const float v01 = grid[static_cast<size_t>(y0 * (coarse + 1) + x0 + 1)];
            const float v10 = grid[static_cast<size_t>((y0 + 1) * (coarse + 1) + x0)];
            const float v11 = grid[static_cast<size_t>((y0 + 1) * (coarse + 1) + x0 + 1)];
            tex[static_cast<size_t>(r) * native + c] = static_cast<float>(
                (1 - wy) * ((1 - wx) * v00 + wx * v01) + wy * ((1 - wx) * v10 + wx * v11));
        }
    }
    return tex;
}

/// Per-class road coverage on the native grid: fraction of the pixel
/// footprint under the road stroke, approximated from the distance between
/// the pixel center and the centerline.
std::array<std::vector<float>, 3> make_coverage(const std::vector<RoadSegment>& roads,
                                                const Extent& extent, int native) {
    std::array<std::vector<float>, 3> cov;
    for (auto& c : cov) c.assign(static_cast<size_t>(native) * native, 0.0f);
    for (const RoadSegment& seg : roads) {
        const int ci = static_cast<int>(seg.road_class) - 1;
        if (ci < 0) continue;
        std::vector<float>& buf = cov[static_cast<size_t>(ci)];
        const double reach = seg.width_m / 2.0 + kNativeRes;  // meters
        for (size_t i = 0; i + 1 < seg.polyline.size(); ++i) {
            const Point2& a = seg.polyline[i];
            const Point2& b = seg.polyline[i + 1];
            double c0, r0, c1, r1;
            world_to_grid(extent, kNativeRes, a, &c0, &r0);
            world_to_grid(extent, kNativeRes, b, &c1, &r1);
            const double margin = reach / kNativeRes;
            const int rmin = std::clamp(static_cast<int>(std::floor(std::min(r0, r1) - margin)), 0,
                                        native - 1);
            const int rmax = std::clamp(static_cast<int>(std::ceil(std::max(r0, r1) + margin)), 0,
                                        native - 1);
            const int cmin = std::clamp(static_cast<int>(std::floor(std::min(c0, c1) - margin)), 0,
                                        native - 1);
            const int cmax = std::clamp(static_cast<int>(std::ceil(std::max(c0, c1) + margin)), 0,
                                        native - 1);
            for (int r = rmin; r <= rmax; ++r)
                for (int c = cmin; c <= cmax; ++c) {
                    const Point2 p = grid_cell_center(extent, kNativeRes, r, c);
                    const double d = point_segment_distance(p, a, b);
                    const double f =
                        std::clamp((seg.width_m / 2.0 - d) / kNativeRes + 0.5, 0.0, 1.0);
                    float& px = buf[static_cast<size_t>(r) * native + c];
                    px = std::max(px, static_cast<float><float>(f));
                }
        }
    }
    return cov;
}

void validate(const SceneParams& p) {
    if (p.size_px <= 0 || p.size_px % 12 != 0)
        throw std::invalid_argument("generate_scene: size_px must be a positive multiple of 12");
    if (p.n_timesteps < 1) throw std::invalid_argument("generate_scene: n_timesteps must be >= 1");
    if (p.road_density < 0) throw std::invalid_argument("generate_scene: negative road_density");
    if (p.cloud_coverage.empty())
        throw std::invalid_argument("generate_scene: cloud_coverage must not be empty");
    for (double c : p.cloud_coverage)
        if (!(c >= 0.0 && c <= 1.0))
            throw std::invalid_argument("generate_scene: cloud_coverage must lie in [0,1]");
    if (p.cloud_coverage.size() != 1 &&
        p.cloud_coverage.size() != static_cast<size_t>(p.n_timesteps))
        throw std::invalid_argument(
            "generate_scene: cloud_coverage must have one entry or one per timestep");
}

/// Smooth bump field on the 10 m grid, thresholded at the requested
/// coverage quantile.
ByteTensor cloud_mask_for(uint64_t seed, int t, int size, double coverage) {
    ByteTensor mask({size, size});
    if (coverage <= 0.0) return mask;
    if (coverage >= 1.0) {
        mask.fill(1);
        return mask;
    }
    std::mt19937_64 rng = make_rng(seed, 3, static_cast<uint64_t>(t));
    std::uniform_real_distribution<double> up(0.0, 1.0);
    const int bumps = 24;
    std::vector<double> cx(bumps), cy(bumps), inv2s2(bumps), amp(bumps);
    for (int i = 0; i < bumps; ++i) {
        cx[i] = up(rng) * size;
        cy[i] = up(rng) * size;
        const double sigma = (0.04 + 0.08 * up(rng)) * size;
        inv2s2[i] = 1.0 / (2.0 * sigma * sigma);
        amp[i] = 0.5 + 0.5 * up(rng);
    }
    std::vector<float> field(static_cast<size_t>(size) * size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            double v = 0.0;
            for (int i = 0; i < bumps; ++i) {
                const double dx = c + 0.5 - cx[i];
                const double dy = r + 0.5 - cy[i];
                v += amp[i] * std::exp(-(dx * dx + dy * dy) * inv2s2[i]);
            }
            field[static_cast<size_t>(r) * size + c] = static_cast<float>(v);
        }
    const int64_t n = static_cast<int64_t>(field.size());
    const int64_t want = std::clamp<int64_t>(static_cast<int64_t>(std::llround(coverage * n)), 1,
                                             n - 1);
    std::vector<float> sorted = field;
    std::nth_element(sorted.begin(), sorted.begin() + (n - want), sorted.end());
    const float thresh = sorted[static_cast<size_t>(n - want)];
    for (int64_t i = 0; i < n; ++i)
        mask.v[static_cast<size_t>(i)] = field[static_cast<size_t>(i)] >= thresh ? 1 : 0;
    return mask;
}

/// Box average with an integer factor; input is (native, native).
void box_average(const std::vector<float>& native, int native_size, int factor, float* out) {
    const int out_size = native_size / factor;
    const float inv = 1.0f / static_cast<float>(factor * factor);
    for (int r = 0; r < out_size; ++r)
        for (int c = 0; c < out_size; ++c) {
            float acc = 0.0f;
            for (int dr = 0; dr < factor; ++dr) {
                const float* row = native.data() + static_cast<size_t>(r * factor + dr) * native_size +
                                   static_cast<size_t>(c) * factor;
                for (int dc = 0; dc < factor; ++dc) acc += row[dc];
            }
            out[static_cast<size_t>(r) * out_size + c] = acc * inv;
        }
}

}  // namespace

SyntheticScene generate_scene(uint64_t seed, const SceneParams& params) {
    validate(params);
    const int size = params.size_px;
    const int native = 2 * size;
    const double size_m = size * kMetersPerPixel;

    SyntheticScene scene;
    scene.seed = seed;
    scene.extent = Extent{0.0, 0.0, size_m, size_m};
    scene.roads = make_roads(seed, size_m, params.road_density);
    for (int t = 0; t < params.n_timesteps; ++t) {
        const int q = (params.start_month - 3) / 3 + t;
        scene.timestamps.emplace_back(params.start_year + q / 4, 3 + 3 * (q % 4));
    }

    const std::vector<float> tex = make_texture(seed, native);
    const auto cov = make_coverage(scene.roads, scene.extent, native);

    const int T = params.n_timesteps;
    scene.full.resize({kFullBands, T, size, size});
    scene.half.resize({kHalfBands, T, size / 2, size / 2});
    scene.sixth.resize({kSixthBands, T, size / 6, size / 6});
    scene.cloud_mask.resize({T, size, size});
    scene.missing_mask.resize({T, size, size});

    // cloud value shaped slightly by position so blobs are not flat
    std::vector<float> nativeband(static_cast<size_t>(native) * native);

    for (int t = 0; t < T; ++t) {
        const double coverage =
            params.cloud_coverage.size() == 1 ? params.cloud_coverage[0]
                                              : params.cloud_coverage[static_cast<size_t>(t)];
        const ByteTensor cloud = cloud_mask_for(seed, t, size, coverage);
        std::copy_n(cloud.data(), cloud.numel(),
                    scene.cloud_mask.data() + static_cast<int64_t>(t) * size * size);

        const double month = scene.timestamps[static_cast<size_t>(t)].second;
        const float season =
            static_cast<float>(1.0 + kSeasonAmp * std::sin(2.0 * M_PI * (month - 3.0) / 12.0));

        std::mt19937_64 cloud_tex_rng = make_rng(seed, 6, static_cast<uint64_t>(t));
        std::uniform_real_distribution<float> cloud_u(0.0f, kCloudRange);
        const float cloud_base = kCloudBrightness + cloud_u(cloud_tex_rng);

        // missing-data stripe, aligned to the 60 m grid so each band group
        // zeroes on whole pixels
        std::mt19937_64 miss_rng = make_rng(seed, 5, static_cast<uint64_t>(t));
        std::uniform_real_distribution<double> um(0.0, 1.0);
        int stripe0 = -1, stripe1 = -1;
        if (um(miss_rng) < params.missing_prob) {
            const int ncols6 = size / 6;
            const int w6 = 1 + static_cast<int>(um(miss_rng) * 2.0);  // 6 or 12 px at 10 m
            const int c6 = static_cast<int>(um(miss_rng) * (ncols6 - w6));
            stripe0 = c6 * 6;
            stripe1 = (c6 + w6) * 6;
            for (int r = 0; r < size; ++r)
                for (int c = stripe0; c < stripe1; ++c)
                    scene.missing_mask.v[static_cast<size_t>(
                        (static_cast<int64_t>(t) * size + r) * size + c)] = 1;
        }

        for (int b = 0; b < kTotalBands; ++b) {
            // ground reflectance + clouds on the native grid
            for (int r = 0; r < native; ++r) {
                const int pr = r / 2;
                for (int c = 0; c < native; ++c) {
                    const size_t ni = static_cast<size_t>(r) * native + c;
                    float v;
                    if (cloud.v[static_cast<size_t>(pr) * size + c / 2]) {
                        v = cloud_base + 0.05f * tex[ni];
                    } else {
                        const float c0 = cov[0][ni], c1 = cov[1][ni], c2 = cov[2][ni];
                        const float total = c0 + c1 + c2;
                        float ground = kBackgroundBase[b] + 0.04f * tex[ni];
                        if (total > 0.0f) {
                            const float norm = total > 1.0f ? 1.0f / total : 1.0f;
                            const float road_mix = kRoadAlbedo[0][b] * c0 * norm +
                                                   kRoadAlbedo[1][b] * c1 * norm +
                                                   kRoadAlbedo[2][b] * c2 * norm;
                            const float opacity = std::min(total, 1.0f);
                            ground = ground * (1.0f - opacity) + road_mix;
                        }
                        v = ground * season;
                    }
                    nativeband[ni] = v;
                }
            }

            // area-average into the band group resolution, then add noise
            float* dst;
            int factor, out_size, group_band;
            if (b < kFullBands) {
                group_band = b;
                factor = 2;
                out_size = size;
                dst = scene.full.data() + (static_cast<int64_t>(group_band) * T + t) * size * size;
            } else if (b < kFullBands + kHalfBands) {
                group_band = b - kFullBands;
                factor = 4;
                out_size = size / 2;
                dst = scene.half.data() +
                      (static_cast<int64_t>(group_band) * T + t) * (size / 2) * (size / 2);
            } else {
                group_band = b - kFullBands - kHalfBands;
                factor = 12;
                out_size = size / 6;
                dst = scene.sixth.data() +
                      (static_cast<int64_t>(group_band) * T + t) * (size / 6) * (size / 6);
            }
            box_average(nativeband, native, factor, dst);

            if (params.noise_std > 0.0) {
                std::mt19937_64 noise_rng =
                    make_rng(seed, 4, static_cast<uint64_t>(t) * kTotalBands + b);
                std::normal_distribution<float> gauss(0.0f, static_cast<float>(params.noise_std));
                for (int64_t i = 0; i < static_cast<int64_t>(out_size) * out_size; ++i)
                    dst[i] += gauss(noise_rng);
            }

            if (stripe0 >= 0) {
                const int g0 = stripe0 * out_size / size;
                const int g1 = stripe1 * out_size / size;
                for (int r = 0; r < out_size; ++r)
                    for (int c = g0; c < g1; ++c) dst[static_cast<size_t>(r) * out_size + c] = 0.0f;
            }
        }
    }
    return scene;
}

SyntheticScene generate_scene(uint64_t seed, int size_px, int n_timesteps, double road_density,
                              double cloud_coverage) {
    SceneParams p;
    p.size_px = size_px;
    p.n_timesteps = n_timesteps;
    p.road_density = road_density;
    p.cloud_coverage = {cloud_coverage};
    return generate_scene(seed, p);
}

PatchSample scene_to_patch(const SyntheticScene& scene, double label_resolution_m) {
    if (label_resolution_m != 10.0 && label_resolution_m != 5.0)
        throw std::invalid_argument("scene_to_patch: label resolution must be 10 or 5 m");
    PatchSample s;
    s.full = scene.full;
    s.half = scene.half;
    s.sixth = scene.sixth;
    s.timestamps = scene.timestamps;
    s.extent = scene.extent;
    s.label_resolution_m = label_resolution_m;
    s.label = rasterize_centerlines(scene.roads, label_resolution_m, scene.extent);
    return s;
}

TileData scene_to_tile(const SyntheticScene& scene, const std::string& tile_id) {
    TileData tile;
    tile.tile_id = tile_id;
    tile.full = scene.full;
    tile.half = scene.half;
    tile.sixth = scene.sixth;
    tile.label10 = rasterize_centerlines(scene.roads, 10.0, scene.extent);
    tile.label5 = rasterize_centerlines(scene.roads, 5.0, scene.extent);
    tile.timestamps = scene.timestamps;
    tile.extent = scene.extent;
    return tile;
}

void write_scene_container(const std::string& path, const SyntheticScene& scene) {
    std::vector<ContainerEntry> entries;
    entries.push_back(make_entry("bands/full", scene.full));
    entries.push_back(make_entry("bands/half", scene.half));
    entries.push_back(make_entry("bands/sixth", scene.sixth));
    entries.push_back(make_entry("mask/cloud", scene.cloud_mask));
    entries.push_back(make_entry("mask/missing", scene.missing_mask));

    Tensor desc({static_cast<int64_t>(scene.roads.size()), 3});
    int64_t total_pts = 0;
    for (const RoadSegment& r : scene.roads) total_pts += static_cast<int64_t>(r.polyline.size());
    Tensor xy({total_pts, 2});
    int64_t k = 0;
    for (size_t i = 0; i < scene.roads.size(); ++i) {
        const RoadSegment& r = scene.roads[i];
        desc.at2(static_cast<int64_t>(i), 0) = static_cast<float>(static_cast<int>(r.road_class));
        desc.at2(static_cast<int64_t>(i), 1) = static_cast<float>(r.width_m);
        desc.at2(static_cast<int64_t>(i), 2) = static_cast<float>(r.polyline.size());
        for (const Point2& p : r.polyline) {
            xy.at2(k, 0) = static_cast<float>(p.x);
            xy.at2(k, 1) = static_cast<float>(p.y);
            ++k;
        }
    }
    entries.push_back(make_entry("roads/desc", desc));
    entries.push_back(make_entry("roads/xy", xy));

    json meta;
    meta["seed"] = scene.seed;
    meta["extent"] = {scene.extent.x0, scene.extent.y0, scene.extent.x1, scene.extent.y1};
    meta["timestamps"] = scene.timestamps;
    entries.push_back(make_json_entry("meta/scene", meta.dump()));
    write_container(path, entries);
}

SyntheticScene read_scene_container(const std::string& path) {
    ContainerIndex idx = read_container_index(path);
    SyntheticScene scene;
    scene.full = idx.tensor("bands/full");
    scene.half = idx.tensor("bands/half");
    scene.sixth = idx.tensor("bands/sixth");
    scene.cloud_mask = idx.bytes("mask/cloud");
    scene.missing_mask = idx.bytes("mask/missing");

    const Tensor desc = idx.tensor("roads/desc");
    const Tensor xy = idx.tensor("roads/xy");
    int64_t k = 0;
    for (int64_t i = 0; i < desc.dim(0); ++i) {
        RoadSegment seg;
        seg.road_class = road_class_from_int(static_cast<int>(desc.at2(i, 0)));
        seg.width_m = desc.at2(i, 1);
        const int64_t npts = static_cast<int64_t>(desc.at2(i, 2));
        for (int64_t j = 0; j < npts; ++j, ++k)
            seg.polyline.push_back({xy.at2(k, 0), xy.at2(k, 1)});
        scene.roads.push_back(std::move(seg));
    }

    json meta;
    try {
        meta = json::parse(idx.json_text("meta/scene"));
    } catch (const json::exception& ex) {
        throw DataError("scene container: invalid meta/scene in '" + path + "': " + ex.what());
    }
    scene.seed = meta.at("seed").get<uint64_t>();
    const auto& e = meta.at("extent");
    scene.extent = Extent{e.at(0), e.at(1), e.at(2), e.at(3)};
    for (const auto& ts : meta.at("timestamps"))
        scene.timestamps.emplace_back(ts.at(0).get<int>(), ts.at(1).get<int>());
    return scene;
}

}  // namespace roadseg
