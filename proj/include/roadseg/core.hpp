#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "roadseg/tensor.hpp"

namespace roadseg {

inline constexpr int kNumClasses = 4;       // no_road, small, medium, big
inline constexpr int kOrdinalChannels = 3;  // c - 1 cascade outputs

/// Ordered road categories; the order is load-bearing for the ordinal codec.
enum class RoadClass : uint8_t {
    no_road = 0,
    small = 1,
    medium = 2,
    big = 3,
};

const char* road_class_name(RoadClass c);

inline RoadClass road_class_from_int(int k) {
    if (k < 0 || k >= kNumClasses)
        throw std::invalid_argument("road class out of range: " + std::to_string(k));
    return static_cast<RoadClass>(k);
}

/// Unreadable or inconsistent on-disk data (containers, manifests, configs).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Axis-aligned rectangle in a planar CRS, meters. y1 is the top edge;
/// raster row 0 maps to the strip just below y1.
struct Extent {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

/// Binary cascade raster: channel k answers "is the class > k?".
struct OrdinalMask {
    ByteTensor bits;  // (3, H, W), entries in {0,1}
    double resolution_m = 10.0;
};

/// One training/inference instance. Band stacks are (C, T, H, W) with T=1
/// for single-timestamp data; the three groups cover the same extent at
/// 10 m, 20 m and 60 m per pixel.
struct PatchSample {
    Tensor full;   // (4, T, H,   W)
    Tensor half;   // (6, T, H/2, W/2)
    Tensor sixth;  // (3, T, H/6, W/6)
    std::vector<std::pair<int, int>> timestamps;  // (year, month)
    ByteTensor label;                             // (Hl, Wl) class indices
    double label_resolution_m = 10.0;
    Extent extent;
};

struct ClassCounts {
    int64_t tp = 0, fp = 0, fn = 0;
};

struct ClassScores {
    double precision = 0, recall = 0, f1 = 0, jaccard = 0;
};

/// Per-road-class confusion counts and derived scores (background excluded).
struct MetricsReport {
    std::array<ClassCounts, kOrdinalChannels> counts{};
    std::array<ClassScores, kOrdinalChannels> scores{};
    double f1_avg() const {
        return (scores[0].f1 + scores[1].f1 + scores[2].f1) / 3.0;
    }
};

// --- Ordinal label codec -------------------------------------------------

/// class k -> ones in positions 0..k-1. (0,0,0)=no_road ... (1,1,1)=big.
std::array<uint8_t, kOrdinalChannels> encode_ordinal(RoadClass c);

/// Number of leading ones; bits past the first zero are ignored, so the
/// function is total on {0,1}^3.
RoadClass decode_ordinal(const std::array<uint8_t, kOrdinalChannels>& bits);

/// Elementwise strict comparison prob > t over a (3, H, W) stack.
OrdinalMask threshold_probs(const Tensor& probs, double t = 0.5);

/// (H, W) class raster -> (3, H, W) cascade bits.
ByteTensor encode_ordinal_raster(const ByteTensor& classes);

/// (3, H, W) cascade bits -> (H, W) class raster (leading-ones rule per pixel).
ByteTensor decode_ordinal_raster(const ByteTensor& bits);

}  // namespace roadseg
