#pragma once

#include <cmath>
#include <vector>

#include "roadseg/core.hpp"

namespace roadseg {

struct Point2 {
    double x = 0, y = 0;
};

/// Road centerline with attributes. width_m matters for rendering only;
/// labels are centerline pixels regardless of width.
struct RoadSegment {
    std::vector<Point2> polyline;  // >= 2 points, planar meters
    RoadClass road_class = RoadClass::small;
    double width_m = 2.0;
};

inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::fmin(1.0, std::fmax(0.0, t));
    const double px = a.x + t * dx - p.x;
    const double py = a.y + t * dy - p.y;
    return std::sqrt(px * px + py * py);
}

inline double point_polyline_distance(const Point2& p, const std::vector<Point2>& line) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < line.size(); ++i)
        best = std::fmin(best, point_segment_distance(p, line[i], line[i + 1]));
    return best;
}

/// World (x, y) -> continuous raster coordinates (col, row) for a grid over
/// `extent` at `resolution_m` per pixel. Row 0 is the top strip (y near y1).
inline void world_to_grid(const Extent& e, double resolution_m, const Point2& p,
                          double* col, double* row) {
    *col = (p.x - e.x0) / resolution_m;
    *row = (e.y1 - p.y) / resolution_m;
}

/// Center of cell (row, col) in world coordinates.
inline Point2 grid_cell_center(const Extent& e, double resolution_m, int64_t row, int64_t col) {
    return Point2{e.x0 + (static_cast<double>(col) + 0.5) * resolution_m,
                  e.y1 - (static_cast<double>(row) + 0.5) * resolution_m};
}

}  // namespace roadseg
