#pragma once

#include <array>
#include <vector>

namespace surfflow::detail {

struct Point2 {
    double x;
    double y;
};

/// Delaunay triangulation of distinct planar points, counter-clockwise, taken
/// as the dual of the Voronoi diagram. Cocircular groups are fanned.
std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& pts);

} // namespace surfflow::detail
