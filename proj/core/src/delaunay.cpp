#include "delaunay.hpp"

#include <algorithm>
#include <cmath>

#include <boost/polygon/voronoi.hpp>

#include "surfflow/errors.hpp"

namespace surfflow::detail {

std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& pts) {
    namespace bp = boost::polygon;
    if (pts.size() < 3) {
        return {};
    }
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    // the Voronoi builder wants 32-bit integer sites
    const double scale = 1.0e9 / std::max({xmax - xmin, ymax - ymin, 1e-300});
    std::vector<bp::point_data<int>> sites;
    sites.reserve(pts.size());
    for (const auto& p : pts) {
        sites.emplace_back(static_cast<int>(std::lround((p.x - xmin) * scale)),
                           static_cast<int>(std::lround((p.y - ymin) * scale)));
    }
    bp::voronoi_diagram<double> vd;
    bp::construct_voronoi(sites.begin(), sites.end(), &vd);

    std::vector<std::array<int, 3>> tris;
    std::vector<int> ring;
    for (const auto& v : vd.vertices()) {
        ring.clear();
        const auto* e = v.incident_edge();
        do {
            ring.push_back(static_cast<int>(e->cell()->source_index()));
            e = e->rot_next();
        } while (e != v.incident_edge());
        for (std::size_t k = 1; k + 1 < ring.size(); ++k) {
            std::array<int, 3> t{ring[0], ring[k], ring[k + 1]};
            const auto& a = pts[t[0]];
            const auto& b = pts[t[1]];
            const auto& c = pts[t[2]];
            const double area2 = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
            if (area2 < 0.0) {
                std::swap(t[1], t[2]);
            }
            tris.push_back(t);
        }
    }
    if (tris.empty()) {
        throw MeshError("points are collinear, no triangulation");
    }
    return tris;
}

} // namespace surfflow::detail
