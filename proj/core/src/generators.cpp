#include "surfflow/generators.hpp"

#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "surfflow/errors.hpp"

namespace surfflow {

namespace {

constexpr double kPi = std::numbers::pi;

using Tri = std::array<int, 3>;

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw ConfigError("invalid mesh parameters: " + what);
    }
}

// Flips every triangle whose normal disagrees with the reference direction.
void orient(const std::vector<Vec3>& pts, std::vector<Tri>& tris, const std::function<Vec3(const Vec3&)>& outward) {
    for (auto& t : tris) {
        const Vec3 n = (pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]]);
        const Vec3 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
        if (n.dot(outward(c)) < 0.0) {
            std::swap(t[1], t[2]);
        }
    }
}

// Splits the quad a-b-c-d (counter-clockwise) along a-c.
void add_quad(std::vector<Tri>& tris, int a, int b, int c, int d) {
    tris.push_back({a, b, c});
    tris.push_back({a, c, d});
}

SurfaceMesh rectangle(const GeneratorParams& p) {
    require(p.width > 0 && p.height > 0, "rectangle width and height must be positive");
    require(p.nx >= 1 && p.ny >= 1, "rectangle subdivisions must be >= 1");
    std::vector<Vec3> pts;
    for (int j = 0; j <= p.ny; ++j) {
        for (int i = 0; i <= p.nx; ++i) {
            pts.emplace_back(p.width * i / p.nx, p.height * j / p.ny, 0.0);
        }
    }
    auto id = [&](int i, int j) { return j * (p.nx + 1) + i; };
    std::vector<Tri> tris;
    for (int j = 0; j < p.ny; ++j) {
        for (int i = 0; i < p.nx; ++i) {
            add_quad(tris, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
        }
    }
    return SurfaceMesh(std::move(pts), std::move(tris));
}

SurfaceMesh disk(const GeneratorParams& p) {
    require(p.outer_radius > 0, "disk radius must be positive");
    require(p.n_radial >= 1, "disk needs at least one ring");
    std::vector<Vec3> pts{Vec3::Zero()};
    std::vector<int> ring_start{0};
    for (int k = 1; k <= p.n_radial; ++k) {
        ring_start.push_back(static_cast<int>(pts.size()));
        const int n = 6 * k;
        const double r = p.outer_radius * k / p.n_radial;
        for (int j = 0; j < n; ++j) {
            const double a = 2.0 * kPi * j / n;
            pts.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
        }
    }
    std::vector<Tri> tris;
    for (int j = 0; j < 6; ++j) {
        tris.push_back({0, 1 + j, 1 + (j + 1) % 6});
    }
    for (int k = 2; k <= p.n_radial; ++k) {
        const int m = 6 * (k - 1);
        const int n = 6 * k;
        const int in0 = ring_start[k - 1];
        const int out0 = ring_start[k];
        int i = 0;
        int j = 0;
        // Merge the two rings by angle: fraction (i+1)/m vs (j+1)/n.
        while (i < m || j < n) {
            const bool advance_outer = j < n && (i >= m || static_cast<long>(j + 1) * m <= static_cast<long>(i + 1) * n);
            if (advance_outer) {
                tris.push_back({in0 + i % m, out0 + j, out0 + (j + 1) % n});
                ++j;
            } else {
                tris.push_back({in0 + i, out0 + j % n, in0 + (i + 1) % m});
                ++i;
            }
        }
    }
    orient(pts, tris, [](const Vec3&) { return Vec3(0, 0, 1); });
    return SurfaceMesh(std::move(pts), std::move(tris));
}

SurfaceMesh annulus(const GeneratorParams& p) {
    require(p.inner_radius > 0 && p.outer_radius > p.inner_radius, "annulus needs 0 < inner_radius < outer_radius");
    require(p.n_radial >= 1, "annulus n_radial must be >= 1");
    require(p.n_angular >= 3, "annulus n_angular must be >= 3");
    std::vector<Vec3> pts;
    for (int i = 0; i <= p.n_radial; ++i) {
        const double r = p.inner_radius + (p.outer_radius - p.inner_radius) * i / p.n_radial;
        for (int j = 0; j < p.n_angular; ++j) {
            const double a = 2.0 * kPi * j / p.n_angular;
            pts.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
        }
    }
    auto id = [&](int i, int j) { return i * p.n_angular + (j % p.n_angular); };
    std::vector<Tri> tris;
    for (int i = 0; i < p.n_radial; ++i) {
        for (int j = 0; j < p.n_angular; ++j) {
            add_quad(tris, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
        }
    }
    orient(pts, tris, [](const Vec3&) { return Vec3(0, 0, 1); });
    return SurfaceMesh(std::move(pts), std::move(tris));
}

SurfaceMesh torus(const GeneratorParams& p) {
    require(p.major_radius > p.minor_radius && p.minor_radius > 0, "torus needs major_radius > minor_radius > 0");
    require(p.n_theta >= 3 && p.n_phi >= 3, "torus subdivisions must be >= 3");
    std::vector<Vec3> pts;
    for (int i = 0; i < p.n_theta; ++i) {
        const double theta = 2.0 * kPi * i / p.n_theta;
        for (int j = 0; j < p.n_phi; ++j) {
            const double phi = 2.0 * kPi * j / p.n_phi;
            const double ring = p.major_radius + p.minor_radius * std::cos(phi);
            pts.emplace_back(ring * std::cos(theta), p.minor_radius * std::sin(phi), ring * std::sin(theta));
        }
    }
    auto id = [&](int i, int j) { return (i % p.n_theta) * p.n_phi + (j % p.n_phi); };
    std::vector<Tri> tris;
    for (int i = 0; i < p.n_theta; ++i) {
        for (int j = 0; j < p.n_phi; ++j) {
            add_quad(tris, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
        }
    }
    const double R = p.major_radius;
    orient(pts, tris, [R](const Vec3& c) {
        Vec3 core(c.x(), 0.0, c.z());
        core *= R / core.norm();
        return Vec3(c - core);
    });
    return SurfaceMesh(std::move(pts), std::move(tris));
}

SurfaceMesh cylinder_lateral(const GeneratorParams& p) {
    require(p.diameter > 0 && p.length > 0, "cylinder diameter and length must be positive");
    require(p.n_around >= 3 && p.n_axial >= 1, "cylinder needs n_around >= 3 and n_axial >= 1");
    const double r = 0.5 * p.diameter;
    std::vector<Vec3> pts;
    for (int k = 0; k <= p.n_axial; ++k) {
        const double z = -0.5 * p.length + p.length * k / p.n_axial;
        for (int j = 0; j < p.n_around; ++j) {
            const double a = 2.0 * kPi * j / p.n_around;
            pts.emplace_back(r * std::cos(a), r * std::sin(a), z);
        }
    }
    auto id = [&](int j, int k) { return k * p.n_around + (j % p.n_around); };
    std::vector<Tri> tris;
    for (int k = 0; k < p.n_axial; ++k) {
        for (int j = 0; j < p.n_around; ++j) {
            add_quad(tris, id(j, k), id(j + 1, k), id(j + 1, k + 1), id(j, k + 1));
        }
    }
    orient(pts, tris, [](const Vec3& c) { return Vec3(c.x(), c.y(), 0.0); });
    return SurfaceMesh(std::move(pts), std::move(tris));
}

// Uniform nodes on [a, b] with roughly the requested spacing; includes both ends.
std::vector<double> uniform_nodes(double a, double b, double h) {
    const int n = std::max(1, static_cast<int>(std::lround((b - a) / h)));
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) {
        x[i] = a + (b - a) * i / n;
    }
    return x;
}

std::vector<double> concat_nodes(std::initializer_list<std::vector<double>> parts) {
    std::vector<double> out;
    for (const auto& part : parts) {
        for (double x : part) {
            if (out.empty() || x > out.back() + 1e-14) {
                out.push_back(x);
            }
        }
    }
    return out;
}

struct Plane2 {
    double x;
    double y;
};

// Tensor grid in a 2D parameter plane with the box [xs[ib0],xs[ib1]] x
// [ys[jb0],ys[jb1]] replaced by an O-grid wrapped around a circular hole.
// With `periodic_x` the last x node is identified with the first.
struct HoleGrid {
    std::vector<double> xs;
    std::vector<double> ys;
    bool periodic_x = false;
    double period = 0.0;
    int ib0 = 0;
    int ib1 = 0;
    int jb0 = 0;
    int jb1 = 0;
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    double h = 0.0;
};

std::pair<std::vector<Plane2>, std::vector<Tri>> build_hole_grid(const HoleGrid& g) {
    const int nxn = static_cast<int>(g.xs.size()) - (g.periodic_x ? 1 : 0); // distinct x nodes
    const int nyn = static_cast<int>(g.ys.size());
    const int ncx = g.periodic_x ? nxn : nxn - 1;
    const int ncy = nyn - 1;

    auto inside_box_strict = [&](int i, int j) { return i > g.ib0 && i < g.ib1 && j > g.jb0 && j < g.jb1; };

    std::vector<Plane2> pts;
    std::vector<int> grid_id(static_cast<std::size_t>(nxn) * nyn, -1);
    for (int j = 0; j < nyn; ++j) {
        for (int i = 0; i < nxn; ++i) {
            if (inside_box_strict(i, j)) {
                continue;
            }
            grid_id[static_cast<std::size_t>(j) * nxn + i] = static_cast<int>(pts.size());
            pts.push_back({g.xs[i], g.ys[j]});
        }
    }
    auto gid = [&](int i, int j) { return grid_id[static_cast<std::size_t>(j) * nxn + (i % nxn)]; };

    std::vector<Tri> tris;
    for (int j = 0; j < ncy; ++j) {
        for (int i = 0; i < ncx; ++i) {
            const bool in_box = i >= g.ib0 && i < g.ib1 && j >= g.jb0 && j < g.jb1;
            if (in_box) {
                continue;
            }
            const int a = gid(i, j);
            const int b = gid(i + 1, j);
            const int c = gid(i + 1, j + 1);
            const int d = gid(i, j + 1);
            // Alternate the diagonal by quadrant around the hole for symmetry.
            const bool flip = (g.xs[i] < g.cx) != (g.ys[j] < g.cy);
            if (flip) {
                tris.push_back({a, b, d});
                tris.push_back({b, c, d});
            } else {
                add_quad(tris, a, b, c, d);
            }
        }
    }

    // Box boundary, counter-clockwise.
    std::vector<int> ring;
    for (int i = g.ib0; i < g.ib1; ++i) {
        ring.push_back(gid(i, g.jb0));
    }
    for (int j = g.jb0; j < g.jb1; ++j) {
        ring.push_back(gid(g.ib1, j));
    }
    for (int i = g.ib1; i > g.ib0; --i) {
        ring.push_back(gid(i, g.jb1));
    }
    for (int j = g.jb1; j > g.jb0; --j) {
        ring.push_back(gid(g.ib0, j));
    }
    const int P = static_cast<int>(ring.size());

    // Radial layers: geometric-ish clustering towards the circle.
    const double gap = std::min(g.xs[g.ib1] - g.cx, g.ys[g.jb1] - g.cy) - g.radius;
    const int K = std::max(2, static_cast<int>(std::ceil(1.2 * gap / g.h)));
    std::vector<std::vector<int>> layer(K + 1, std::vector<int>(P));
    layer[K] = ring;
    for (int k = 0; k < K; ++k) {
        const double s = std::pow(static_cast<double>(k) / K, 1.4);
        for (int q = 0; q < P; ++q) {
            const Plane2& b = pts[ring[q]];
            const double dx = b.x - g.cx;
            const double dy = b.y - g.cy;
            const double len = std::hypot(dx, dy);
            const double px = g.cx + g.radius * dx / len;
            const double py = g.cy + g.radius * dy / len;
            layer[k][q] = static_cast<int>(pts.size());
            pts.push_back({px + s * (b.x - px), py + s * (b.y - py)});
        }
    }
    for (int k = 0; k < K; ++k) {
        for (int q = 0; q < P; ++q) {
            const int q1 = (q + 1) % P;
            add_quad(tris, layer[k][q], layer[k][q1], layer[k + 1][q1], layer[k + 1][q]);
        }
    }

    // Counter-clockwise in the parameter plane; periodic cells need unwrapped x.
    for (auto& t : tris) {
        double x[3];
        double y[3];
        for (int k = 0; k < 3; ++k) {
            x[k] = pts[t[k]].x;
            y[k] = pts[t[k]].y;
        }
        if (g.periodic_x) {
            for (int k = 1; k < 3; ++k) {
                if (x[k] - x[0] > 0.5 * g.period) {
                    x[k] -= g.period;
                } else if (x[0] - x[k] > 0.5 * g.period) {
                    x[k] += g.period;
                }
            }
        }
        const double signed_area = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
        if (signed_area < 0.0) {
            std::swap(t[1], t[2]);
        }
    }
    return {std::move(pts), std::move(tris)};
}

int index_of(const std::vector<double>& xs, double x) {
    auto it = std::min_element(xs.begin(), xs.end(),
                               [x](double a, double b) { return std::abs(a - x) < std::abs(b - x); });
    return static_cast<int>(it - xs.begin());
}

// Unstructured: boundary nodes spaced about h, a hexagonal lattice inside,
// a few rounds of Laplacian smoothing, then Delaunay.
SurfaceMesh channel_with_hole(const GeneratorParams& p) {
    using detail::Point2;
    require(p.channel_length > 0 && p.channel_height > 0, "channel dimensions must be positive");
    require(p.hole_radius > 0, "hole radius must be positive");
    require(p.h > 0 && p.h < p.hole_radius, "target edge length h must satisfy 0 < h < hole_radius");
    const double L = p.channel_length;
    const double H = p.channel_height;
    const double cx = p.hole_center_x;
    const double cy = p.hole_center_y;
    const double r = p.hole_radius;
    const double h = p.h;
    require(cx - r > h && cx + r < L - h && cy - r > h && cy + r < H - h,
            "hole must lie strictly inside the channel with room for at least one cell");

    const int nx = std::max(1, static_cast<int>(std::lround(L / h)));
    const int ny = std::max(2, static_cast<int>(std::lround(H / (0.5 * std::sqrt(3.0) * h))));
    const double hx = L / nx;
    const double dy = H / ny;
    const int nc = std::max(12, static_cast<int>(std::ceil(2.0 * kPi * r / h)));

    std::vector<Point2> pts;
    for (int i = 0; i <= nx; ++i) {
        pts.push_back({i * hx, 0.0});
    }
    for (int j = 1; j <= ny; ++j) {
        pts.push_back({L, j * dy});
    }
    for (int i = nx - 1; i >= 0; --i) {
        pts.push_back({i * hx, H});
    }
    for (int j = ny - 1; j >= 1; --j) {
        pts.push_back({0.0, j * dy});
    }
    for (int k = 0; k < nc; ++k) {
        const double a = 2.0 * kPi * k / nc;
        pts.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    const std::size_t fixed = pts.size();
    const double keep_out = r + 0.8 * h;
    for (int j = 1; j < ny; ++j) {
        const double shift = (j % 2) * 0.5 * hx;
        for (int i = 0; i <= nx; ++i) {
            const double x = i * hx + shift;
            if (x < 0.75 * hx || x > L - 0.75 * hx) {
                continue;
            }
            const double y = j * dy;
            if (std::hypot(x - cx, y - cy) < keep_out) {
                continue;
            }
            pts.push_back({x, y});
        }
    }

    auto inside_hole = [&](const std::array<int, 3>& t) {
        const double gx = (pts[t[0]].x + pts[t[1]].x + pts[t[2]].x) / 3.0;
        const double gy = (pts[t[0]].y + pts[t[1]].y + pts[t[2]].y) / 3.0;
        return std::hypot(gx - cx, gy - cy) < r;
    };
    auto triangulate = [&] {
        auto tris = detail::delaunay(pts);
        std::erase_if(tris, inside_hole);
        return tris;
    };

    const double margin = 0.4 * h;
    for (int iter = 0; iter < 6; ++iter) {
        const auto tris = triangulate();
        std::vector<double> sx(pts.size(), 0.0), sy(pts.size(), 0.0);
        std::vector<int> cnt(pts.size(), 0);
        for (const auto& t : tris) {
            for (int k = 0; k < 3; ++k) {
                const int a = t[k];
                const int b = t[(k + 1) % 3];
                // each interior edge is seen twice, once from each side
                sx[a] += pts[b].x;
                sy[a] += pts[b].y;
                ++cnt[a];
                sx[b] += pts[a].x;
                sy[b] += pts[a].y;
                ++cnt[b];
            }
        }
        for (std::size_t v = fixed; v < pts.size(); ++v) {
            if (cnt[v] == 0) {
                continue;
            }
            double x = sx[v] / cnt[v];
            double y = sy[v] / cnt[v];
            x = std::clamp(x, margin, L - margin);
            y = std::clamp(y, margin, H - margin);
            const double d = std::hypot(x - cx, y - cy);
            if (d < r + margin) {
                x = cx + (x - cx) * (r + margin) / d;
                y = cy + (y - cy) * (r + margin) / d;
            }
            pts[v] = {x, y};
        }
    }
    auto tris = triangulate();
    std::erase_if(tris, [&](const std::array<int, 3>& t) {
        const auto& a = pts[t[0]];
        const auto& b = pts[t[1]];
        const auto& c = pts[t[2]];
        return std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)) < 1e-12 * h * h;
    });
    std::vector<Tri> out(tris.begin(), tris.end());
    std::vector<Vec3> verts;
    verts.reserve(pts.size());
    for (const auto& q : pts) {
        verts.emplace_back(q.x, q.y, 0.0);
    }
    return SurfaceMesh(std::move(verts), std::move(out));
}

SurfaceMesh cylinder_with_hole(const GeneratorParams& p) {
    require(p.diameter > 0 && p.length > 0, "cylinder diameter and length must be positive");
    require(p.hole_diameter > 0, "hole diameter must be positive");
    const double R = 0.5 * p.diameter;
    const double r = 0.5 * p.hole_diameter;
    const double circumference = 2.0 * kPi * R;
    const double h = p.h > 0 ? p.h : circumference / std::max(p.n_around, 3);
    require(h < 2.0 * r, "target edge length must be smaller than the hole diameter");
    const double a = 2.0 * r;
    require(std::abs(p.hole_z) + a + h < 0.5 * p.length, "hole must lie strictly inside the lateral surface");
    require(2.0 * a + 2.0 * h < circumference, "hole too large for the cylinder");

    // Unrolled coordinates (s, z); s is arc length, hole centred at angle -pi/2.
    const double sc = -0.5 * kPi * R;
    const double s0 = sc - 0.5 * circumference;
    HoleGrid g;
    g.periodic_x = true;
    g.period = circumference;
    g.xs = concat_nodes({uniform_nodes(s0, sc - a, h), uniform_nodes(sc - a, sc + a, h),
                         uniform_nodes(sc + a, s0 + circumference, h)});
    g.ys = concat_nodes({uniform_nodes(-0.5 * p.length, p.hole_z - a, h), uniform_nodes(p.hole_z - a, p.hole_z + a, h),
                         uniform_nodes(p.hole_z + a, 0.5 * p.length, h)});
    g.ib0 = index_of(g.xs, sc - a);
    g.ib1 = index_of(g.xs, sc + a);
    g.jb0 = index_of(g.ys, p.hole_z - a);
    g.jb1 = index_of(g.ys, p.hole_z + a);
    g.cx = sc;
    g.cy = p.hole_z;
    g.radius = r;
    g.h = h;
    auto [plane, tris] = build_hole_grid(g);
    std::vector<Vec3> pts;
    pts.reserve(plane.size());
    for (const auto& q : plane) {
        const double theta = q.x / R;
        pts.emplace_back(R * std::cos(theta), R * std::sin(theta), q.y);
    }
    return SurfaceMesh(std::move(pts), std::move(tris));
}

} // namespace

MeshKind parse_mesh_kind(std::string_view name) {
    if (name == "rectangle") return MeshKind::rectangle;
    if (name == "disk") return MeshKind::disk;
    if (name == "annulus") return MeshKind::annulus;
    if (name == "torus") return MeshKind::torus;
    if (name == "cylinder_lateral") return MeshKind::cylinder_lateral;
    if (name == "cylinder_with_hole") return MeshKind::cylinder_with_hole;
    if (name == "channel_with_hole") return MeshKind::channel_with_hole;
    throw ConfigError("unknown mesh kind '" + std::string(name) + "'");
}

std::string to_string(MeshKind kind) {
    switch (kind) {
    case MeshKind::rectangle: return "rectangle";
    case MeshKind::disk: return "disk";
    case MeshKind::annulus: return "annulus";
    case MeshKind::torus: return "torus";
    case MeshKind::cylinder_lateral: return "cylinder_lateral";
    case MeshKind::cylinder_with_hole: return "cylinder_with_hole";
    case MeshKind::channel_with_hole: return "channel_with_hole";
    }
    return "unknown";
}

SurfaceMesh generate_mesh(MeshKind kind, const GeneratorParams& params) {
    switch (kind) {
    case MeshKind::rectangle: return rectangle(params);
    case MeshKind::disk: return disk(params);
    case MeshKind::annulus: return annulus(params);
    case MeshKind::torus: return torus(params);
    case MeshKind::cylinder_lateral: return cylinder_lateral(params);
    case MeshKind::cylinder_with_hole: return cylinder_with_hole(params);
    case MeshKind::channel_with_hole: return channel_with_hole(params);
    }
    throw ConfigError("unknown mesh kind");
}

Topology expected_topology(MeshKind kind) {
    switch (kind) {
    case MeshKind::rectangle:
    case MeshKind::disk: return {0, 1};
    case MeshKind::annulus:
    case MeshKind::cylinder_lateral:
    case MeshKind::channel_with_hole: return {0, 2};
    case MeshKind::torus: return {1, 0};
    case MeshKind::cylinder_with_hole: return {0, 3};
    }
    return {};
}

} // namespace surfflow
