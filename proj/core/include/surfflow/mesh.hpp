#pragma once

#include <array>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace surfflow {

using Vec3 = Eigen::Vector3d;

/// Mesh edge with its one or two adjacent triangles.
///
/// `v` is sorted ascending; `tri[1] == -1` marks a boundary edge.
struct Edge {
    std::array<int, 2> v{};
    std::array<int, 2> tri{-1, -1};

    [[nodiscard]] bool is_boundary() const { return tri[1] < 0; }
};

/// A closed, oriented cycle of boundary vertices. Consecutive vertices span a
/// boundary edge and the surface lies to the left of the traversal direction.
struct BoundaryLoop {
    std::vector<int> vertices;
    std::vector<int> edges; // edges[i] joins vertices[i] and vertices[i+1]
    double length = 0.0;
};

/// Indexed, consistently oriented triangle mesh of a 2-manifold in R^3.
///
/// Everything derived (edges, loops, per-element geometry) is computed once in
/// the constructor; the object is immutable afterwards. Local edge i of a
/// triangle is the edge opposite its local vertex i.
class SurfaceMesh {
public:
    /// Validates and builds all derived data. Throws MeshError on non-manifold
    /// edges, inconsistent orientation, degenerate triangles or bad indices.
    SurfaceMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles);

    [[nodiscard]] int vertex_count() const { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int edge_count() const { return static_cast<int>(edges_.size()); }
    [[nodiscard]] int triangle_count() const { return static_cast<int>(triangles_.size()); }

    [[nodiscard]] const std::vector<Vec3>& vertices() const { return vertices_; }
    [[nodiscard]] const Vec3& vertex(int v) const { return vertices_[v]; }
    [[nodiscard]] const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    [[nodiscard]] const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const Edge& edge(int e) const { return edges_[e]; }
    [[nodiscard]] const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }
    [[nodiscard]] const std::vector<BoundaryLoop>& boundary_loops() const { return loops_; }

    [[nodiscard]] const Vec3& normal(int t) const { return normals_[t]; }
    [[nodiscard]] double area(int t) const { return areas_[t]; }
    [[nodiscard]] const std::array<Vec3, 3>& hat_gradients(int t) const { return hat_grads_[t]; }
    [[nodiscard]] Vec3 centroid(int t) const;
    [[nodiscard]] double edge_length(int e) const;
    /// Longest edge of triangle t.
    [[nodiscard]] double diameter(int t) const;

    [[nodiscard]] bool is_closed() const { return loops_.empty(); }
    [[nodiscard]] bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
    [[nodiscard]] int boundary_edge_count() const;
    [[nodiscard]] int euler_characteristic() const;
    [[nodiscard]] double total_area() const;
    [[nodiscard]] double min_edge_length() const;
    [[nodiscard]] double max_edge_length() const;

    /// In-plane unit normal of boundary edge e pointing out of the surface.
    [[nodiscard]] Vec3 boundary_outward_normal(int e) const;

    /// Index of the edge joining a and b, or -1.
    [[nodiscard]] int find_edge(int a, int b) const;

private:
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<BoundaryLoop> loops_;
    std::vector<Vec3> normals_;
    std::vector<double> areas_;
    std::vector<std::array<Vec3, 3>> hat_grads_;
    std::vector<char> boundary_vertex_;
    std::vector<std::vector<int>> vertex_edges_;
};

enum class MeshFormat { off, obj };

/// Parses OFF or OBJ (triangular faces only). Connected components whose
/// orientation is consistent but inward on a closed component are flipped;
/// anything else that violates the mesh invariants throws MeshError.
SurfaceMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
/// Picks the format from the file extension.
SurfaceMesh load_mesh(const std::filesystem::path& path);
SurfaceMesh parse_off(std::string_view text);
SurfaceMesh parse_obj(std::string_view text);

void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path, MeshFormat format);

/// 2*pi (interior) or pi (boundary) minus the sum of incident corner angles.
std::vector<double> angle_defects(const SurfaceMesh& mesh);

/// Per-vertex discrete Gaussian curvature: angle defect over one third of the
/// incident triangle area.
std::vector<double> gaussian_curvature_p1(const SurfaceMesh& mesh);

/// Same as mesh.boundary_loops(); loops are sorted by decreasing length.
const std::vector<BoundaryLoop>& boundary_loops(const SurfaceMesh& mesh);

} // namespace surfflow
