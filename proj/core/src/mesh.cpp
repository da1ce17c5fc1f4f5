#include "surfflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "surfflow/errors.hpp"
#include "surfflow/io.hpp"

namespace surfflow {

namespace {

std::string describe_edge(int a, int b) {
    return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

int local_index(const std::array<int, 3>& tri, int v) {
    for (int i = 0; i < 3; ++i) {
        if (tri[i] == v) {
            return i;
        }
    }
    return -1;
}

// True when triangle t traverses the edge as a -> b.
bool traverses(const std::array<int, 3>& tri, int a, int b) {
    const int i = local_index(tri, a);
    return i >= 0 && tri[(i + 1) % 3] == b;
}

} // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    const int nv = vertex_count();
    const int nt = triangle_count();
    if (nv == 0 || nt == 0) {
        throw MeshError("mesh has no vertices or no triangles");
    }
    for (int t = 0; t < nt; ++t) {
        const auto& tri = triangles_[t];
        for (int v : tri) {
            if (v < 0 || v >= nv) {
                throw MeshError("triangle " + std::to_string(t) + " references vertex " +
                                std::to_string(v) + " out of range");
            }
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
        }
    }

    // Edges, keyed by sorted vertex pair.
    std::map<std::pair<int, int>, int> edge_index;
    tri_edges_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = triangles_[t];
        for (int i = 0; i < 3; ++i) {
            int a = tri[(i + 1) % 3];
            int b = tri[(i + 2) % 3];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, edge_count());
            if (inserted) {
                Edge e;
                e.v = {key.first, key.second};
                e.tri = {t, -1};
                edges_.push_back(e);
            } else {
                Edge& e = edges_[it->second];
                if (e.tri[1] >= 0) {
                    throw MeshError("non-manifold edge " + describe_edge(key.first, key.second) +
                                    " shared by more than two triangles");
                }
                // A shared edge must be traversed in opposite directions.
                if (traverses(triangles_[e.tri[0]], a, b)) {
                    throw MeshError("inconsistent orientation across edge " + describe_edge(a, b));
                }
                e.tri[1] = t;
            }
            tri_edges_[t][i] = it->second;
        }
    }

    vertex_edges_.assign(nv, {});
    for (int e = 0; e < edge_count(); ++e) {
        vertex_edges_[edges_[e].v[0]].push_back(e);
        vertex_edges_[edges_[e].v[1]].push_back(e);
    }
    for (int v = 0; v < nv; ++v) {
        if (vertex_edges_[v].empty()) {
            throw MeshError("vertex " + std::to_string(v) + " is not referenced by any triangle");
        }
    }

    // Element geometry.
    normals_.resize(nt);
    areas_.resize(nt);
    hat_grads_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = triangles_[t];
        const Vec3& p0 = vertices_[tri[0]];
        const Vec3& p1 = vertices_[tri[1]];
        const Vec3& p2 = vertices_[tri[2]];
        const Vec3 cross = (p1 - p0).cross(p2 - p0);
        const double twice_area = cross.norm();
        const double scale = std::max({(p1 - p0).squaredNorm(), (p2 - p0).squaredNorm(), 1e-300});
        if (!(twice_area > 1e-14 * scale)) {
            throw MeshError("degenerate (zero-area) triangle " + std::to_string(t));
        }
        const Vec3 n = cross / twice_area;
        normals_[t] = n;
        areas_[t] = 0.5 * twice_area;
        for (int i = 0; i < 3; ++i) {
            const Vec3& a = vertices_[tri[(i + 1) % 3]];
            const Vec3& b = vertices_[tri[(i + 2) % 3]];
            hat_grads_[t][i] = n.cross(b - a) / twice_area;
        }
    }

    // Boundary loops: follow boundary edges in the direction their triangle
    // traverses them, which keeps the surface on the left.
    boundary_vertex_.assign(nv, 0);
    std::vector<int> next_edge_from(nv, -1);
    std::vector<int> directed_to(edge_count(), -1);
    for (int e = 0; e < edge_count(); ++e) {
        const Edge& edge = edges_[e];
        if (!edge.is_boundary()) {
            continue;
        }
        int a = edge.v[0];
        int b = edge.v[1];
        if (!traverses(triangles_[edge.tri[0]], a, b)) {
            std::swap(a, b);
        }
        if (next_edge_from[a] >= 0) {
            throw MeshError("boundary is non-manifold at vertex " + std::to_string(a));
        }
        next_edge_from[a] = e;
        directed_to[e] = b;
        boundary_vertex_[a] = 1;
        boundary_vertex_[b] = 1;
    }
    std::vector<char> used(edge_count(), 0);
    for (int v = 0; v < nv; ++v) {
        const int start_edge = next_edge_from[v];
        if (start_edge < 0 || used[start_edge]) {
            continue;
        }
        BoundaryLoop loop;
        int cur = v;
        int e = start_edge;
        while (!used[e]) {
            used[e] = 1;
            loop.vertices.push_back(cur);
            loop.edges.push_back(e);
            loop.length += edge_length(e);
            cur = directed_to[e];
            e = next_edge_from[cur];
            if (e < 0) {
                throw MeshError("open boundary chain at vertex " + std::to_string(cur));
            }
        }
        if (cur != v) {
            throw MeshError("boundary chain does not close at vertex " + std::to_string(v));
        }
        loops_.push_back(std::move(loop));
    }
    std::stable_sort(loops_.begin(), loops_.end(),
                     [](const BoundaryLoop& a, const BoundaryLoop& b) { return a.length > b.length; });
}

Vec3 SurfaceMesh::centroid(int t) const {
    const auto& tri = triangles_[t];
    return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

double SurfaceMesh::edge_length(int e) const {
    return (vertices_[edges_[e].v[0]] - vertices_[edges_[e].v[1]]).norm();
}

double SurfaceMesh::diameter(int t) const {
    double d = 0.0;
    for (int e : tri_edges_[t]) {
        d = std::max(d, edge_length(e));
    }
    return d;
}

int SurfaceMesh::boundary_edge_count() const {
    return static_cast<int>(
        std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_boundary(); }));
}

int SurfaceMesh::euler_characteristic() const {
    return vertex_count() - edge_count() + triangle_count();
}

double SurfaceMesh::total_area() const {
    double a = 0.0;
    for (double x : areas_) {
        a += x;
    }
    return a;
}

double SurfaceMesh::min_edge_length() const {
    double h = std::numeric_limits<double>::infinity();
    for (int e = 0; e < edge_count(); ++e) {
        h = std::min(h, edge_length(e));
    }
    return h;
}

double SurfaceMesh::max_edge_length() const {
    double h = 0.0;
    for (int e = 0; e < edge_count(); ++e) {
        h = std::max(h, edge_length(e));
    }
    return h;
}

Vec3 SurfaceMesh::boundary_outward_normal(int e) const {
    const Edge& edge = edges_[e];
    const int t = edge.tri[0];
    int a = edge.v[0];
    int b = edge.v[1];
    if (!traverses(triangles_[t], a, b)) {
        std::swap(a, b);
    }
    const Vec3 dir = (vertices_[b] - vertices_[a]).normalized();
    return dir.cross(normals_[t]);
}

int SurfaceMesh::find_edge(int a, int b) const {
    for (int e : vertex_edges_[a]) {
        const Edge& edge = edges_[e];
        if ((edge.v[0] == a && edge.v[1] == b) || (edge.v[0] == b && edge.v[1] == a)) {
            return e;
        }
    }
    return -1;
}

const std::vector<BoundaryLoop>& boundary_loops(const SurfaceMesh& mesh) {
    return mesh.boundary_loops();
}

std::vector<double> angle_defects(const SurfaceMesh& mesh) {
    std::vector<double> defect(mesh.vertex_count(), 0.0);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        defect[v] = mesh.is_boundary_vertex(v) ? std::numbers::pi : 2.0 * std::numbers::pi;
    }
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangle(t);
        for (int i = 0; i < 3; ++i) {
            const Vec3 u = mesh.vertex(tri[(i + 1) % 3]) - mesh.vertex(tri[i]);
            const Vec3 w = mesh.vertex(tri[(i + 2) % 3]) - mesh.vertex(tri[i]);
            defect[tri[i]] -= std::atan2(u.cross(w).norm(), u.dot(w));
        }
    }
    return defect;
}

std::vector<double> gaussian_curvature_p1(const SurfaceMesh& mesh) {
    std::vector<double> kappa = angle_defects(mesh);
    std::vector<double> mixed_area(mesh.vertex_count(), 0.0);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        for (int v : mesh.triangle(t)) {
            mixed_area[v] += mesh.area(t) / 3.0;
        }
    }
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        kappa[v] /= mixed_area[v];
    }
    return kappa;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

struct RawMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
};

// Makes every connected component consistently oriented by whole-component
// flips only. Closed components are turned outward (positive signed volume).
void orient_components(RawMesh& raw) {
    const int nt = static_cast<int>(raw.triangles.size());
    std::map<std::pair<int, int>, std::vector<int>> by_edge;
    for (int t = 0; t < nt; ++t) {
        for (int i = 0; i < 3; ++i) {
            const int a = raw.triangles[t][i];
            const int b = raw.triangles[t][(i + 1) % 3];
            auto& list = by_edge[std::minmax(a, b)];
            list.push_back(t);
            if (list.size() > 2) {
                throw MeshError("non-manifold edge " + describe_edge(std::min(a, b), std::max(a, b)) +
                                " shared by more than two triangles");
            }
        }
    }
    std::vector<int> component(nt, -1);
    int n_components = 0;
    for (int seed = 0; seed < nt; ++seed) {
        if (component[seed] >= 0) {
            continue;
        }
        std::vector<int> stack{seed};
        component[seed] = n_components;
        std::vector<int> members;
        bool closed = true;
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            members.push_back(t);
            const auto& tri = raw.triangles[t];
            for (int i = 0; i < 3; ++i) {
                const int a = tri[i];
                const int b = tri[(i + 1) % 3];
                const auto& list = by_edge[std::minmax(a, b)];
                if (list.size() == 1) {
                    closed = false;
                    continue;
                }
                const int other = list[0] == t ? list[1] : list[0];
                if (traverses(raw.triangles[other], a, b)) {
                    throw MeshError("inconsistent orientation across edge " + describe_edge(a, b) +
                                    " cannot be repaired by a component flip");
                }
                if (component[other] < 0) {
                    component[other] = n_components;
                    stack.push_back(other);
                }
            }
        }
        if (closed) {
            double volume = 0.0;
            for (int t : members) {
                const auto& tri = raw.triangles[t];
                volume += raw.vertices[tri[0]].dot(raw.vertices[tri[1]].cross(raw.vertices[tri[2]]));
            }
            if (volume < 0.0) {
                for (int t : members) {
                    std::swap(raw.triangles[t][1], raw.triangles[t][2]);
                }
            }
        }
        ++n_components;
    }
}

SurfaceMesh finish(RawMesh raw) {
    if (raw.triangles.empty()) {
        throw MeshError("mesh contains no triangles");
    }
    orient_components(raw);
    return SurfaceMesh(std::move(raw.vertices), std::move(raw.triangles));
}

// Tokenizer for OFF that strips '#' comments and tracks line numbers.
class OffReader {
public:
    explicit OffReader(std::string_view text) : in_(std::string(text)) {}

    bool next(std::string& token) {
        while (!(line_ >> token)) {
            std::string raw;
            if (!std::getline(in_, raw)) {
                return false;
            }
            ++line_no_;
            if (auto hash = raw.find('#'); hash != std::string::npos) {
                raw.erase(hash);
            }
            line_.clear();
            line_.str(raw);
        }
        return true;
    }

    template <class T>
    T read(const char* what) {
        std::string token;
        if (!next(token)) {
            throw MeshError(std::string("OFF: unexpected end of file while reading ") + what);
        }
        std::istringstream ss(token);
        T value{};
        if (!(ss >> value) || !ss.eof()) {
            throw MeshError("OFF line " + std::to_string(line_no_) + ": cannot parse " + what + " from '" +
                            token + "'");
        }
        return value;
    }

    [[nodiscard]] int line() const { return line_no_; }

private:
    std::istringstream in_;
    std::istringstream line_;
    int line_no_ = 0;
};

} // namespace

SurfaceMesh parse_off(std::string_view text) {
    OffReader reader(text);
    std::string header;
    if (!reader.next(header)) {
        throw MeshError("OFF: empty file");
    }
    int nv = 0;
    if (header == "OFF") {
        nv = reader.read<int>("vertex count");
    } else if (header.rfind("OFF", 0) == 0) {
        throw MeshError("OFF: unsupported header '" + header + "'");
    } else {
        // Header and counts on one line without the keyword is not OFF.
        throw MeshError("OFF: missing 'OFF' header");
    }
    const int nf = reader.read<int>("face count");
    (void)reader.read<int>("edge count");
    if (nv < 0 || nf < 0) {
        throw MeshError("OFF: negative element counts");
    }
    RawMesh raw;
    raw.vertices.reserve(nv);
    for (int i = 0; i < nv; ++i) {
        const double x = reader.read<double>("vertex coordinate");
        const double y = reader.read<double>("vertex coordinate");
        const double z = reader.read<double>("vertex coordinate");
        raw.vertices.emplace_back(x, y, z);
    }
    for (int f = 0; f < nf; ++f) {
        const int k = reader.read<int>("face size");
        if (k != 3) {
            throw MeshError("OFF line " + std::to_string(reader.line()) + ": face with " + std::to_string(k) +
                            " vertices; only triangles are supported");
        }
        std::array<int, 3> tri{};
        for (int& v : tri) {
            v = reader.read<int>("face index");
            if (v < 0 || v >= nv) {
                throw MeshError("OFF line " + std::to_string(reader.line()) + ": face index out of range");
            }
        }
        raw.triangles.push_back(tri);
    }
    return finish(std::move(raw));
}

SurfaceMesh parse_obj(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    RawMesh raw;
    int line_no = 0;
    std::vector<std::array<int, 3>> faces_1based;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) {
            continue;
        }
        if (tag == "v") {
            double x = 0.0;
            double y = 0.0;
            double z = 0.0;
            if (!(ls >> x >> y >> z)) {
                throw MeshError("OBJ line " + std::to_string(line_no) + ": malformed vertex");
            }
            raw.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                // v, v/vt, v//vn, v/vt/vn: only the position index matters.
                const std::string head = tok.substr(0, tok.find('/'));
                try {
                    std::size_t used = 0;
                    const int i = std::stoi(head, &used);
                    if (used != head.size()) {
                        throw std::invalid_argument(head);
                    }
                    idx.push_back(i);
                } catch (const std::exception&) {
                    throw MeshError("OBJ line " + std::to_string(line_no) + ": bad face index '" + tok + "'");
                }
            }
            if (idx.size() != 3) {
                throw MeshError("OBJ line " + std::to_string(line_no) + ": only triangular faces are supported");
            }
            std::array<int, 3> tri{};
            for (int k = 0; k < 3; ++k) {
                const int i = idx[k];
                // Negative indices are relative to the current vertex count.
                tri[k] = i > 0 ? i - 1 : static_cast<int>(raw.vertices.size()) + i;
                if (i == 0 || tri[k] < 0) {
                    throw MeshError("OBJ line " + std::to_string(line_no) + ": face index out of range");
                }
            }
            faces_1based.push_back(tri);
        }
        // vt, vn, g, o, s, usemtl, mtllib: ignored
    }
    for (const auto& tri : faces_1based) {
        for (int v : tri) {
            if (v >= static_cast<int>(raw.vertices.size())) {
                throw MeshError("OBJ: face index out of range");
            }
        }
    }
    raw.triangles = std::move(faces_1based);
    return finish(std::move(raw));
}

SurfaceMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MeshError("cannot open mesh file '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    return format == MeshFormat::off ? parse_off(text) : parse_obj(text);
}

SurfaceMesh load_mesh(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") {
        return load_mesh(path, MeshFormat::off);
    }
    if (ext == ".obj") {
        return load_mesh(path, MeshFormat::obj);
    }
    throw MeshError("unknown mesh extension '" + ext + "' (expected .off or .obj)");
}

void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
    std::ostringstream out;
    out.precision(17);
    if (format == MeshFormat::off) {
        out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.triangle_count() << ' ' << mesh.edge_count() << '\n';
        for (const Vec3& p : mesh.vertices()) {
            out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
        }
        for (const auto& t : mesh.triangles()) {
            out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        }
    } else {
        for (const Vec3& p : mesh.vertices()) {
            out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
        }
        for (const auto& t : mesh.triangles()) {
            out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
        }
    }
    write_file_atomic(path, out.str());
}

} // namespace surfflow
