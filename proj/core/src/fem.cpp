#include "surfflow/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "surfflow/errors.hpp"

namespace surfflow {

FieldP0Vec operator+(const FieldP0Vec& a, const FieldP0Vec& b) {
    FieldP0Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        c[i] = a[i] + b[i];
    }
    return c;
}

FieldP0Vec operator-(const FieldP0Vec& a, const FieldP0Vec& b) {
    FieldP0Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        c[i] = a[i] - b[i];
    }
    return c;
}

FieldP0Vec operator*(double s, const FieldP0Vec& a) {
    FieldP0Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        c[i] = s * a[i];
    }
    return c;
}

void axpy(double alpha, const FieldP0Vec& x, FieldP0Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

std::array<Vec3, 3> cr_gradients(const SurfaceMesh& mesh, int t) {
    // CR basis of the edge opposite vertex i is 1 - 2 lambda_i.
    const auto& g = mesh.hat_gradients(t);
    return {-2.0 * g[0], -2.0 * g[1], -2.0 * g[2]};
}

FieldP0Vec grad_h_p1(const SurfaceMesh& mesh, const FieldP1& f) {
    FieldP0Vec out(mesh.triangle_count(), Vec3::Zero());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangle(t);
        const auto& g = mesh.hat_gradients(t);
        out[t] = f[tri[0]] * g[0] + f[tri[1]] * g[1] + f[tri[2]] * g[2];
    }
    return out;
}

FieldP0Vec grad_h_cr(const SurfaceMesh& mesh, const FieldCR& q) {
    FieldP0Vec out(mesh.triangle_count(), Vec3::Zero());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& te = mesh.triangle_edges(t);
        const auto g = cr_gradients(mesh, t);
        out[t] = q[te[0]] * g[0] + q[te[1]] * g[1] + q[te[2]] * g[2];
    }
    return out;
}

FieldP0Vec j_h(const SurfaceMesh& mesh, const FieldP0Vec& X) {
    FieldP0Vec out(X.size());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        out[t] = mesh.normal(t).cross(X[t]);
    }
    return out;
}

FieldP0Vec rot_h(const SurfaceMesh& mesh, const FieldP1& f) { return -1.0 * j_h(mesh, grad_h_p1(mesh, f)); }

FieldP0Vec rot_h(const SurfaceMesh& mesh, const FieldCR& q) { return -1.0 * j_h(mesh, grad_h_cr(mesh, q)); }

SparseMatrix mass_p1(const SurfaceMesh& mesh, bool lumped) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        const auto& tri = mesh.triangle(k);
        const double a = mesh.area(k);
        for (int i = 0; i < 3; ++i) {
            if (lumped) {
                t.push_back({tri[i], tri[i], a / 3.0});
                continue;
            }
            for (int j = 0; j < 3; ++j) {
                t.push_back({tri[i], tri[j], (i == j ? 2.0 : 1.0) * a / 12.0});
            }
        }
    }
    return assemble(t, mesh.vertex_count(), mesh.vertex_count());
}

SparseMatrix weighted_stiffness_p1(const SurfaceMesh& mesh, std::span<const double> element_scale) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        const double s = element_scale.empty() ? 1.0 : element_scale[k];
        if (s == 0.0) {
            continue;
        }
        const auto& tri = mesh.triangle(k);
        const auto& g = mesh.hat_gradients(k);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                t.push_back({tri[i], tri[j], s * mesh.area(k) * g[i].dot(g[j])});
            }
        }
    }
    return assemble(t, mesh.vertex_count(), mesh.vertex_count());
}

SparseMatrix stiffness_p1(const SurfaceMesh& mesh) { return weighted_stiffness_p1(mesh, {}); }

SparseMatrix stiffness_cr(const SurfaceMesh& mesh) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        const auto& te = mesh.triangle_edges(k);
        const auto g = cr_gradients(mesh, k);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                t.push_back({te[i], te[j], mesh.area(k) * g[i].dot(g[j])});
            }
        }
    }
    return assemble(t, mesh.edge_count(), mesh.edge_count());
}

SparseMatrix rotrot_p1(const SurfaceMesh& mesh) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        const auto& tri = mesh.triangle(k);
        const auto& g = mesh.hat_gradients(k);
        const Vec3& n = mesh.normal(k);
        std::array<Vec3, 3> r;
        for (int i = 0; i < 3; ++i) {
            r[i] = -n.cross(g[i]);
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                t.push_back({tri[i], tri[j], mesh.area(k) * r[i].dot(r[j])});
            }
        }
    }
    return assemble(t, mesh.vertex_count(), mesh.vertex_count());
}

SparseMatrix rotrot_s10(const SurfaceMesh& mesh) {
    std::vector<int> keep;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (!mesh.is_boundary_vertex(v)) {
            keep.push_back(v);
        }
    }
    return rotrot_p1(mesh).submatrix(keep, keep);
}

std::vector<double> p1_weights(const SurfaceMesh& mesh) {
    std::vector<double> w(mesh.vertex_count(), 0.0);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        for (int v : mesh.triangle(k)) {
            w[v] += mesh.area(k) / 3.0;
        }
    }
    return w;
}

std::vector<double> cr_weights(const SurfaceMesh& mesh) {
    std::vector<double> w(mesh.edge_count(), 0.0);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        for (int e : mesh.triangle_edges(k)) {
            w[e] += mesh.area(k) / 3.0;
        }
    }
    return w;
}

double inner_vec(const SurfaceMesh& mesh, const FieldP0Vec& X, const FieldP0Vec& Y) {
    double s = 0.0;
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        s += mesh.area(k) * X[k].dot(Y[k]);
    }
    return s;
}

double norm_vec(const SurfaceMesh& mesh, const FieldP0Vec& X) { return std::sqrt(inner_vec(mesh, X, X)); }

std::vector<double> element_means(const SurfaceMesh& mesh, const FieldP1& w) {
    std::vector<double> m(mesh.triangle_count());
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        const auto& tri = mesh.triangle(k);
        m[k] = (w[tri[0]] + w[tri[1]] + w[tri[2]]) / 3.0;
    }
    return m;
}

double weighted_vec_form(const SurfaceMesh& mesh, const FieldP1& w, const FieldP0Vec& X, const FieldP0Vec& Y) {
    const auto m = element_means(mesh, w);
    double s = 0.0;
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        s += mesh.area(k) * m[k] * X[k].dot(Y[k]);
    }
    return s;
}

std::vector<double> advection_p0(const SurfaceMesh& mesh, const FieldP0Vec& V, const FieldP1& w) {
    const auto g = grad_h_p1(mesh, w);
    std::vector<double> a(mesh.triangle_count());
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        a[k] = V[k].dot(g[k]);
    }
    return a;
}

std::vector<double> rot_weak_p1(const SurfaceMesh& mesh, const FieldP0Vec& G) {
    // (G, -N x grad phi) = (N x G, grad phi)
    std::vector<double> out(mesh.vertex_count(), 0.0);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        const auto& tri = mesh.triangle(k);
        const auto& g = mesh.hat_gradients(k);
        const Vec3 jg = mesh.normal(k).cross(G[k]);
        for (int i = 0; i < 3; ++i) {
            out[tri[i]] += mesh.area(k) * jg.dot(g[i]);
        }
    }
    return out;
}

std::vector<double> grad_weak_p1(const SurfaceMesh& mesh, const FieldP0Vec& G) {
    std::vector<double> out(mesh.vertex_count(), 0.0);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        const auto& tri = mesh.triangle(k);
        const auto& g = mesh.hat_gradients(k);
        for (int i = 0; i < 3; ++i) {
            out[tri[i]] += mesh.area(k) * G[k].dot(g[i]);
        }
    }
    return out;
}

std::vector<double> grad_weak_cr(const SurfaceMesh& mesh, const FieldP0Vec& G) {
    std::vector<double> out(mesh.edge_count(), 0.0);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        const auto& te = mesh.triangle_edges(k);
        const auto g = cr_gradients(mesh, k);
        for (int i = 0; i < 3; ++i) {
            out[te[i]] += mesh.area(k) * G[k].dot(g[i]);
        }
    }
    return out;
}

std::vector<double> load_p1(const SurfaceMesh& mesh, std::span<const double> element_values) {
    std::vector<double> out(mesh.vertex_count(), 0.0);
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        for (int v : mesh.triangle(k)) {
            out[v] += element_values[k] * mesh.area(k) / 3.0;
        }
    }
    return out;
}

FieldCR p1_to_cr(const SurfaceMesh& mesh, const FieldP1& f) {
    FieldCR q(mesh.edge_count());
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto& v = mesh.edge(e).v;
        q[e] = 0.5 * (f[v[0]] + f[v[1]]);
    }
    return q;
}

FieldP1 cr_to_p1_average(const SurfaceMesh& mesh, const FieldCR& q) {
    FieldP1 f(mesh.vertex_count(), 0.0);
    std::vector<int> count(mesh.vertex_count(), 0);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        for (int v : mesh.edge(e).v) {
            f[v] += q[e];
            ++count[v];
        }
    }
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        f[v] /= std::max(count[v], 1);
    }
    return f;
}

FieldP0Vec project_tangent(const SurfaceMesh& mesh, const FieldP0Vec& X) {
    FieldP0Vec out(X.size());
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        const Vec3& n = mesh.normal(k);
        out[k] = X[k] - n.dot(X[k]) * n;
    }
    return out;
}

double tangential_defect(const SurfaceMesh& mesh, const FieldP0Vec& X) {
    double d = 0.0;
    for (int k = 0; k < mesh.triangle_count(); ++k) {
        d = std::max(d, std::abs(mesh.normal(k).dot(X[k])) / std::max(1.0, X[k].norm()));
    }
    return d;
}

double mean_p1(const SurfaceMesh& mesh, const FieldP1& f) {
    const auto w = p1_weights(mesh);
    return dot(w, f.values()) / mesh.total_area();
}

int ScalarSpace::free_count() const {
    return static_cast<int>(std::count(fixed.begin(), fixed.end(), 0));
}

DiscreteSpaces homogeneous_spaces(const SurfaceMesh& mesh) {
    DiscreteSpaces s;
    s.stream.fixed.assign(mesh.vertex_count(), 0);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        s.stream.fixed[v] = mesh.is_boundary_vertex(v) ? 1 : 0;
    }
    s.stream.zero_mean = mesh.is_closed();
    s.vorticity.fixed.assign(mesh.vertex_count(), 0);
    s.vorticity.zero_mean = false;
    s.potential.fixed.assign(mesh.edge_count(), 0);
    s.potential.zero_mean = true;
    return s;
}

} // namespace surfflow
