#include "dense_oracle.hpp"

#include <cmath>
#include <numbers>

namespace surfflow::testing {

Eigen::MatrixXd to_dense(const SparseMatrix& A) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i) {
        for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
            D(i, A.col_idx()[k]) = A.values()[k];
        }
    }
    return D;
}

namespace {

// Gradients of the barycentric coordinates of triangle (a, b, c): columns of
// E (E^T E)^{-1} with E = [b - a, c - a].
Eigen::Matrix3d barycentric_gradients(const Vec3& a, const Vec3& b, const Vec3& c) {
    Eigen::Matrix<double, 3, 2> E;
    E.col(0) = b - a;
    E.col(1) = c - a;
    const Eigen::Matrix<double, 3, 2> P = E * (E.transpose() * E).inverse();
    Eigen::Matrix3d g;
    g.col(1) = P.col(0);
    g.col(2) = P.col(1);
    g.col(0) = -P.col(0) - P.col(1);
    return g;
}

Vec3 unit_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n((b - a).y() * (c - a).z() - (b - a).z() * (c - a).y(),
                 (b - a).z() * (c - a).x() - (b - a).x() * (c - a).z(),
                 (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    return n / n.norm();
}

double tri_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    // Heron
    const double x = (b - a).norm(), y = (c - b).norm(), z = (a - c).norm();
    const double s = 0.5 * (x + y + z);
    return std::sqrt(std::max(0.0, s * (s - x) * (s - y) * (s - z)));
}

Vec3 rotate(const Vec3& n, const Vec3& v) {
    return Vec3(n.y() * v.z() - n.z() * v.y(), n.z() * v.x() - n.x() * v.z(), n.x() * v.y() - n.y() * v.x());
}

// Solves A x = b subject to x_fixed = 0 and optionally w^T x = 0.
Eigen::MatrixXd constrained_system(const Eigen::MatrixXd& A, const std::vector<int>& free, const Eigen::VectorXd* w) {
    const int n = static_cast<int>(free.size());
    const int m = n + (w ? 1 : 0);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            S(i, j) = A(free[i], free[j]);
        }
        if (w) {
            S(i, n) = (*w)[free[i]];
            S(n, i) = (*w)[free[i]];
        }
    }
    return S;
}

} // namespace

Eigen::MatrixXd dense_cr_gradient(const SurfaceMesh& mesh) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3 * mesh.triangle_count(), mesh.edge_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangle(t);
        const Vec3 p[3] = {mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])};
        // midpoints m_i opposite vertex i; a linear function with value 1 at
        // m_i and 0 at the others has gradient equal to the barycentric
        // gradient of the midpoint triangle
        const Vec3 m[3] = {0.5 * (p[1] + p[2]), 0.5 * (p[2] + p[0]), 0.5 * (p[0] + p[1])};
        const auto g = barycentric_gradients(m[0], m[1], m[2]);
        for (int i = 0; i < 3; ++i) {
            const int e = mesh.find_edge(tri[(i + 1) % 3], tri[(i + 2) % 3]);
            G.block(3 * t, e, 3, 1) += g.col(i);
        }
    }
    return G;
}

DenseScheme::DenseScheme(const SurfaceMesh& mesh, const HarmonicBasis& basis, double nu, double dt,
                         const std::vector<Vec3>& force)
    : nv_(mesh.vertex_count()), nt_(mesh.triangle_count()), nu_(nu), dt_(dt), closed_(mesh.is_closed()) {
    area3_.resize(3 * nt_);
    grad_ = Eigen::MatrixXd::Zero(3 * nt_, nv_);
    rot_ = Eigen::MatrixXd::Zero(3 * nt_, nv_);
    normal_.resize(nt_, 3);
    mass_ = Eigen::MatrixXd::Zero(nv_, nv_);
    vmean_ = Eigen::MatrixXd::Zero(nt_, nv_);
    force_ = Eigen::VectorXd::Zero(3 * nt_);
    Eigen::VectorXd angle_sum = Eigen::VectorXd::Zero(nv_);
    Eigen::VectorXd third_area = Eigen::VectorXd::Zero(nv_);
    std::vector<char> boundary(nv_, 0);
    for (const auto& e : mesh.edges()) {
        if (e.tri[1] < 0) {
            boundary[e.v[0]] = boundary[e.v[1]] = 1;
        }
    }
    for (int t = 0; t < nt_; ++t) {
        const auto& tri = mesh.triangle(t);
        const Vec3 p[3] = {mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])};
        const double a = tri_area(p[0], p[1], p[2]);
        const Vec3 n = unit_normal(p[0], p[1], p[2]);
        normal_.row(t) = n.transpose();
        area3_.segment(3 * t, 3).setConstant(a);
        const auto g = barycentric_gradients(p[0], p[1], p[2]);
        for (int i = 0; i < 3; ++i) {
            grad_.block(3 * t, tri[i], 3, 1) += g.col(i);
            rot_.block(3 * t, tri[i], 3, 1) -= rotate(n, g.col(i));
            vmean_(t, tri[i]) += 1.0 / 3.0;
            // edge-midpoint rule: hat values are 1/2 at the two adjacent midpoints
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) {
                    const double phi_i = (i == k) ? 0.0 : 0.5; // midpoint opposite vertex k
                    const double phi_j = (j == k) ? 0.0 : 0.5;
                    s += phi_i * phi_j;
                }
                mass_(tri[i], tri[j]) += a / 3.0 * s;
            }
            const Vec3 u = p[(i + 1) % 3] - p[i];
            const Vec3 v = p[(i + 2) % 3] - p[i];
            angle_sum[tri[i]] += std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
            third_area[tri[i]] += a / 3.0;
        }
        if (!force.empty()) {
            force_.segment(3 * t, 3) = force[t] - force[t].dot(n) * n;
        }
    }
    kappa_.resize(nv_);
    for (int v = 0; v < nv_; ++v) {
        const double full = boundary[v] ? std::numbers::pi : 2.0 * std::numbers::pi;
        kappa_[v] = (full - angle_sum[v]) / third_area[v];
    }
    H_ = Eigen::MatrixXd::Zero(3 * nt_, basis.size());
    for (int i = 0; i < basis.size(); ++i) {
        for (int t = 0; t < nt_; ++t) {
            H_.block(3 * t, i, 3, 1) = basis.fields[i][t];
        }
    }
    for (int v = 0; v < nv_; ++v) {
        if (!boundary[v]) {
            interior_.push_back(v);
        }
    }
    const Eigen::MatrixXd K = rot_.transpose() * area3_.asDiagonal() * rot_;
    const Eigen::VectorXd w = mass_.rowwise().sum();
    stream_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(constrained_system(K, interior_, closed_ ? &w : nullptr));
    mass_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(mass_);
}

Eigen::VectorXd DenseScheme::solve_stream(const Eigen::VectorXd& rhs) const {
    const int n = static_cast<int>(interior_.size());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + (closed_ ? 1 : 0));
    for (int i = 0; i < n; ++i) {
        b[i] = rhs[interior_[i]];
    }
    const Eigen::VectorXd x = stream_lu_.solve(b);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nv_);
    for (int i = 0; i < n; ++i) {
        out[interior_[i]] = x[i];
    }
    return out;
}

Eigen::VectorXd DenseScheme::solve_mass(const Eigen::VectorXd& rhs) const { return mass_lu_.solve(rhs); }

Eigen::VectorXd DenseScheme::velocity(const State& s) const { return rot_ * s.psi + H_ * s.h; }

Eigen::VectorXd DenseScheme::omega_jv(const Eigen::VectorXd& omega, const Eigen::VectorXd& V) const {
    const Eigen::VectorXd wbar = vmean_ * omega;
    Eigen::VectorXd out(3 * nt_);
    for (int t = 0; t < nt_; ++t) {
        out.segment(3 * t, 3) = wbar[t] * rotate(normal_.row(t).transpose(), V.segment(3 * t, 3));
    }
    return out;
}

DenseScheme::State DenseScheme::ns_init(const std::vector<Vec3>& V0) const {
    Eigen::VectorXd X(3 * nt_);
    for (int t = 0; t < nt_; ++t) {
        X.segment(3 * t, 3) = V0[t];
    }
    State s;
    s.psi = solve_stream(rot_.transpose() * area3_.asDiagonal() * X);
    s.h = H_.transpose() * area3_.asDiagonal() * X;
    s.omega = solve_mass(rot_.transpose() * area3_.asDiagonal() * velocity(s));
    return s;
}

DenseScheme::State DenseScheme::euler_init(const Eigen::VectorXd& h0, const Eigen::VectorXd& omega0) const {
    State s;
    s.h = h0;
    s.omega = omega0;
    s.psi = solve_stream(mass_ * omega0);
    return s;
}

DenseScheme::State DenseScheme::ns_step(const State& s) const {
    const Eigen::VectorXd V = velocity(s);
    const Eigen::VectorXd kbar = vmean_ * kappa_;
    Eigen::VectorXd G = force_ - omega_jv(s.omega, V) - nu_ * (rot_ * s.omega);
    for (int t = 0; t < nt_; ++t) {
        G.segment(3 * t, 3) += 2.0 * nu_ * kbar[t] * V.segment(3 * t, 3);
    }
    const Eigen::VectorXd AG = area3_.asDiagonal() * G;
    State n;
    n.psi = solve_stream(mass_ * s.omega + dt_ * rot_.transpose() * AG);
    n.h = s.h + dt_ * H_.transpose() * AG;
    n.omega = solve_mass(rot_.transpose() * area3_.asDiagonal() * velocity(n));
    return n;
}

DenseScheme::State DenseScheme::euler_step(const State& s) const {
    const Eigen::VectorXd V = velocity(s);
    const Eigen::VectorXd gw = grad_ * s.omega;
    Eigen::VectorXd adv = Eigen::VectorXd::Zero(nv_);
    for (int t = 0; t < nt_; ++t) {
        const double a = area3_[3 * t] * V.segment(3 * t, 3).dot(gw.segment(3 * t, 3));
        // edge-midpoint rule on (const) x (hat) gives a / 3 per vertex
        for (int v = 0; v < nv_; ++v) {
            if (vmean_(t, v) != 0.0) {
                adv[v] += a / 3.0;
            }
        }
    }
    State n;
    n.omega = solve_mass(mass_ * s.omega + dt_ * (rot_.transpose() * area3_.asDiagonal() * force_ - adv));
    const Eigen::VectorXd G = force_ - omega_jv(s.omega, V);
    n.h = s.h + dt_ * H_.transpose() * area3_.asDiagonal() * G;
    n.psi = solve_stream(mass_ * n.omega);
    return n;
}

} // namespace surfflow::testing
