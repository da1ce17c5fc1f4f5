#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "dense_oracle.hpp"
#include "fixtures.hpp"
#include "surfflow/errors.hpp"
#include "surfflow/fem.hpp"
#include "surfflow/linalg.hpp"

using namespace surfflow;
using namespace surfflow::testing;

TEST_CASE("assemble sums duplicates") {
    const std::vector<Triplet> t = {{0, 0, 1.0}, {0, 0, 2.0}};
    const auto A = assemble(t, 1, 1);
    CHECK(A.nnz() == 1);
    CHECK(A.at(0, 0) == 3.0);
}

TEST_CASE("assemble empty and out of range") {
    const auto A = assemble({}, 2, 2);
    CHECK(A.rows() == 2);
    CHECK(A.nnz() == 0);
    CHECK(A.at(1, 1) == 0.0);
    const std::vector<Triplet> bad = {{2, 0, 1.0}};
    CHECK_THROWS_AS(assemble(bad, 2, 2), SolverError);
}

TEST_CASE("CSR columns strictly increasing") {
    const auto K = stiffness_p1(unit_square(4));
    for (int i = 0; i < K.rows(); ++i) {
        for (int k = K.row_ptr()[i] + 1; k < K.row_ptr()[i + 1]; ++k) {
            CHECK(K.col_idx()[k - 1] < K.col_idx()[k]);
        }
    }
    CHECK(K.is_symmetric());
}

TEST_CASE("reference triangle stiffness annihilates constants") {
    const auto K = stiffness_p1(reference_triangle());
    for (double s : K.row_sums()) {
        CHECK(std::abs(s) < 1e-15);
    }
}

TEST_CASE("cg on identity and 2x2") {
    const auto I = identity_matrix(3);
    const std::vector<double> b = {1, 2, 3};
    const auto r = cg_solve(I, b, {});
    CHECK(r.report.iterations <= 1);
    for (int i = 0; i < 3; ++i) {
        CHECK(r.x[i] == doctest::Approx(b[i]));
    }

    const std::vector<Triplet> t = {{0, 0, 4}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}};
    const auto A = assemble(t, 2, 2);
    const std::vector<double> b2 = {1, 2};
    for (auto pc : {Preconditioner::none, Preconditioner::jacobi}) {
        CgOptions o;
        o.precond = pc;
        const auto s = cg_solve(A, b2, {}, o);
        CHECK(s.report.converged);
        CHECK(s.x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
        CHECK(s.x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-12));
    }
}

TEST_CASE("Dirichlet Laplacian on the unit square matches a dense solve") {
    const auto m = unit_square(2);
    const auto K = stiffness_p1(m);
    const auto b = load_p1(m, std::vector<double>(m.triangle_count(), 1.0));
    std::vector<int> interior;
    for (int v = 0; v < m.vertex_count(); ++v) {
        if (!m.is_boundary_vertex(v)) {
            interior.push_back(v);
        }
    }
    const auto Ki = K.submatrix(interior, interior);
    std::vector<double> bi;
    for (int v : interior) {
        bi.push_back(b[v]);
    }
    const auto x = cg_solve(Ki, bi, {}).x;
    const Eigen::VectorXd ref = to_dense(Ki).lu().solve(Eigen::Map<const Eigen::VectorXd>(bi.data(), bi.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(x[i] - ref[i]) < 1e-10);
    }
}

TEST_CASE("randomized SPD systems match dense LU") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5 + static_cast<int>(rng() % 195);
        // sparse random B, A = B^T B + I
        std::vector<Triplet> tb;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < 3; ++k) {
                tb.push_back({i, static_cast<int>(rng() % n), u(rng)});
            }
        }
        const Eigen::MatrixXd B = to_dense(assemble(tb, n, n));
        const Eigen::MatrixXd Ad = B.transpose() * B + Eigen::MatrixXd::Identity(n, n);
        std::vector<Triplet> ta;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (Ad(i, j) != 0.0) {
                    ta.push_back({i, j, Ad(i, j)});
                }
            }
        }
        const auto A = assemble(ta, n, n);
        std::vector<double> b(n);
        for (auto& x : b) {
            x = u(rng);
        }
        const Eigen::VectorXd ref = Ad.lu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
        CgOptions tight;
        tight.tol = 1e-12;
        const auto x1 = cg_solve(A, b, {}, tight).x;
        tight.precond = Preconditioner::none;
        const auto x2 = cg_solve(A, b, {}, tight).x;
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(x1[i] - ref[i]) <= 1e-8 * ref.norm());
            CHECK(std::abs(x1[i] - x2[i]) <= 1e-8 * ref.norm());
        }
    }
}

TEST_CASE("cg reports non-convergence with the best iterate") {
    const auto K = stiffness_p1(unit_square(8));
    std::vector<int> interior;
    for (int v = 0; v < K.rows(); ++v) {
        if (K.at(v, v) > 3.9) {
            interior.push_back(v);
        }
    }
    const auto Ki = K.submatrix(interior, interior);
    std::vector<double> b(Ki.rows(), 1.0);
    CgOptions o;
    o.max_iter = 2;
    const auto r = cg_solve(Ki, b, {}, o);
    CHECK_FALSE(r.report.converged);
    CHECK(r.x.size() == b.size());
}

TEST_CASE("singular zero-mean solves") {
    const auto m = unit_square(6);
    const auto K = stiffness_cr(m);
    const auto w = cr_weights(m);
    std::vector<double> zero(K.rows(), 0.0);
    const auto x0 = solve_singular_zero_mean(K, zero, w);
    CHECK(norm_inf(x0) == 0.0);

    // manufactured q* = x - mean on the CR midpoints
    FieldP1 fx(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) {
        fx[v] = m.vertex(v).x();
    }
    auto q = p1_to_cr(m, fx);
    const double mean = dot(w, q.values()) / m.total_area();
    for (auto& v : q) {
        v -= mean;
    }
    const auto b = grad_weak_cr(m, grad_h_cr(m, q));
    CgOptions o;
    o.tol = 1e-13;
    const auto x = solve_singular_zero_mean(K, b, w, o);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(x[i] - q[i]) < 1e-8);
    }

    // rhs with a nonzero mean is projected; the result still has zero mean
    std::vector<double> ones(K.rows(), 1.0);
    auto b2 = b;
    axpy(0.3, ones, b2);
    const auto x2 = solve_singular_zero_mean(K, b2, w, o);
    CHECK(std::abs(dot(w, x2)) <= 1e-10 * norm2(x2));
}

TEST_CASE("constrained solver backends agree") {
    const auto m = small_torus(8, 6);
    const auto K = stiffness_p1(m);
    const auto w = p1_weights(m);
    std::vector<double> b(K.rows());
    for (int i = 0; i < K.rows(); ++i) {
        b[i] = std::sin(1.0 + i);
    }
    CgOptions o;
    o.tol = 1e-13;
    const ConstrainedSolver cg(K, std::vector<char>(K.rows(), 0), w, o, SolverBackend::cg);
    const ConstrainedSolver direct(K, std::vector<char>(K.rows(), 0), w, o, SolverBackend::direct);
    const auto x1 = cg.solve(b).x;
    const auto x2 = direct.solve(b).x;
    CHECK(std::abs(dot(w, x1)) < 1e-12);
    CHECK(std::abs(dot(w, x2)) < 1e-12);
    for (int i = 0; i < K.rows(); ++i) {
        CHECK(std::abs(x1[i] - x2[i]) < 1e-9);
    }

    // Dirichlet data on a square: harmonic extension of x is x
    const auto sq = unit_square(5);
    const auto Ks = stiffness_p1(sq);
    std::vector<char> fixed(sq.vertex_count());
    std::vector<double> g(sq.vertex_count());
    for (int v = 0; v < sq.vertex_count(); ++v) {
        fixed[v] = sq.is_boundary_vertex(v) ? 1 : 0;
        g[v] = sq.vertex(v).x();
    }
    for (auto be : {SolverBackend::cg, SolverBackend::direct}) {
        const ConstrainedSolver s(Ks, fixed, {}, o, be);
        const auto x = s.solve(std::vector<double>(sq.vertex_count(), 0.0), g).x;
        for (int v = 0; v < sq.vertex_count(); ++v) {
            CHECK(std::abs(x[v] - g[v]) < 1e-10);
        }
    }
    CHECK(parse_solver_backend("direct") == SolverBackend::direct);
    CHECK_THROWS(parse_solver_backend("lu"));
}

TEST_CASE("threaded matrix-vector product is identical") {
    const auto K = stiffness_p1(unit_square(160));
    std::vector<double> x(K.cols());
    for (int i = 0; i < K.cols(); ++i) {
        x[i] = std::cos(0.1 * i);
    }
    set_thread_count(1);
    const auto y1 = K * x;
    set_thread_count(4);
    const auto y4 = K * x;
    set_thread_count(1);
    CHECK(y1 == y4);
}
