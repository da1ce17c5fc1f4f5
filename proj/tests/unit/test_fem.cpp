#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "surfflow/fem.hpp"

using namespace surfflow;
using namespace surfflow::testing;

namespace {

FieldP1 sample(const SurfaceMesh& m, auto f) {
    FieldP1 out(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) {
        out[v] = f(m.vertex(v));
    }
    return out;
}

FieldP1 random_p1(const SurfaceMesh& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FieldP1 f(m.vertex_count());
    for (auto& x : f) {
        x = u(rng);
    }
    return f;
}

FieldCR random_cr(const SurfaceMesh& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FieldCR f(m.edge_count());
    for (auto& x : f) {
        x = u(rng);
    }
    return f;
}

std::vector<SurfaceMesh> test_meshes() {
    GeneratorParams p;
    p.h = 0.1;
    std::vector<SurfaceMesh> out;
    out.push_back(unit_square(4));
    out.push_back(small_disk(3));
    out.push_back(small_annulus());
    out.push_back(small_torus());
    out.push_back(icosahedron());
    out.push_back(generate_mesh(MeshKind::cylinder_lateral, p));
    out.push_back(generate_mesh(MeshKind::cylinder_with_hole, p));
    p.h = 0.04;
    out.push_back(generate_mesh(MeshKind::channel_with_hole, p));
    return out;
}

} // namespace

TEST_CASE("grad_h on P1") {
    const auto m = unit_square(3);
    for (const auto& g : grad_h_p1(m, FieldP1(m.vertex_count(), 2.5))) {
        CHECK(g.norm() < 1e-14);
    }
    for (const auto& g : grad_h_p1(m, sample(m, [](const Vec3& x) { return x.x(); }))) {
        CHECK((g - Vec3(1, 0, 0)).norm() < 1e-13);
    }
    const auto tri = reference_triangle();
    FieldP1 hat(3, 0.0);
    hat[0] = 1.0;
    CHECK(grad_h_p1(tri, hat)[0].isApprox(Vec3(-1, -1, 0)));
    CHECK(rot_h(tri, hat)[0].isApprox(Vec3(-1, 1, 0)));
}

TEST_CASE("grad_h on CR") {
    const auto m = unit_square(3);
    for (const auto& g : grad_h_cr(m, FieldCR(m.edge_count(), -1.0))) {
        CHECK(g.norm() < 1e-13);
    }
    const auto fx = sample(m, [](const Vec3& x) { return x.x(); });
    for (const auto& g : grad_h_cr(m, p1_to_cr(m, fx))) {
        CHECK((g - Vec3(1, 0, 0)).norm() < 1e-13);
    }
}

TEST_CASE("S1 in CR1: interpolated gradients agree") {
    for (const auto& m : test_meshes()) {
        const auto f = random_p1(m, 3);
        const auto a = grad_h_p1(m, f);
        const auto b = grad_h_cr(m, p1_to_cr(m, f));
        for (int t = 0; t < m.triangle_count(); ++t) {
            CHECK((a[t] - b[t]).norm() < 1e-13 * std::max(1.0, a[t].norm() / m.diameter(t)));
        }
    }
}

TEST_CASE("J_h") {
    const auto tri = reference_triangle();
    FieldP0Vec x(1, Vec3(1, 0, 0));
    CHECK(j_h(tri, x)[0].isApprox(Vec3(0, 1, 0)));
    const auto m = small_torus();
    FieldP0Vec g = grad_h_p1(m, random_p1(m, 1));
    const auto jg = j_h(m, g);
    const auto jjg = j_h(m, jg);
    for (int t = 0; t < m.triangle_count(); ++t) {
        CHECK(std::abs(jg[t].dot(g[t])) < 1e-14);
        CHECK((jjg[t] + g[t]).norm() < 1e-14);
        CHECK(jg[t].norm() == doctest::Approx(g[t].norm()));
    }
}

TEST_CASE("matrices on the reference triangle") {
    const auto tri = reference_triangle();
    const auto M = mass_p1(tri);
    for (double s : M.row_sums()) {
        CHECK(s == doctest::Approx(0.5 / 3.0));
    }
    CHECK(M.at(0, 0) == doctest::Approx(0.5 / 6.0));
    CHECK(M.at(0, 1) == doctest::Approx(0.5 / 12.0));
    const auto Ml = mass_p1(tri, true);
    CHECK(Ml.at(0, 1) == 0.0);
    CHECK(Ml.at(1, 1) == doctest::Approx(0.5 / 3.0));
    // stiffness of hat functions: [[1,-1/2,-1/2],[-1/2,1/2,0],[-1/2,0,1/2]]
    const auto K = stiffness_p1(tri);
    CHECK(K.at(0, 0) == doctest::Approx(1.0));
    CHECK(K.at(0, 1) == doctest::Approx(-0.5));
    CHECK(K.at(1, 2) == doctest::Approx(0.0));
    // CR stiffness is 4 times the hat stiffness, permuted onto edges
    const auto Kc = stiffness_cr(tri);
    const auto& te = tri.triangle_edges(0);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(Kc.at(te[i], te[j]) == doctest::Approx(4.0 * K.at(i, j)));
        }
    }
}

TEST_CASE("rotrot equals stiffness") {
    for (const auto& m : test_meshes()) {
        const auto K = stiffness_p1(m);
        const auto R = rotrot_p1(m);
        REQUIRE(K.nnz() == R.nnz());
        for (int k = 0; k < K.nnz(); ++k) {
            CHECK(std::abs(K.values()[k] - R.values()[k]) <= 1e-14 * std::max(1.0, std::abs(K.values()[k])));
        }
        std::vector<double> ones(K.cols(), 1.0);
        CHECK(norm_inf(K * ones) < 1e-12);
        const auto Rs = rotrot_s10(m);
        int interior = 0;
        for (int v = 0; v < m.vertex_count(); ++v) {
            interior += m.is_boundary_vertex(v) ? 0 : 1;
        }
        CHECK(Rs.rows() == interior);
    }
}

TEST_CASE("grad CR is orthogonal to rot S10") {
    for (const auto& m : test_meshes()) {
        for (int s = 0; s < 3; ++s) {
            const auto gq = grad_h_cr(m, random_cr(m, 10 + s));
            auto psi = random_p1(m, 20 + s);
            for (int v = 0; v < m.vertex_count(); ++v) {
                if (m.is_boundary_vertex(v)) {
                    psi[v] = 0.0;
                }
            }
            const auto rp = rot_h(m, psi);
            CHECK(std::abs(inner_vec(m, gq, rp)) <= 1e-12 * norm_vec(m, gq) * norm_vec(m, rp));
        }
    }
}

TEST_CASE("inner products") {
    const auto sq = unit_square(3);
    FieldP0Vec ex(sq.triangle_count(), Vec3(1, 0, 0));
    CHECK(inner_vec(sq, ex, ex) == doctest::Approx(1.0));
    CHECK(std::abs(inner_vec(sq, ex, j_h(sq, ex))) < 1e-15);
    CHECK(weighted_vec_form(sq, FieldP1(sq.vertex_count(), 1.0), ex, ex) == doctest::Approx(1.0));
    CHECK(weighted_vec_form(sq, FieldP1(sq.vertex_count(), 0.0), ex, ex) == 0.0);

    const auto tri = reference_triangle();
    FieldP1 hat(3, 0.0);
    hat[1] = 1.0;
    FieldP0Vec e(1, Vec3(0, 1, 0));
    CHECK(weighted_vec_form(tri, hat, e, e) == doctest::Approx(0.5 / 3.0));
}

TEST_CASE("weak adjoints match inner products") {
    const auto m = small_torus(7, 5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FieldP0Vec G(m.triangle_count());
    for (auto& g : G) {
        g = Vec3(u(rng), u(rng), u(rng));
    }
    G = project_tangent(m, G);
    CHECK(tangential_defect(m, G) < 1e-14);
    const auto f = random_p1(m, 9);
    const auto q = random_cr(m, 11);
    CHECK(dot(rot_weak_p1(m, G), f.values()) == doctest::Approx(inner_vec(m, G, rot_h(m, f))).epsilon(1e-13));
    CHECK(dot(grad_weak_p1(m, G), f.values()) == doctest::Approx(inner_vec(m, G, grad_h_p1(m, f))).epsilon(1e-13));
    CHECK(dot(grad_weak_cr(m, G), q.values()) == doctest::Approx(inner_vec(m, G, grad_h_cr(m, q))).epsilon(1e-13));
    std::vector<double> s(m.triangle_count());
    for (auto& x : s) {
        x = u(rng);
    }
    double direct = 0.0;
    const auto means = element_means(m, f);
    for (int t = 0; t < m.triangle_count(); ++t) {
        direct += s[t] * means[t] * m.area(t);
    }
    CHECK(dot(load_p1(m, s), f.values()) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("advection") {
    const auto d = small_disk(4);
    const auto m = d;
    for (double a : advection_p0(m, FieldP0Vec(m.triangle_count(), Vec3(1, 2, 0)), FieldP1(m.vertex_count(), 3.0))) {
        CHECK(std::abs(a) < 1e-13);
    }
    // radial w, velocity perpendicular to grad w
    const auto w = sample(m, [](const Vec3& x) { return x.squaredNorm(); });
    const auto V = j_h(m, grad_h_p1(m, w));
    for (double a : advection_p0(m, V, w)) {
        CHECK(std::abs(a) < 1e-12);
    }
    const auto tri = reference_triangle();
    FieldP1 f(3, 0.0);
    f[2] = 2.0;
    const auto g = grad_h_p1(tri, f);
    CHECK(advection_p0(tri, g, f)[0] == doctest::Approx(4.0));
}

TEST_CASE("weights and means") {
    const auto m = small_annulus();
    double s = 0.0;
    for (double w : p1_weights(m)) {
        s += w;
    }
    CHECK(s == doctest::Approx(m.total_area()));
    s = 0.0;
    for (double w : cr_weights(m)) {
        s += w;
    }
    CHECK(s == doctest::Approx(m.total_area()));
    CHECK(mean_p1(m, FieldP1(m.vertex_count(), 4.0)) == doctest::Approx(4.0));
    const auto back = cr_to_p1_average(m, p1_to_cr(m, FieldP1(m.vertex_count(), 2.0)));
    for (double v : back) {
        CHECK(v == doctest::Approx(2.0));
    }
}

TEST_CASE("homogeneous spaces") {
    const auto sq = unit_square(2);
    const auto s = homogeneous_spaces(sq);
    CHECK(s.stream.free_count() == 1);
    CHECK_FALSE(s.stream.zero_mean);
    CHECK(s.potential.zero_mean);
    const auto t = homogeneous_spaces(small_torus());
    CHECK(t.stream.zero_mean);
    CHECK(t.stream.free_count() == small_torus().vertex_count());
}
