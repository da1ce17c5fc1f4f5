#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "surfflow/bench.hpp"
#include "surfflow/errors.hpp"
#include "surfflow/generators.hpp"

using namespace surfflow;
using namespace surfflow::testing;

namespace {

SurfaceMesh st_mesh(double h) {
    GeneratorParams p;
    p.h = h;
    return generate_mesh(MeshKind::channel_with_hole, p);
}

FieldCR midpoint_x(const SurfaceMesh& m) {
    FieldCR p(m.edge_count());
    for (int e = 0; e < m.edge_count(); ++e) {
        p[e] = 0.5 * (m.vertex(m.edge(e).v[0]).x() + m.vertex(m.edge(e).v[1]).x());
    }
    return p;
}

ForceSeries sine_series(double f, double t_end, double dt, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-noise, noise);
    ForceSeries s;
    for (double t = 0.0; t <= t_end; t += dt) {
        s.add(t, {3.0, std::sin(2.0 * std::numbers::pi * f * t) + u(rng)});
    }
    return s;
}

// frequency of the largest periodogram peak, refined on a fine grid
double periodogram_peak(const ForceSeries& s, double t_start, double f_lo, double f_hi) {
    double best_f = f_lo, best = -1.0;
    for (double f = f_lo; f <= f_hi; f += 1e-4) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.t[i] >= t_start) {
                acc += s.cl[i] * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * f * s.t[i]));
            }
        }
        if (std::abs(acc) > best) {
            best = std::abs(acc);
            best_f = f;
        }
    }
    return best_f;
}

} // namespace

TEST_CASE("benchmark parameters") {
    const StBenchParams p;
    CHECK(p.reynolds() == doctest::Approx(100.0));
}

TEST_CASE("coefficients") {
    const StBenchParams p;
    const auto c = coefficients({0.158215, -0.0510265}, p);
    CHECK(c.drag == doctest::Approx(3.16430).epsilon(1e-12));
    CHECK(c.lift == doctest::Approx(-1.02053).epsilon(1e-12));
    const auto z = coefficients({0.0, 0.0}, p);
    CHECK(z.drag == 0.0);
    CHECK(z.lift == 0.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int k = 0; k < 50; ++k) {
        StBenchParams q;
        q.v_mean = 0.5 + std::abs(u(rng));
        q.L = 0.01 + std::abs(u(rng));
        const ForceXY f{u(rng), u(rng)};
        const auto cc = coefficients(f, q);
        CHECK(cc.drag == doctest::Approx(2.0 * f.drag / (q.v_mean * q.v_mean * q.L)));
        CHECK(cc.lift == doctest::Approx(2.0 * f.lift / (q.v_mean * q.v_mean * q.L)));
    }
}

TEST_CASE("obstacle force") {
    const auto m = st_mesh(0.02);
    const int loop = obstacle_loop(m);
    CHECK(m.boundary_loops()[loop].length == doctest::Approx(2.0 * std::numbers::pi * 0.05).epsilon(0.01));
    const FieldP1 zero_w(m.vertex_count(), 0.0);
    SUBCASE("constant pressure") {
        const auto f = obstacle_force(m, loop, FieldCR(m.edge_count(), 2.5), zero_w, 0.001);
        CHECK(std::abs(f.drag) < 1e-12);
        CHECK(std::abs(f.lift) < 1e-12);
    }
    SUBCASE("constant vorticity") {
        const auto f = obstacle_force(m, loop, FieldCR(m.edge_count(), 0.0), FieldP1(m.vertex_count(), 3.0), 0.1);
        CHECK(std::abs(f.drag) < 1e-12);
        CHECK(std::abs(f.lift) < 1e-12);
    }
    SUBCASE("linear pressure converges to the circle integral") {
        const double exact = -std::numbers::pi * 0.0025;
        double prev = 1.0;
        for (double h : {0.04, 0.02, 0.01}) {
            const auto mm = st_mesh(h);
            const auto f = obstacle_force(mm, obstacle_loop(mm), midpoint_x(mm), FieldP1(mm.vertex_count(), 0.0), 0.0);
            const double err = std::abs(f.drag - exact);
            CHECK(std::abs(f.lift) < 1e-12);
            CHECK(err < h * 0.05);
            CHECK(err < prev);
            prev = err;
        }
    }
    SUBCASE("wall shear has the drag sign") {
        // omega < 0 above the obstacle and > 0 below: fluid streaming in +x
        FieldP1 w(m.vertex_count());
        for (int v = 0; v < m.vertex_count(); ++v) {
            w[v] = m.vertex(v).y() > 0.2 ? -1.0 : 1.0;
        }
        const auto f = obstacle_force(m, loop, FieldCR(m.edge_count(), 0.0), w, 1.0);
        CHECK(f.drag > 0.0);
    }
    CHECK_THROWS_AS(obstacle_force(m, 7, FieldCR(m.edge_count()), zero_w, 0.0), ConfigError);
    CHECK_THROWS_AS(obstacle_loop(icosahedron()), ConfigError);
}

TEST_CASE("strouhal") {
    const StBenchParams p;
    CHECK(strouhal(sine_series(3.0, 20.0, 1e-3, 0.0, 0), 10.0, p) == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(strouhal(sine_series(3.0188, 20.0, 1e-3, 0.0, 0), 10.0, p) == doctest::Approx(0.30188).epsilon(1e-5));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = sine_series(3.0188, 20.0, 6.4e-4, 0.01, seed);
        CHECK(strouhal(s, 10.0, p) == doctest::Approx(0.30188).epsilon(0.005));
    }
    // periodogram cross-check on a noisy series
    const auto s = sine_series(2.7, 20.0, 2e-3, 0.01, 42);
    const double f_spec = periodogram_peak(s, 10.0, 2.0, 3.5);
    CHECK(strouhal(s, 10.0, p) / p.L == doctest::Approx(f_spec).epsilon(0.01));

    ForceSeries flat;
    for (int i = 0; i < 2000; ++i) {
        flat.add(0.01 * i, {3.0, 0.7});
    }
    CHECK_THROWS_AS(strouhal(flat, 10.0, p), SolverError);
    CHECK_THROWS_AS(strouhal(sine_series(3.0, 10.8, 1e-3, 0.0, 0), 10.0, p), SolverError);
}

TEST_CASE("force series") {
    ForceSeries s;
    s.add(0.5, {1.0, -2.0});
    s.add(1.0, {0.1, 0.2});
    const auto text = s.csv();
    CHECK(text.rfind("t,cd,cl\n", 0) == 0);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    const auto r = coefficient_range(s, 0.0);
    CHECK(r.cd_min == 0.1);
    CHECK(r.cd_max == 1.0);
    CHECK(r.cl_min == -2.0);
    CHECK(r.cl_max == 0.2);
    CHECK_THROWS_AS(coefficient_range(s, 2.0), SolverError);
}

TEST_CASE("Kelvin-Helmholtz initial velocity") {
    const auto sh = kh_shear(Vec3(2, 1, 0));
    CHECK(sh.x() == 0.0);
    CHECK(sh.z() == doctest::Approx(-2.0 * std::tanh(5.0)).epsilon(1e-14));
    CHECK(sh.z() == doctest::Approx(-1.99982).epsilon(1e-5));
    CHECK(std::exp(-25.0) < 1.4e-11 * 1.1);
    CHECK(kh_shear(Vec3(1.0, 0.0, 2.0)).norm() == 0.0);

    GeneratorParams gp;
    gp.n_theta = 48;
    gp.n_phi = 16;
    const auto m = generate_mesh(MeshKind::torus, gp);
    const auto V = kh_torus_initial_velocity(m);
    double max_normal = 0.0;
    for (int t = 0; t < m.triangle_count(); ++t) {
        max_normal = std::max(max_normal, std::abs(V[t].dot(m.normal(t))));
    }
    CHECK(max_normal < 1e-12);
    // perturbation = c_n r exp(-y^2/delta0^2) rot_h(Psi0), and rot_h(Psi0) is discretely divergence free
    KhParams still;
    still.c_n = 0.0;
    const auto P = V - kh_torus_initial_velocity(m, still);
    FieldP1 psi0(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) {
        psi0[v] = std::cos(4.0 * std::atan2(m.vertex(v).z(), m.vertex(v).x()));
    }
    const auto R = rot_h(m, psi0);
    for (int t = 0; t < m.triangle_count(); ++t) {
        const Vec3 c = m.centroid(t);
        const double s = 0.02 * std::hypot(c.x(), c.z()) * std::exp(-c.y() * c.y() / 0.04);
        CHECK((P[t] - s * R[t]).norm() < 1e-14);
    }
    for (double x : grad_weak_cr(m, R)) {
        CHECK(std::abs(x) < 1e-12);
    }
    CHECK_THROWS_AS(kh_torus_initial_velocity(unit_square(2)), ConfigError);
    CHECK_THROWS_AS(kh_torus_initial_velocity(icosahedron()), ConfigError);
}

TEST_CASE("pierced ring force") {
    GeneratorParams gp;
    gp.h = 0.05;
    const auto m = generate_mesh(MeshKind::cylinder_with_hole, gp);
    const auto F = pierced_ring_force(m);
    double torque = 0.0;
    for (int t = 0; t < m.triangle_count(); ++t) {
        CHECK(F[t].norm() == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(std::abs(F[t].dot(m.normal(t))) < 1e-12);
        torque += m.area(t) * m.centroid(t).cross(F[t]).z();
    }
    // clockwise seen from +z: negative z torque, i.e. positive clockwise torque
    CHECK(-torque > 0.0);
    CHECK(mean_azimuthal_speed(m, F) == doctest::Approx(0.1).epsilon(1e-3));
}

TEST_CASE("vortex census") {
    GeneratorParams gp;
    gp.width = 4.0;
    gp.height = 1.0;
    gp.nx = 80;
    gp.ny = 20;
    const auto m = generate_mesh(MeshKind::rectangle, gp);
    FieldP1 w(m.vertex_count(), 0.0);
    CHECK(vortex_census(m, w, 0.3) == 0);
    auto bump = [&](double cx, double s) {
        for (int v = 0; v < m.vertex_count(); ++v) {
            const Vec3& p = m.vertex(v);
            const double r2 = (p.x() - cx) * (p.x() - cx) + (p.y() - 0.5) * (p.y() - 0.5);
            w[v] += s * std::exp(-r2 / 0.02);
        }
    };
    bump(0.5, 1.0);
    CHECK(vortex_census(m, w, 0.3) == 1);
    bump(1.5, -1.0);
    bump(2.5, 1.0);
    bump(3.5, -1.0);
    CHECK(vortex_census(m, w, 0.3) == 4);
    const auto c = vortex_census_by_sign(m, w, 0.3);
    CHECK(c.positive == 2);
    CHECK(c.negative == 2);
    CHECK_THROWS_AS(vortex_census(m, w, 0.0), ConfigError);
    CHECK_THROWS_AS(vortex_census(m, w, 1.0), ConfigError);
}
