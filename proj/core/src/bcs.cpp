#include "surfflow/bcs.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "surfflow/errors.hpp"

namespace surfflow {

BoundaryConditions BoundaryConditions::homogeneous(const SurfaceMesh& mesh) {
    const auto n = static_cast<std::size_t>(mesh.edge_count());
    BoundaryConditions bc;
    bc.pressure.assign(n, 0);
    bc.vorticity.assign(n, 0);
    bc.g_n.assign(n, 0.0);
    bc.g_t.assign(n, 0.0);
    bc.g_p.assign(n, 0.0);
    bc.g_omega.assign(n, 0.0);
    return bc;
}

double parabolic_profile(double s, double v_max, double height) { return 4.0 * v_max * s * (height - s) / (height * height); }

BoundaryConditions apply_patch_rules(const SurfaceMesh& mesh, const std::vector<PatchRule>& rules) {
    auto bc = BoundaryConditions::homogeneous(mesh);
    const auto& loops = mesh.boundary_loops();
    std::vector<int> loop_of(mesh.edge_count(), -1);
    for (int l = 0; l < static_cast<int>(loops.size()); ++l) {
        for (int e : loops[l].edges) {
            loop_of[e] = l;
        }
    }
    constexpr double tol = 1e-9;
    auto inside = [](double x, const std::optional<double>& lo, const std::optional<double>& hi) {
        return (!lo || x >= *lo - tol) && (!hi || x <= *hi + tol);
    };
    for (const auto& r : rules) {
        if (r.loop >= static_cast<int>(loops.size())) {
            throw ConfigError("boundary '" + r.name + "': loop " + std::to_string(r.loop) + " does not exist (mesh has " +
                              std::to_string(loops.size()) + ")");
        }
        int matched = 0;
        for (int e = 0; e < mesh.edge_count(); ++e) {
            if (loop_of[e] < 0 || (r.loop >= 0 && loop_of[e] != r.loop)) {
                continue;
            }
            const Vec3 m = 0.5 * (mesh.vertex(mesh.edge(e).v[0]) + mesh.vertex(mesh.edge(e).v[1]));
            if (!inside(m.x(), r.x_min, r.x_max) || !inside(m.y(), r.y_min, r.y_max) ||
                !inside(m.z(), r.z_min, r.z_max)) {
                continue;
            }
            ++matched;
            bc.pressure[e] = r.pressure ? 1 : 0;
            bc.vorticity[e] = r.vorticity ? 1 : 0;
            bc.g_n[e] = r.parabolic ? -parabolic_profile(m.y() - r.y0, r.v_max, r.channel_height) : r.g_n;
            bc.g_t[e] = r.g_t;
            bc.g_p[e] = r.g_p;
            bc.g_omega[e] = r.g_omega;
        }
        if (matched == 0) {
            throw ConfigError("boundary '" + r.name + "' selects no boundary edge");
        }
    }
    return bc;
}

DiscreteSpaces patched_spaces(const SurfaceMesh& mesh, const BoundaryConditions& bc) {
    DiscreteSpaces s;
    s.stream.fixed.assign(mesh.vertex_count(), 0);
    s.vorticity.fixed.assign(mesh.vertex_count(), 0);
    s.potential.fixed.assign(mesh.edge_count(), 0);
    bool any_normal = false;
    bool any_pressure = false;
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto& edge = mesh.edge(e);
        if (!edge.is_boundary()) {
            continue;
        }
        if (bc.pressure[e]) {
            any_pressure = true;
            s.potential.fixed[e] = 1;
        } else {
            any_normal = true;
            s.stream.fixed[edge.v[0]] = s.stream.fixed[edge.v[1]] = 1;
        }
        if (bc.vorticity[e]) {
            s.vorticity.fixed[edge.v[0]] = s.vorticity.fixed[edge.v[1]] = 1;
        }
    }
    s.stream.zero_mean = !any_normal;
    s.vorticity.zero_mean = false;
    s.potential.zero_mean = !any_pressure;
    return s;
}

int mixed_harmonic_dimension(const SurfaceMesh& mesh, const DiscreteSpaces& spaces) {
    const int dim_q = spaces.potential.free_count() - (spaces.potential.zero_mean ? 1 : 0);
    const int dim_s = spaces.stream.free_count() - (spaces.stream.zero_mean ? 1 : 0);
    return 2 * mesh.triangle_count() - dim_q - dim_s;
}

Lifting build_lifting(const SurfaceMesh& mesh, const BoundaryConditions& bc, const CgOptions& cg,
                      SolverBackend backend) {
    Lifting out;
    std::vector<double> b(mesh.edge_count(), 0.0);
    std::vector<char> fixed(mesh.edge_count(), 0);
    bool any_pressure = false;
    bool any_data = false;
    double net = 0.0;
    double scale = 0.0;
    for (int e = 0; e < mesh.edge_count(); ++e) {
        if (!mesh.edge(e).is_boundary()) {
            continue;
        }
        if (bc.pressure[e]) {
            fixed[e] = 1;
            any_pressure = true;
        } else {
            b[e] = bc.g_n[e] * mesh.edge_length(e);
            net += b[e];
            scale += std::abs(b[e]);
            any_data = any_data || bc.g_n[e] != 0.0;
        }
    }
    if (!any_data) {
        out.potential = FieldCR(mesh.edge_count(), 0.0);
        out.field = FieldP0Vec(mesh.triangle_count(), Vec3::Zero());
        return out;
    }
    if (!any_pressure && std::abs(net) > 1e-10 * std::max(1.0, scale)) {
        throw ConfigError("inconsistent normal-velocity data: net flux " + std::to_string(net) +
                          " must vanish when there is no pressure patch");
    }
    const ConstrainedSolver solver(stiffness_cr(mesh), fixed, any_pressure ? std::vector<double>{} : cr_weights(mesh), cg,
                                   backend);
    auto r = solver.solve(b);
    if (!r.report.converged) {
        throw SolverError("lifting solve did not converge");
    }
    out.potential = FieldCR(std::move(r.x));
    out.field = grad_h_cr(mesh, out.potential);
    return out;
}

SparseMatrix outlet_stabilization(const SurfaceMesh& mesh, const BoundaryConditions& bc, double beta) {
    std::vector<char> outlet_vertex(mesh.vertex_count(), 0);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        if (mesh.edge(e).is_boundary() && bc.pressure[e]) {
            outlet_vertex[mesh.edge(e).v[0]] = outlet_vertex[mesh.edge(e).v[1]] = 1;
        }
    }
    std::vector<double> scale(mesh.triangle_count(), 0.0);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangle(t);
        if (outlet_vertex[tri[0]] || outlet_vertex[tri[1]] || outlet_vertex[tri[2]]) {
            const double h = mesh.diameter(t);
            scale[t] = beta * h * h;
        }
    }
    return weighted_stiffness_p1(mesh, scale);
}

BoundarySetup build_boundary_setup(const SurfaceMesh& mesh, const BoundaryConditions& bc,
                                   const BoundaryOptions& options) {
    BoundarySetup s;
    s.bc = bc;
    s.spaces = patched_spaces(mesh, bc);
    s.lifting = build_lifting(mesh, bc, options.cg, options.backend);
    s.omega_values.assign(mesh.vertex_count(), 0.0);
    s.tangential_load.assign(mesh.vertex_count(), 0.0);
    std::vector<int> omega_count(mesh.vertex_count(), 0);
    bool any_pressure = false;
    s.homogeneous = true;
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto& edge = mesh.edge(e);
        if (!edge.is_boundary()) {
            continue;
        }
        const double len = mesh.edge_length(e);
        if (bc.pressure[e] || bc.vorticity[e] || bc.g_n[e] != 0.0 || bc.g_t[e] != 0.0) {
            s.homogeneous = false;
        }
        if (bc.vorticity[e]) {
            for (int v : edge.v) {
                s.omega_values[v] += bc.g_omega[e];
                ++omega_count[v];
            }
        } else if (bc.g_t[e] != 0.0) {
            for (int v : edge.v) {
                s.tangential_load[v] += 0.5 * bc.g_t[e] * len;
            }
        }
        if (bc.pressure[e]) {
            any_pressure = true;
            PressureEdge pe;
            pe.edge = e;
            pe.triangle = edge.tri[0];
            pe.weighted_normal = mesh.boundary_outward_normal(e) * len / mesh.area(pe.triangle);
            pe.g_p = bc.g_p[e];
            s.pressure_edges.push_back(pe);
        }
    }
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (omega_count[v] > 0) {
            s.omega_values[v] /= omega_count[v];
        }
    }
    if (any_pressure && options.stabilization_beta > 0.0) {
        s.stabilization = outlet_stabilization(mesh, bc, options.stabilization_beta);
    }
    return s;
}

BoundarySetup homogeneous_setup(const SurfaceMesh& mesh) {
    return build_boundary_setup(mesh, BoundaryConditions::homogeneous(mesh));
}

HarmonicBasis mixed_harmonic_basis(const SurfaceMesh& mesh, const BoundarySetup& setup, std::uint64_t seed,
                                   const HodgeOptions& options) {
    const int l = mixed_harmonic_dimension(mesh, setup.spaces);
    if (l == 0) {
        HarmonicBasis b;
        b.gram = Eigen::MatrixXd(0, 0);
        return b;
    }
    const HodgeProjector projector(mesh, setup.spaces, options);
    spdlog::debug("mixed harmonic dimension {}", l);
    return harmonic_basis(projector, l, seed, options);
}

} // namespace surfflow
