#include "surfflow/stepper.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "surfflow/errors.hpp"

namespace surfflow {

namespace {

std::vector<double> kappa_for(const SurfaceMesh& mesh, const SimConfig& c) {
    switch (c.curvature_mode) {
    case CurvatureMode::angle_defect:
        return gaussian_curvature_p1(mesh);
    case CurvatureMode::zero:
        return std::vector<double>(mesh.vertex_count(), 0.0);
    case CurvatureMode::constant:
        return std::vector<double>(mesh.vertex_count(), c.curvature_value);
    }
    return {};
}

SparseMatrix vorticity_matrix(const SurfaceMesh& mesh, const SimConfig& c, const BoundarySetup& setup) {
    auto M = mass_p1(mesh, c.lumped_mass);
    if (setup.stabilization.rows() == M.rows()) {
        M = M.combine(1.0, setup.stabilization, 1.0);
    }
    return M;
}

CgOptions with_tol(CgOptions o, double tol) {
    o.tol = tol;
    return o;
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

} // namespace

FlowSolver::FlowSolver(const SurfaceMesh& mesh, const BoundarySetup& setup, const HarmonicBasis& basis,
                       SimConfig config)
    : mesh_(&mesh), setup_(&setup), basis_(&basis), config_(std::move(config)), kappa_(kappa_for(mesh, config_)),
      mass_(mass_p1(mesh, config_.lumped_mass)), stiff_(rotrot_p1(mesh)),
      stream_solver_(stiff_, setup.spaces.stream.fixed,
                     setup.spaces.stream.zero_mean ? p1_weights(mesh) : std::vector<double>{}, config_.cg,
                     config_.backend),
      mass_solver_(vorticity_matrix(mesh, config_, setup), setup.spaces.vorticity.fixed, {},
                   with_tol(config_.cg, config_.mass_tol), config_.backend),
      potential_solver_(stiffness_cr(mesh), setup.spaces.potential.fixed,
                        setup.spaces.potential.zero_mean ? cr_weights(mesh) : std::vector<double>{}, config_.cg,
                        config_.backend) {
    if (!(config_.dt > 0.0)) {
        throw ConfigError("dt must be positive");
    }
    if (config_.nu < 0.0) {
        throw ConfigError("nu must be non-negative");
    }
    if (config_.scheme == Scheme::euler) {
        config_.nu = 0.0;
    }
    const auto Kc = stiffness_cr(mesh);
    cr_grad_norm_.resize(mesh.edge_count());
    for (int e = 0; e < mesh.edge_count(); ++e) {
        cr_grad_norm_[e] = std::sqrt(Kc.at(e, e));
    }
    lifting_energy_ = inner_vec(mesh, setup.lifting.field, setup.lifting.field);
    h_min_ = mesh.min_edge_length();
    if (config_.force && !config_.force_time_dependent) {
        cached_force_ = project_tangent(mesh, config_.force(0.0));
        has_force_ = true;
    }
    if (config_.nu > 0.0 && config_.dt > 0.2 * h_min_ * h_min_ / config_.nu) {
        spdlog::warn("dt = {:.3e} exceeds the explicit diffusion limit 0.2 h_min^2 / nu = {:.3e}", config_.dt,
                     0.2 * h_min_ * h_min_ / config_.nu);
    }
}

FieldP0Vec FlowSolver::force_at(double t) const {
    if (has_force_) {
        return cached_force_;
    }
    if (config_.force) {
        return project_tangent(*mesh_, config_.force(t));
    }
    return FieldP0Vec(mesh_->triangle_count(), Vec3::Zero());
}

FieldP0Vec FlowSolver::velocity(const FlowState& s) const {
    FieldP0Vec V = rot_h(*mesh_, s.psi);
    axpy(1.0, basis_->combine(*mesh_, s.h), V);
    axpy(1.0, setup_->lifting.field, V);
    return V;
}

FieldP0Vec FlowSolver::momentum_rhs(const FlowState& s, const FieldP0Vec& V, bool curvature) const {
    const auto& mesh = *mesh_;
    FieldP0Vec G = force_at(s.time);
    const auto wbar = element_means(mesh, s.omega);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        G[t] -= wbar[t] * mesh.normal(t).cross(V[t]);
    }
    if (config_.nu > 0.0) {
        axpy(-config_.nu, rot_h(mesh, s.omega), G);
    }
    if (config_.nu > 0.0 && curvature) {
        const auto kbar = element_means(mesh, FieldP1(kappa_));
        for (int t = 0; t < mesh.triangle_count(); ++t) {
            G[t] += 2.0 * config_.nu * kbar[t] * V[t];
        }
    }
    return G;
}

FieldP0Vec FlowSolver::pressure_patch_term(const FieldP0Vec& V) const {
    // -(grad p*_D, W) with p*_D = g_p + |V|^2 / 2 on the pressure edges
    FieldP0Vec B(mesh_->triangle_count(), Vec3::Zero());
    for (const auto& pe : setup_->pressure_edges) {
        const double pstar = pe.g_p + 0.5 * V[pe.triangle].squaredNorm();
        B[pe.triangle] -= pstar * pe.weighted_normal;
    }
    return B;
}

FieldP1 FlowSolver::solve_vorticity(const FieldP0Vec& V) const {
    auto b = rot_weak_p1(*mesh_, V);
    axpy(1.0, setup_->tangential_load, b);
    auto r = mass_solver_.solve(b, setup_->omega_values);
    if (!r.report.converged) {
        spdlog::warn("vorticity solve: relative residual {:.3e}", r.report.relative_residual);
    }
    return FieldP1(std::move(r.x));
}

FlowState FlowSolver::ns_init(const FieldP0Vec& V0) const {
    const auto& mesh = *mesh_;
    FlowState s;
    s.time = 0.0;
    auto X = V0 - setup_->lifting.field;
    if (tangential_defect(mesh, X) > 1e-10) {
        spdlog::warn("initial velocity is not tangential; projecting");
        X = project_tangent(mesh, X);
    }
    auto r = stream_solver_.solve(rot_weak_p1(mesh, X));
    s.psi = FieldP1(std::move(r.x));
    s.h = basis_->project(mesh, X);
    const auto rest = X - rot_h(mesh, s.psi) - basis_->combine(mesh, s.h);
    const double nx = norm_vec(mesh, X);
    if (nx > 0.0 && norm_vec(mesh, rest) > 1e-8 * nx) {
        spdlog::warn("initial velocity has a gradient part of relative size {:.3e}; dropped", norm_vec(mesh, rest) / nx);
    }
    s.omega = solve_vorticity(velocity(s));
    return s;
}

FlowState FlowSolver::euler_init(const std::vector<double>& h0, const FieldP1& omega0) const {
    const auto& mesh = *mesh_;
    FlowState s;
    s.h = h0;
    s.h.resize(basis_->size(), 0.0);
    s.omega = omega0;
    if (setup_->spaces.stream.zero_mean) {
        const double mean = mean_p1(mesh, s.omega);
        if (std::abs(mean) > 1e-14 * std::max(1.0, norm_inf(s.omega.values()))) {
            spdlog::warn("initial vorticity has mean {:.3e} on a closed surface; projected to zero mean", mean);
            for (auto& w : s.omega) {
                w -= mean;
            }
        }
    }
    auto r = stream_solver_.solve(mass_ * std::span<const double>(s.omega.values()));
    s.psi = FieldP1(std::move(r.x));
    return s;
}

FlowState FlowSolver::ns_step(const FlowState& s) const {
    const auto& mesh = *mesh_;
    const double dt = config_.dt;
    const auto V = velocity(s);
    // constant curvature: the curvature term decouples into 2 nu kappa (rot psi, rot phi) and 2 nu kappa h_i
    const bool shortcut =
        config_.nu > 0.0 && config_.curvature_mode == CurvatureMode::constant && config_.curvature_shortcut;
    const double two_nu_kappa = 2.0 * config_.nu * config_.curvature_value;
    FieldP0Vec G = momentum_rhs(s, V, !shortcut);
    axpy(1.0, pressure_patch_term(V), G);

    FlowState n;
    n.time = s.time + dt;
    // step 1: (rot psi', rot phi) = (omega, phi) + dt R(rot phi)
    auto b = mass_ * std::span<const double>(s.omega.values());
    axpy(dt, rot_weak_p1(mesh, G), b);
    if (shortcut) {
        axpy(dt * two_nu_kappa, stiff_ * std::span<const double>(s.psi.values()), b);
    }
    auto r = stream_solver_.solve(b, {}, s.psi.values());
    if (!r.report.converged) {
        spdlog::warn("stream solve: relative residual {:.3e}", r.report.relative_residual);
    }
    n.psi = FieldP1(std::move(r.x));
    // step 2: h_i' = h_i + dt R(H_i)
    n.h = s.h;
    const auto rh = basis_->project(mesh, G);
    for (std::size_t i = 0; i < n.h.size(); ++i) {
        n.h[i] += dt * rh[i];
        if (shortcut) {
            n.h[i] += dt * two_nu_kappa * s.h[i];
        }
    }
    // step 3: (omega', chi) = (V', rot chi)
    n.omega = solve_vorticity(velocity(n));
    return n;
}

FlowState FlowSolver::euler_step(const FlowState& s) const {
    const auto& mesh = *mesh_;
    const double dt = config_.dt;
    const auto V = velocity(s);
    const auto F = force_at(s.time);

    FlowState n;
    n.time = s.time + dt;
    // step 1: (omega', chi) = (omega, chi) + dt [(F, rot chi) - (V(omega), chi)]
    auto b = mass_ * std::span<const double>(s.omega.values());
    axpy(dt, rot_weak_p1(mesh, F), b);
    axpy(-dt, load_p1(mesh, advection_p0(mesh, V, s.omega)), b);
    auto r = mass_solver_.solve(b, setup_->omega_values, s.omega.values());
    if (!r.report.converged) {
        spdlog::warn("vorticity update: relative residual {:.3e}", r.report.relative_residual);
    }
    n.omega = FieldP1(std::move(r.x));
    // step 2: (H', Z) = (H, Z) + dt (F - omega J V, Z)
    FieldP0Vec G = F;
    const auto wbar = element_means(mesh, s.omega);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        G[t] -= wbar[t] * mesh.normal(t).cross(V[t]);
    }
    axpy(1.0, pressure_patch_term(V), G);
    n.h = s.h;
    const auto rh = basis_->project(mesh, G);
    for (std::size_t i = 0; i < n.h.size(); ++i) {
        n.h[i] += dt * rh[i];
    }
    // step 3: (rot psi', rot phi) = (omega', phi)
    auto rs = stream_solver_.solve(mass_ * std::span<const double>(n.omega.values()), {}, s.psi.values());
    n.psi = FieldP1(std::move(rs.x));
    return n;
}

void FlowSolver::guard(const FlowState& s) const {
    if (!all_finite(s.omega.values()) || !all_finite(s.psi.values()) || !all_finite(s.h)) {
        throw BlowUpError("non-finite values at t = " + std::to_string(s.time));
    }
    double vmax = 0.0;
    for (const auto& v : velocity(s)) {
        vmax = std::max(vmax, v.norm());
    }
    if (!(vmax <= config_.blowup_speed)) {
        throw BlowUpError("velocity magnitude " + std::to_string(vmax) + " exceeds " +
                          std::to_string(config_.blowup_speed) + " at t = " + std::to_string(s.time));
    }
}

FlowState FlowSolver::step(const FlowState& s) const {
    auto n = config_.scheme == Scheme::euler ? euler_step(s) : ns_step(s);
    guard(n);
    return n;
}

FieldCR FlowSolver::recover_pressure(const FlowState& s) const {
    const auto& mesh = *mesh_;
    const auto V = velocity(s);
    auto G = momentum_rhs(s, V, true);
    const auto b = grad_weak_cr(mesh, G);
    std::vector<double> fixed(mesh.edge_count(), 0.0);
    for (const auto& pe : setup_->pressure_edges) {
        fixed[pe.edge] = pe.g_p + 0.5 * V[pe.triangle].squaredNorm();
    }
    auto r = potential_solver_.solve(b, fixed);
    if (!r.report.converged) {
        spdlog::warn("pressure solve: relative residual {:.3e}", r.report.relative_residual);
    }
    return FieldCR(std::move(r.x));
}

double FlowSolver::kinetic_energy(const FlowState& s) const {
    const auto& mesh = *mesh_;
    const auto rp = rot_h(mesh, s.psi);
    double e = inner_vec(mesh, rp, rp) + lifting_energy_;
    for (double h : s.h) {
        e += h * h;
    }
    return 0.5 * e;
}

double FlowSolver::mean_vorticity(const FlowState& s) const { return mean_p1(*mesh_, s.omega); }

double FlowSolver::divergence_residual(const FlowState& s) const {
    const auto& mesh = *mesh_;
    const auto V = velocity(s);
    const double nv = norm_vec(mesh, V);
    if (nv == 0.0) {
        return 0.0;
    }
    const auto b = grad_weak_cr(mesh, V);
    double worst = 0.0;
    for (int e = 0; e < mesh.edge_count(); ++e) {
        if (setup_->spaces.potential.fixed[e]) {
            continue;
        }
        double flux = 0.0;
        if (mesh.edge(e).is_boundary()) {
            flux = setup_->bc.g_n[e] * mesh.edge_length(e);
        }
        worst = std::max(worst, std::abs(b[e] - flux) / (nv * cr_grad_norm_[e]));
    }
    return worst;
}

bool FlowSolver::check_stability(const FlowState& s) const {
    const auto V = velocity(s);
    double vmax = 0.0;
    for (const auto& v : V) {
        vmax = std::max(vmax, v.norm());
    }
    bool bad = false;
    if (config_.nu > 0.0 && config_.dt > 0.2 * h_min_ * h_min_ / config_.nu) {
        bad = true;
    }
    const double cfl = config_.dt * vmax / h_min_;
    if (cfl > 0.5) {
        bad = true;
        if (!warned_.exchange(true)) {
            spdlog::warn("convective CFL number {:.3f} exceeds 0.5 at t = {:.4f}", cfl, s.time);
        }
    }
    // forward Euler on advection-diffusion needs dt <= 2 nu / |V|^2
    if (config_.nu > 0.0 && config_.dt * vmax * vmax > 2.0 * config_.nu) {
        bad = true;
        if (!warned_advection_.exchange(true)) {
            spdlog::warn("dt = {:.3e} exceeds the advection-diffusion limit 2 nu / |V|^2 = {:.3e} at t = {:.4f}",
                         config_.dt, 2.0 * config_.nu / (vmax * vmax), s.time);
        }
    }
    return bad;
}

} // namespace surfflow
