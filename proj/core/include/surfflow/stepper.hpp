#pragma once

#include <atomic>
#include <functional>
#include <vector>

#include "surfflow/bcs.hpp"
#include "surfflow/hodge.hpp"

namespace surfflow {

/// Unknowns of both schemes: V = rot(psi) + sum h_i H_i + lifting.
struct FlowState {
    FieldP1 psi;
    std::vector<double> h;
    FieldP1 omega;
    double time = 0.0;
};

enum class Scheme { navier_stokes, euler };
enum class CurvatureMode { angle_defect, zero, constant };

/// Per-element tangential force at time t; an empty function means F = 0.
using ForceField = std::function<FieldP0Vec(double t)>;

struct SimConfig {
    Scheme scheme = Scheme::navier_stokes;
    double nu = 0.0;
    double dt = 1e-3;
    double t_end = 1.0;
    ForceField force;
    bool force_time_dependent = false; // false: sampled once and cached
    CurvatureMode curvature_mode = CurvatureMode::angle_defect;
    double curvature_value = 0.0; // for CurvatureMode::constant
    bool curvature_shortcut = true; // decoupled curvature forms when constant
    bool lumped_mass = false;
    CgOptions cg{1e-10, 0};
    double mass_tol = 1e-13;
    SolverBackend backend = SolverBackend::cg;
    /// A speed above this (or any non-finite value) counts as blow-up.
    double blowup_speed = 1e8;
};

/// Explicit Euler time stepping of the streamfunction-vorticity schemes.
///
/// All matrices (and factorizations for the direct backend) are built in the
/// constructor; step() is const and may be called from several threads on
/// different states.
class FlowSolver {
public:
    FlowSolver(const SurfaceMesh& mesh, const BoundarySetup& setup, const HarmonicBasis& basis, SimConfig config);

    /// Navier-Stokes start: (psi, H) from the Hodge decomposition of
    /// V0 - lifting (the gradient part is dropped with a warning), then omega.
    [[nodiscard]] FlowState ns_init(const FieldP0Vec& V0) const;
    /// Euler start from vorticity and harmonic coefficients.
    [[nodiscard]] FlowState euler_init(const std::vector<double>& h0, const FieldP1& omega0) const;

    [[nodiscard]] FlowState ns_step(const FlowState& s) const;
    [[nodiscard]] FlowState euler_step(const FlowState& s) const;
    /// Dispatches on the configured scheme and checks for blow-up.
    [[nodiscard]] FlowState step(const FlowState& s) const;

    [[nodiscard]] FieldP0Vec velocity(const FlowState& s) const;
    /// Zero-mean (or Dirichlet on the pressure patch) total pressure p*.
    [[nodiscard]] FieldCR recover_pressure(const FlowState& s) const;
    [[nodiscard]] double kinetic_energy(const FlowState& s) const;
    /// Mass-weighted mean of omega.
    [[nodiscard]] double mean_vorticity(const FlowState& s) const;
    /// max over free CR test functions q_e of |(V, grad q_e) - g_n |e|| / (||V|| ||grad q_e||)
    [[nodiscard]] double divergence_residual(const FlowState& s) const;

    /// The functional R^n as a P0 field (without the pressure-patch term).
    [[nodiscard]] FieldP0Vec momentum_rhs(const FlowState& s, const FieldP0Vec& V, bool curvature = true) const;

    /// Discrete Gaussian curvature used by the scheme (per vertex).
    [[nodiscard]] const std::vector<double>& curvature() const { return kappa_; }
    [[nodiscard]] const SimConfig& config() const { return config_; }
    [[nodiscard]] const SurfaceMesh& mesh() const { return *mesh_; }
    [[nodiscard]] const HarmonicBasis& basis() const { return *basis_; }
    [[nodiscard]] const BoundarySetup& setup() const { return *setup_; }

    /// Logs a warning when dt exceeds the explicit diffusion, convective or
    /// advection-diffusion (2 nu / |V|^2) limits. Returns true when a limit is exceeded.
    bool check_stability(const FlowState& s) const;

private:
    [[nodiscard]] FieldP0Vec force_at(double t) const;
    [[nodiscard]] FieldP0Vec pressure_patch_term(const FieldP0Vec& V) const;
    [[nodiscard]] FieldP1 solve_vorticity(const FieldP0Vec& V) const;
    void guard(const FlowState& s) const;

    const SurfaceMesh* mesh_;
    const BoundarySetup* setup_;
    const HarmonicBasis* basis_;
    SimConfig config_;
    std::vector<double> kappa_;
    SparseMatrix mass_;
    SparseMatrix stiff_;
    ConstrainedSolver stream_solver_;
    ConstrainedSolver mass_solver_;
    ConstrainedSolver potential_solver_;
    std::vector<double> cr_grad_norm_;
    double lifting_energy_ = 0.0;
    double h_min_ = 0.0;
    FieldP0Vec cached_force_;
    bool has_force_ = false;
    mutable std::atomic<bool> warned_{false};
    mutable std::atomic<bool> warned_advection_{false};
};

} // namespace surfflow
