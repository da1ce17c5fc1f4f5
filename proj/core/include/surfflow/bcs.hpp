#pragma once

#include <optional>
#include <string>
#include <vector>

#include "surfflow/hodge.hpp"

namespace surfflow {

/// Per-edge patch labels and boundary data. Entries of interior edges are
/// ignored. Each boundary edge is either on the pressure patch or on the
/// normal-velocity patch, and either on the vorticity patch or on the
/// tangential patch.
struct BoundaryConditions {
    std::vector<char> pressure;  // 1 = pressure patch, 0 = normal-velocity patch
    std::vector<char> vorticity; // 1 = vorticity patch, 0 = tangential patch
    std::vector<double> g_n;     // outward normal velocity (normal-velocity patch)
    std::vector<double> g_t;     // tangential velocity along T = J n (tangential patch)
    std::vector<double> g_p;     // static pressure (pressure patch)
    std::vector<double> g_omega; // vorticity (vorticity patch)

    /// No-slip everywhere: the homogeneous setting.
    static BoundaryConditions homogeneous(const SurfaceMesh& mesh);
};

/// Selects boundary edges by loop index and an axis-aligned box around the
/// edge midpoint, then assigns labels and data. Rules apply in order, later
/// ones overriding earlier ones.
struct PatchRule {
    std::string name;
    int loop = -1; // -1: any loop
    std::optional<double> x_min, x_max, y_min, y_max, z_min, z_max;
    bool pressure = false;
    bool vorticity = false;
    double g_n = 0.0;
    double g_t = 0.0;
    double g_p = 0.0;
    double g_omega = 0.0;
    // Parabolic inflow 4 v_max s (H - s) / H^2 with s = y - y0; sets g_n = -profile.
    bool parabolic = false;
    double v_max = 1.5;
    double channel_height = 0.41;
    double y0 = 0.0;
};

/// Starts from homogeneous() and applies the rules. Throws ConfigError when a
/// rule matches no edge.
BoundaryConditions apply_patch_rules(const SurfaceMesh& mesh, const std::vector<PatchRule>& rules);

/// 4 v_max s (H - s) / H^2
double parabolic_profile(double s, double v_max, double height);

/// Masks of the patched spaces: S fixes vertices touching the normal-velocity
/// patch, W fixes vertices touching the vorticity patch, Q fixes pressure
/// edges. An empty patch turns on the zero-mean constraint instead.
DiscreteSpaces patched_spaces(const SurfaceMesh& mesh, const BoundaryConditions& bc);

/// dim X_h - dim grad(Q) - dim rot(S) = 2|T| - dim Q - dim S.
int mixed_harmonic_dimension(const SurfaceMesh& mesh, const DiscreteSpaces& spaces);

/// Potential of the normal-velocity lifting, discretized in CR: Dirichlet 0
/// on pressure edges, (grad q, grad r) = sum_e g_n |e| r_e on normal-velocity
/// edges. Its gradient has discrete flux exactly g_n |e| through each edge.
struct Lifting {
    FieldCR potential;
    FieldP0Vec field; // grad_h(potential)
};

Lifting build_lifting(const SurfaceMesh& mesh, const BoundaryConditions& bc, const CgOptions& cg = {1e-13, 0},
                      SolverBackend backend = SolverBackend::cg);

/// beta * h_K^2 * (grad w, grad chi) on elements touching an outlet vertex
/// (a vertex of a pressure edge). Zero matrix when there is no pressure patch.
SparseMatrix outlet_stabilization(const SurfaceMesh& mesh, const BoundaryConditions& bc, double beta);

struct PressureEdge {
    int edge = 0;
    int triangle = 0;
    Vec3 weighted_normal; // n_e |e| / |K|
    double g_p = 0.0;
};

/// Everything the time stepper needs to know about the boundary.
struct BoundarySetup {
    BoundaryConditions bc;
    DiscreteSpaces spaces;
    Lifting lifting;
    std::vector<double> omega_values;    // Dirichlet values of fixed vorticity dofs
    std::vector<double> tangential_load; // per vertex: sum over tangential edges of g_t |e| / 2
    std::vector<PressureEdge> pressure_edges;
    SparseMatrix stabilization; // empty (0x0) when unused
    bool homogeneous = true;
};

struct BoundaryOptions {
    double stabilization_beta = 0.0;
    CgOptions cg{1e-13, 0};
    SolverBackend backend = SolverBackend::cg;
};

BoundarySetup build_boundary_setup(const SurfaceMesh& mesh, const BoundaryConditions& bc,
                                   const BoundaryOptions& options = {});
BoundarySetup homogeneous_setup(const SurfaceMesh& mesh);

/// Harmonic basis of the mixed decomposition (patched spaces).
HarmonicBasis mixed_harmonic_basis(const SurfaceMesh& mesh, const BoundarySetup& setup, std::uint64_t seed,
                                   const HodgeOptions& options = {});

} // namespace surfflow
