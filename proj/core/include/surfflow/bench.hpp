#pragma once

#include <string>
#include <vector>

#include "surfflow/fem.hpp"

namespace surfflow {

/// Flat channel benchmark with a circular obstacle (Re = V_mean L / nu = 100).
struct StBenchParams {
    double L = 0.1; // obstacle diameter
    double v_mean = 1.0;
    double v_max = 1.5;
    double nu = 0.001;
    double width = 2.2;
    double height = 0.41;
    double center_x = 0.2;
    double center_y = 0.2;
    double radius = 0.05;

    [[nodiscard]] double reynolds() const { return v_mean * L / nu; }
};

struct ForceXY {
    double drag = 0.0; // x component
    double lift = 0.0; // y component
};

/// Shortest boundary loop, which is the obstacle rim on the benchmark meshes.
/// Throws ConfigError on a closed mesh.
int obstacle_loop(const SurfaceMesh& mesh);

/// Force exerted by the fluid on the obstacle, sum over loop edges of
/// (-p N + nu omega T) |e| at the edge midpoint. N points from the obstacle
/// into the fluid and T = J N. p* is used in place of p: V = 0 on the rim, so
/// the two differ by a constant whose integral against N vanishes.
ForceXY obstacle_force(const SurfaceMesh& mesh, int loop, const FieldCR& p_star, const FieldP1& omega, double nu);

/// C = 2 F / (V_mean^2 L)
ForceXY coefficients(const ForceXY& force, const StBenchParams& params);

struct ForceSeries {
    std::vector<double> t;
    std::vector<double> cd;
    std::vector<double> cl;

    void add(double time, const ForceXY& c);
    [[nodiscard]] std::size_t size() const { return t.size(); }
    /// `t,cd,cl` with full precision.
    [[nodiscard]] std::string csv() const;
};

/// St = L f / V_mean with f from the mean spacing of upward zero crossings
/// of C_L - mean(C_L) after t_start. A crossing is only counted once the
/// signal has dipped below -band since the previous one (band = 5% of the
/// amplitude) so noise cannot create extra crossings. Throws SolverError
/// when fewer than three periods are found.
double strouhal(const ForceSeries& series, double t_start, const StBenchParams& params);

/// Extrema of C_D and C_L after t_start.
struct CoefficientRange {
    double cd_min = 0.0, cd_max = 0.0, cl_min = 0.0, cl_max = 0.0;
};
CoefficientRange coefficient_range(const ForceSeries& series, double t_start);

struct ReferenceCheck {
    std::string name;
    double value = 0.0;
    double lo = 0.0, hi = 0.0;
    [[nodiscard]] bool ok() const { return value >= lo && value <= hi; }
};

/// Coarse-resolution reference values of the channel benchmark, with
/// tolerances for mesh differences: C_D bracket +-3%, |C_L| extremes +-8%,
/// St +-0.01. A NaN St fails.
std::vector<ReferenceCheck> st_reference_checks(const CoefficientRange& range, double st);

struct KhParams {
    double v_inf = 1.0;
    double delta0 = 0.2;
    double c_n = 0.02;
};

/// V_inf tanh(y / delta0) (z, 0, -x): the unperturbed shear layer at p.
Vec3 kh_shear(const Vec3& p, const KhParams& params = {});

/// Shear layer on the torus around the y-axis plus the cos(4 theta)
/// streamfunction perturbation, as a tangential P0 field. Throws ConfigError
/// when the mesh is not a torus.
FieldP0Vec kh_torus_initial_velocity(const SurfaceMesh& mesh, const KhParams& params = {});

/// Clockwise (seen from +z) azimuthal unit direction at p, (y, -x, 0) / r.
Vec3 clockwise_azimuth(const Vec3& p);

/// Constant clockwise azimuthal force of the given magnitude, projected onto
/// each element.
FieldP0Vec pierced_ring_force(const SurfaceMesh& mesh, double magnitude = 0.1);

/// Area-weighted mean of <V, clockwise azimuth>.
double mean_azimuthal_speed(const SurfaceMesh& mesh, const FieldP0Vec& V);

struct VortexCount {
    int positive = 0;
    int negative = 0;
    [[nodiscard]] int total() const { return positive + negative; }
};

/// Connected vertex components with |omega| >= fraction * max|omega|,
/// counted separately for each sign. Throws ConfigError unless 0 < fraction < 1.
VortexCount vortex_census_by_sign(const SurfaceMesh& mesh, const FieldP1& omega, double fraction);
int vortex_census(const SurfaceMesh& mesh, const FieldP1& omega, double fraction);

} // namespace surfflow
