#include "surfflow/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "surfflow/errors.hpp"
#include "surfflow/io.hpp"

namespace surfflow {

int obstacle_loop(const SurfaceMesh& mesh) {
    const auto& loops = mesh.boundary_loops();
    if (loops.empty()) {
        throw ConfigError("mesh has no boundary loop to act as obstacle");
    }
    int best = 0;
    for (int i = 1; i < static_cast<int>(loops.size()); ++i) {
        if (loops[i].length < loops[best].length) {
            best = i;
        }
    }
    return best;
}

ForceXY obstacle_force(const SurfaceMesh& mesh, int loop, const FieldCR& p_star, const FieldP1& omega, double nu) {
    const auto& loops = mesh.boundary_loops();
    if (loop < 0 || loop >= static_cast<int>(loops.size())) {
        throw ConfigError("obstacle loop " + std::to_string(loop) + " does not exist");
    }
    Vec3 f = Vec3::Zero();
    for (int e : loops[loop].edges) {
        const Edge& ed = mesh.edge(e);
        const double len = mesh.edge_length(e);
        const Vec3 N = -mesh.boundary_outward_normal(e);
        const Vec3 T = mesh.normal(ed.tri[0]).cross(N);
        const double w = 0.5 * (omega[ed.v[0]] + omega[ed.v[1]]);
        f += (-p_star[e] * N + nu * w * T) * len;
    }
    return {f.x(), f.y()};
}

ForceXY coefficients(const ForceXY& force, const StBenchParams& params) {
    const double s = 2.0 / (params.v_mean * params.v_mean * params.L);
    return {s * force.drag, s * force.lift};
}

void ForceSeries::add(double time, const ForceXY& c) {
    t.push_back(time);
    cd.push_back(c.drag);
    cl.push_back(c.lift);
}

std::string ForceSeries::csv() const {
    CsvTable table({"t", "cd", "cl"});
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double row[3] = {t[i], cd[i], cl[i]};
        table.add_row(row);
    }
    return table.str();
}

double strouhal(const ForceSeries& series, double t_start, const StBenchParams& params) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.t[i] >= t_start) {
            idx.push_back(i);
        }
    }
    if (idx.size() < 3) {
        throw SolverError("lift series too short after t_start");
    }
    double mean = 0.0;
    for (auto i : idx) {
        mean += series.cl[i];
    }
    mean /= static_cast<double>(idx.size());
    double amp = 0.0;
    for (auto i : idx) {
        amp = std::max(amp, std::abs(series.cl[i] - mean));
    }
    const double band = 0.05 * amp;
    std::vector<double> crossings;
    bool armed = false;
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const double a = series.cl[idx[k - 1]] - mean;
        const double b = series.cl[idx[k]] - mean;
        if (a < -band) {
            armed = true;
        }
        if (armed && a < 0.0 && b >= 0.0) {
            const double ta = series.t[idx[k - 1]];
            const double tb = series.t[idx[k]];
            crossings.push_back(ta + (tb - ta) * (-a) / (b - a));
            armed = false;
        }
    }
    if (amp == 0.0 || crossings.size() < 4) {
        throw SolverError("fewer than three lift periods after t = " + format_double(t_start));
    }
    const double period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    return params.L / (period * params.v_mean);
}

CoefficientRange coefficient_range(const ForceSeries& series, double t_start) {
    CoefficientRange r;
    bool first = true;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.t[i] < t_start) {
            continue;
        }
        if (first) {
            r = {series.cd[i], series.cd[i], series.cl[i], series.cl[i]};
            first = false;
        }
        r.cd_min = std::min(r.cd_min, series.cd[i]);
        r.cd_max = std::max(r.cd_max, series.cd[i]);
        r.cl_min = std::min(r.cl_min, series.cl[i]);
        r.cl_max = std::max(r.cl_max, series.cl[i]);
    }
    if (first) {
        throw SolverError("no samples after t = " + format_double(t_start));
    }
    return r;
}

Vec3 kh_shear(const Vec3& p, const KhParams& params) {
    return params.v_inf * std::tanh(p.y() / params.delta0) * Vec3(p.z(), 0.0, -p.x());
}

FieldP0Vec kh_torus_initial_velocity(const SurfaceMesh& mesh, const KhParams& params) {
    if (!mesh.is_closed() || mesh.euler_characteristic() != 0) {
        throw ConfigError("Kelvin-Helmholtz initial data needs a torus mesh");
    }
    FieldP1 psi0(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const Vec3& p = mesh.vertex(v);
        psi0[v] = std::cos(4.0 * std::atan2(p.z(), p.x()));
    }
    const FieldP0Vec r0 = rot_h(mesh, psi0);
    FieldP0Vec V(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const Vec3 c = mesh.centroid(t);
        const Vec3 shear = kh_shear(c, params);
        const double r = std::hypot(c.x(), c.z());
        const double y2 = c.y() * c.y() / (params.delta0 * params.delta0);
        const Vec3& n = mesh.normal(t);
        V[t] = shear - shear.dot(n) * n + params.c_n * r * std::exp(-y2) * r0[t];
    }
    return V;
}

Vec3 clockwise_azimuth(const Vec3& p) {
    const double r = std::hypot(p.x(), p.y());
    if (r == 0.0) {
        return Vec3::Zero();
    }
    return Vec3(p.y() / r, -p.x() / r, 0.0);
}

FieldP0Vec pierced_ring_force(const SurfaceMesh& mesh, double magnitude) {
    FieldP0Vec F(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const Vec3& n = mesh.normal(t);
        Vec3 a = clockwise_azimuth(mesh.centroid(t));
        a -= a.dot(n) * n;
        const double len = a.norm();
        F[t] = len > 0.0 ? Vec3(magnitude / len * a) : Vec3::Zero();
    }
    return F;
}

double mean_azimuthal_speed(const SurfaceMesh& mesh, const FieldP0Vec& V) {
    double s = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        s += mesh.area(t) * V[t].dot(clockwise_azimuth(mesh.centroid(t)));
    }
    return s / mesh.total_area();
}

VortexCount vortex_census_by_sign(const SurfaceMesh& mesh, const FieldP1& omega, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ConfigError("vortex threshold fraction must lie in (0, 1)");
    }
    double peak = 0.0;
    for (double w : omega) {
        peak = std::max(peak, std::abs(w));
    }
    VortexCount count;
    if (peak == 0.0) {
        return count;
    }
    const double thr = fraction * peak;
    const int n = mesh.vertex_count();
    // sign class per vertex: +1, -1 or 0 (below threshold)
    std::vector<int> cls(n, 0);
    for (int v = 0; v < n; ++v) {
        if (std::abs(omega[v]) >= thr) {
            cls[v] = omega[v] > 0.0 ? 1 : -1;
        }
    }
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const Edge& e : mesh.edges()) {
        if (cls[e.v[0]] != 0 && cls[e.v[0]] == cls[e.v[1]]) {
            parent[find(e.v[0])] = find(e.v[1]);
        }
    }
    for (int v = 0; v < n; ++v) {
        if (cls[v] != 0 && find(v) == v) {
            (cls[v] > 0 ? count.positive : count.negative)++;
        }
    }
    return count;
}

int vortex_census(const SurfaceMesh& mesh, const FieldP1& omega, double fraction) {
    return vortex_census_by_sign(mesh, omega, fraction).total();
}

std::vector<ReferenceCheck> st_reference_checks(const CoefficientRange& range, double st) {
    return {
        {"C_D min", range.cd_min, 3.02488 * 0.97, 3.02488 * 1.03},
        {"C_D max", range.cd_max, 3.09034 * 0.97, 3.09034 * 1.03},
        {"|C_L max|", std::abs(range.cl_max), 1.01468 * 0.92, 1.01468 * 1.08},
        {"|C_L min|", std::abs(range.cl_min), 1.02589 * 0.92, 1.02589 * 1.08},
        {"St", st, 0.30390 - 0.01, 0.30390 + 0.01},
    };
}

} // namespace surfflow
