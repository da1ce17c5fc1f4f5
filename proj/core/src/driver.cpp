#include "surfflow/driver.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "surfflow/errors.hpp"
#include "surfflow/io.hpp"

namespace surfflow {

namespace {

// random initial fields use a stream far away from the harmonic-basis draws
constexpr std::uint64_t kInitialStream = 0xF1E1D;

// first zero of J0
constexpr double kJ0Zero = 2.404825557695773;

std::string numbered(const std::string& stem, long step, const std::string& ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%06ld", step);
    return stem + buf + ext;
}

} // namespace

SurfaceMesh build_mesh(const MeshSpec& spec) {
    if (spec.file) {
        return load_mesh(*spec.file);
    }
    return generate_mesh(spec.kind, spec.params);
}

ForceField build_force(const SurfaceMesh& mesh, const ForceSpec& spec) {
    switch (spec.kind) {
    case ForceKind::constant: {
        FieldP0Vec F(mesh.triangle_count(), spec.vector);
        F = project_tangent(mesh, F);
        return [F](double) { return F; };
    }
    case ForceKind::pierced_ring: {
        const auto F = pierced_ring_force(mesh, spec.magnitude);
        return [F](double) { return F; };
    }
    default:
        return {};
    }
}

Simulation::Simulation(const RunConfig& config) : config_(config) {
    mesh_ = std::make_unique<SurfaceMesh>(build_mesh(config.mesh));
    const auto& m = *mesh_;
    spdlog::info("mesh: {} vertices, {} triangles, {} boundary loops, h_min {:.3e}", m.vertex_count(),
                 m.triangle_count(), m.boundary_loops().size(), m.min_edge_length());
    if (config.boundary.empty()) {
        setup_ = std::make_unique<BoundarySetup>(homogeneous_setup(m));
        basis_ = std::make_unique<HarmonicBasis>(harmonic_basis(m, config.seed));
    } else {
        BoundaryOptions o;
        o.stabilization_beta = config.stabilization_beta;
        o.backend = config.backend;
        setup_ = std::make_unique<BoundarySetup>(
            build_boundary_setup(m, apply_patch_rules(m, config.boundary), o));
        basis_ = std::make_unique<HarmonicBasis>(mixed_harmonic_basis(m, *setup_, config.seed));
    }
    spdlog::info("harmonic basis: {} fields", basis_->size());
    auto sim = config.sim_config();
    sim.force = build_force(m, config.force);
    solver_ = std::make_unique<FlowSolver>(m, *setup_, *basis_, sim);
    if (config.bench.kind == BenchKind::st) {
        obstacle_ = obstacle_loop(m);
    }
}

FlowState Simulation::initial_state() const {
    const auto& m = *mesh_;
    const auto& init = config_.initial;
    const auto& solver = *solver_;
    auto from_velocity = [&](const FieldP0Vec& V) {
        auto s = solver.ns_init(V);
        if (config_.scheme == Scheme::euler) {
            s = solver.euler_init(s.h, s.omega);
        }
        return s;
    };
    switch (init.kind) {
    case InitialKind::random:
        return from_velocity(init.amplitude * random_tangent_field(m, config_.seed, kInitialStream));
    case InitialKind::kh_torus:
        return from_velocity(kh_torus_initial_velocity(m, init.kh));
    case InitialKind::harmonic: {
        if (static_cast<int>(init.harmonic.size()) > basis_->size()) {
            throw ConfigError("[initial] harmonic: " + std::to_string(init.harmonic.size()) +
                              " coefficients for a basis of size " + std::to_string(basis_->size()));
        }
        auto h = init.harmonic;
        h.resize(basis_->size(), 0.0);
        return from_velocity(basis_->combine(m, h) + setup_->lifting.field);
    }
    case InitialKind::radial: {
        FieldP1 w(m.vertex_count());
        for (int v = 0; v < m.vertex_count(); ++v) {
            const double r = m.vertex(v).norm();
            w[v] = init.amplitude * std::cyl_bessel_j(0.0, kJ0Zero * r / init.radial_scale);
        }
        auto s = solver.euler_init({}, w);
        if (config_.scheme == Scheme::navier_stokes) {
            s = solver.ns_init(solver.velocity(s));
        }
        return s;
    }
    default:
        return from_velocity(setup_->lifting.field);
    }
}

ForceXY Simulation::force_coefficients(const FlowState& s) const {
    if (obstacle_ < 0) {
        throw ConfigError("force coefficients need the channel benchmark ([bench] type = \"st\")");
    }
    const auto p = solver_->recover_pressure(s);
    const auto f = obstacle_force(*mesh_, obstacle_, p, s.omega, solver_->config().nu);
    return coefficients(f, config_.bench.st);
}

RunConfig apply_options(RunConfig config, const RunOptions& options) {
    if (options.seed) {
        config.seed = *options.seed;
    }
    if (options.out_dir) {
        config.output.dir = *options.out_dir;
    }
    config.threads = resolve_threads(options.threads, config.threads);
    return config;
}

int resolve_threads(std::optional<int> cli, int config_value) {
    if (cli) {
        if (*cli < 0) {
            throw ConfigError("--threads must be non-negative");
        }
        return *cli;
    }
    if (const char* env = std::getenv("SURFFLOW_THREADS"); env && *env) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (*end != '\0' || n < 0) {
            throw ConfigError(std::string("SURFFLOW_THREADS='") + env + "' is not a non-negative integer");
        }
        return static_cast<int>(n);
    }
    return config_value;
}

RunResult run(const RunConfig& config, const StepObserver& observer) {
    if (config.threads > 0) {
        set_thread_count(config.threads);
    }
    const Simulation sim(config);
    const auto& solver = sim.solver();
    const auto& mesh = sim.mesh();
    const auto& out = config.output;
    std::filesystem::create_directories(out.dir);

    std::vector<std::string> header = {"t", "e_kin", "mean_omega"};
    const bool st = sim.obstacle() >= 0;
    if (st) {
        header.insert(header.end(), {"cd", "cl"});
    }
    if (config.bench.kind == BenchKind::pierced_ring) {
        header.emplace_back("v_azimuthal");
    }
    if (config.bench.kind == BenchKind::kh) {
        header.emplace_back("vortices");
    }
    CsvTable series(header);
    RunResult result;

    auto record = [&](const FlowState& s, bool completed_step) {
        std::vector<double> row = {s.time, solver.kinetic_energy(s), solver.mean_vorticity(s)};
        if (st) {
            const auto c = sim.force_coefficients(s);
            row.push_back(c.drag);
            row.push_back(c.lift);
            if (completed_step) {
                result.forces.add(s.time, c);
            }
        }
        if (config.bench.kind == BenchKind::pierced_ring) {
            row.push_back(mean_azimuthal_speed(mesh, solver.velocity(s)));
        }
        if (config.bench.kind == BenchKind::kh) {
            const auto c = vortex_census_by_sign(mesh, s.omega, config.bench.census_fraction);
            result.max_vortices = std::max({result.max_vortices, c.positive, c.negative});
            row.push_back(c.total());
        }
        series.add_row(row);
    };
    auto write_vtk_state = [&](const FlowState& s, long step) {
        const auto p = cr_to_p1_average(mesh, solver.recover_pressure(s));
        const auto V = solver.velocity(s);
        const VtkPointScalar ps[] = {{"psi", s.psi.values()}, {"omega", s.omega.values()}, {"p_star", p.values()}};
        const VtkCellVector cv[] = {{"velocity", V.values()}};
        const auto path = out.dir / numbered("state", step, ".vtk");
        write_vtk(path, mesh, ps, cv);
        result.files.push_back(path);
    };
    auto write_snapshot = [&](const FlowState& s, long step) {
        nlohmann::json j;
        j["time"] = s.time;
        j["step"] = step;
        j["psi"] = s.psi.values();
        j["omega"] = s.omega.values();
        j["h"] = s.h;
        const auto path = out.dir / numbered("snapshot", step, ".json");
        write_file_atomic(path, j.dump());
        result.files.push_back(path);
    };

    auto state = sim.initial_state();
    record(state, false);
    if (out.vtk_stride > 0) {
        write_vtk_state(state, 0);
        for (int i = 0; i < sim.basis().size(); ++i) {
            const VtkCellVector cv[] = {{"harmonic", sim.basis().fields[i].values()}};
            const auto path = out.dir / ("basis_" + std::to_string(i) + ".vtk");
            write_vtk(path, mesh, {}, cv);
            result.files.push_back(path);
        }
    }
    if (out.snapshot_stride > 0) {
        write_snapshot(state, 0);
    }
    solver.check_stability(state);

    const long n = config.step_count();
    const long report = std::max(1L, n / 10);
    for (long k = 1; k <= n; ++k) {
        state = solver.step(state);
        if (observer) {
            observer(sim, state, k);
        }
        if (k % out.csv_stride == 0 || k == n) {
            record(state, true);
            solver.check_stability(state);
        }
        if (out.vtk_stride > 0 && k % out.vtk_stride == 0) {
            write_vtk_state(state, k);
        }
        if (out.snapshot_stride > 0 && k % out.snapshot_stride == 0) {
            write_snapshot(state, k);
        }
        if (k % report == 0) {
            spdlog::info("step {}/{} t = {:.4f} E = {:.6e}", k, n, state.time, solver.kinetic_energy(state));
        }
    }
    const auto csv_path = out.dir / out.csv;
    series.write(csv_path);
    result.files.push_back(csv_path);
    if (st) {
        const auto forces_path = out.dir / "forces.csv";
        write_file_atomic(forces_path, result.forces.csv());
        result.files.push_back(forces_path);
    }
    result.steps = n;
    result.final_energy = solver.kinetic_energy(state);
    result.final_state = std::move(state);
    return result;
}

int exit_code(const std::exception& e) {
    if (dynamic_cast<const BlowUpError*>(&e)) {
        return 5;
    }
    if (dynamic_cast<const ConfigError*>(&e)) {
        return 2;
    }
    if (dynamic_cast<const MeshError*>(&e)) {
        return 3;
    }
    if (dynamic_cast<const SolverError*>(&e)) {
        return 4;
    }
    return 1;
}

} // namespace surfflow
