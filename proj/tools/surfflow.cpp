// Command line front end: mesh generation, Hodge diagnostics, simulation and
// the two benchmark harnesses.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "surfflow/driver.hpp"
#include "surfflow/errors.hpp"
#include "surfflow/io.hpp"

using namespace surfflow;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out_dir;
    std::vector<std::string> overrides; // section.key=value
    bool verbose = false;
    bool quiet = false;
};

RunOptions options_of(const Globals& g) {
    RunOptions o;
    o.seed = g.seed;
    o.threads = g.threads;
    if (!g.out_dir.empty()) {
        o.out_dir = g.out_dir;
    }
    return o;
}

// Config file (or built-in defaults) with --set overrides applied.
RunConfig load(const Globals& g, const std::string& fallback = {}) {
    const std::string path = g.config.empty() ? fallback : g.config;
    RunConfig c = path.empty() ? parse_config_text("", {}, g.overrides) : parse_config(path, g.overrides);
    return apply_options(std::move(c), options_of(g));
}

void setup_threads(const RunConfig& c) {
    if (c.threads > 0) {
        set_thread_count(c.threads);
    }
}

int cmd_mesh_gen(const Globals& g, const std::string& out) {
    const auto c = load(g);
    const auto mesh = build_mesh(c.mesh);
    const auto fmt = fs::path(out).extension() == ".obj" ? MeshFormat::obj : MeshFormat::off;
    save_mesh(mesh, out, fmt);
    std::printf("%s: %d vertices, %d edges, %d triangles, euler characteristic %d, %zu boundary loops\n",
                out.c_str(), mesh.vertex_count(), mesh.edge_count(), mesh.triangle_count(),
                mesh.euler_characteristic(), mesh.boundary_loops().size());
    return 0;
}

int cmd_hodge_info(const Globals& g, int probes) {
    const auto c = load(g);
    setup_threads(c);
    const auto mesh = build_mesh(c.mesh);
    std::printf("vertices %d  edges %d  triangles %d\n", mesh.vertex_count(), mesh.edge_count(),
                mesh.triangle_count());
    std::printf("euler characteristic %d  boundary loops %zu  h_min %.4e  h_max %.4e\n",
                mesh.euler_characteristic(), mesh.boundary_loops().size(), mesh.min_edge_length(),
                mesh.max_edge_length());
    BoundarySetup setup = homogeneous_setup(mesh);
    if (!c.boundary.empty()) {
        setup = build_boundary_setup(mesh, apply_patch_rules(mesh, c.boundary));
    }
    const int expected = c.boundary.empty() ? betti_dimension(mesh) : mixed_harmonic_dimension(mesh, setup.spaces);
    const HodgeProjector projector(mesh, setup.spaces);
    const int rank = harmonic_rank(projector, expected + probes, c.seed);
    const auto basis = c.boundary.empty() ? harmonic_basis(mesh, c.seed) : mixed_harmonic_basis(mesh, setup, c.seed);
    double orth = 0.0;
    for (int i = 0; i < basis.size(); ++i) {
        for (int j = 0; j < basis.size(); ++j) {
            const double ip = inner_vec(mesh, basis.fields[i], basis.fields[j]);
            orth = std::max(orth, std::abs(ip - (i == j ? 1.0 : 0.0)));
        }
    }
    std::printf("harmonic dimension: counted %d  numerical rank %d  basis size %d\n", expected, rank, basis.size());
    std::printf("basis orthonormality defect %.3e\n", orth);
    if (!g.out_dir.empty()) {
        for (int i = 0; i < basis.size(); ++i) {
            const VtkCellVector cv[] = {{"harmonic", basis.fields[i].values()}};
            write_vtk(fs::path(g.out_dir) / ("basis_" + std::to_string(i) + ".vtk"), mesh, {}, cv);
        }
    }
    return rank == expected ? 0 : 4;
}

int cmd_decompose(const Globals& g, int samples) {
    const auto c = load(g);
    setup_threads(c);
    const auto mesh = build_mesh(c.mesh);
    const auto spaces = homogeneous_spaces(mesh);
    const HodgeProjector projector(mesh, spaces);
    const auto basis = harmonic_basis(mesh, c.seed);
    const HodgeDecomposer dec(projector, basis);
    double worst_orth = 0.0, worst_pyth = 0.0, worst_res = 0.0;
    for (int k = 0; k < samples; ++k) {
        const auto X = random_tangent_field(mesh, c.seed, 7919 + static_cast<std::uint64_t>(k));
        const auto comp = dec.decompose(X);
        const auto G = grad_h_cr(mesh, comp.q);
        const auto R = rot_h(mesh, comp.psi);
        const auto H = basis.combine(mesh, comp.h_coeffs);
        const double nx = norm_vec(mesh, X);
        const double ng = norm_vec(mesh, G), nr = norm_vec(mesh, R), nh = norm_vec(mesh, H);
        const double scale = nx * nx;
        worst_orth = std::max({worst_orth, std::abs(inner_vec(mesh, G, R)) / scale,
                               std::abs(inner_vec(mesh, G, H)) / scale, std::abs(inner_vec(mesh, R, H)) / scale});
        worst_pyth = std::max(worst_pyth, std::abs(ng * ng + nr * nr + nh * nh - scale) / scale);
        worst_res = std::max(worst_res, comp.residual);
        if (k == 0) {
            std::printf("sample 0: |X|^2 %.6e  |grad q|^2 %.6e  |rot psi|^2 %.6e  |H|^2 %.6e\n", scale, ng * ng,
                        nr * nr, nh * nh);
            if (!g.out_dir.empty()) {
                const VtkCellVector cv[] = {
                    {"field", X.values()}, {"gradient", G.values()}, {"rotation", R.values()}, {"harmonic", H.values()}};
                write_vtk(fs::path(g.out_dir) / "decomposition.vtk", mesh, {}, cv);
            }
        }
    }
    std::printf("%d samples: max orthogonality %.3e  max Pythagoras defect %.3e  max residual %.3e\n", samples,
                worst_orth, worst_pyth, worst_res);
    return 0;
}

int cmd_simulate(const Globals& g) {
    if (g.config.empty()) {
        throw ConfigError("simulate needs --config");
    }
    const auto c = load(g);
    const auto r = run(c);
    std::printf("%ld steps, t = %.6g, kinetic energy %.6e, output in %s\n", r.steps, r.final_state.time,
                r.final_energy, c.output.dir.string().c_str());
    return 0;
}

int cmd_bench_st(const Globals& g, bool verify, std::optional<double> t_end) {
    auto c = load(g, std::string(SURFFLOW_CONFIG_DIR) + "/st2d2.cfg");
    if (t_end) {
        c.t_end = *t_end;
    }
    if (c.bench.kind != BenchKind::st) {
        throw ConfigError("bench-st needs [bench] type = \"st\"");
    }
    const auto r = run(c);
    const auto range = coefficient_range(r.forces, c.bench.t_start);
    std::printf("C_D in [%.5f, %.5f]  C_L in [%.5f, %.5f]\n", range.cd_min, range.cd_max, range.cl_min, range.cl_max);
    double st = std::nan("");
    try {
        st = strouhal(r.forces, c.bench.t_start, c.bench.st);
        std::printf("St = %.5f\n", st);
    } catch (const SolverError& e) {
        std::printf("St unavailable: %s\n", e.what());
    }
    if (!verify) {
        return 0;
    }
    const auto checks = st_reference_checks(range, st);
    bool all = true;
    for (const auto& ch : checks) {
        std::printf("%s %-10s %.5f  (accepted [%.5f, %.5f])\n", ch.ok() ? "PASS" : "FAIL", ch.name.c_str(), ch.value,
                    ch.lo, ch.hi);
        all = all && ch.ok();
    }
    return all ? 0 : 1;
}

int cmd_bench_kh(const Globals& g, std::optional<double> t_end) {
    auto c = load(g, std::string(SURFFLOW_CONFIG_DIR) + "/kh_torus.cfg");
    if (t_end) {
        c.t_end = *t_end;
    }
    if (c.bench.kind != BenchKind::kh) {
        throw ConfigError("bench-kh needs [bench] type = \"kh\"");
    }
    double prev = -1.0, worst_increase = 0.0, worst_mean = 0.0;
    long first_four = -1;
    const auto observer = [&](const Simulation& sim, const FlowState& s, long step) {
        const double e = sim.solver().kinetic_energy(s);
        if (prev > 0.0) {
            worst_increase = std::max(worst_increase, (e - prev) / prev);
        }
        prev = e;
        worst_mean = std::max(worst_mean, std::abs(sim.solver().mean_vorticity(s)));
        if (first_four < 0 && step % 10 == 0) {
            const auto v = vortex_census_by_sign(sim.mesh(), s.omega, c.bench.census_fraction);
            if (std::max(v.positive, v.negative) >= 4) {
                first_four = step;
            }
        }
    };
    const auto r = run(c, observer);
    std::printf("%ld steps, final kinetic energy %.6e\n", r.steps, r.final_energy);
    std::printf("max relative energy increase per step %.3e, max |mean omega| %.3e\n", worst_increase, worst_mean);
    std::printf("max same-sign vortex count %d", r.max_vortices);
    if (first_four >= 0) {
        std::printf(", four reached at step %ld", first_four);
    }
    std::printf("\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incompressible flow on triangulated surfaces"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Run configuration (TOML)");
    app.add_option("--seed", g.seed, "Random seed (overrides [run] seed)");
    app.add_option("--threads", g.threads, "Worker threads (overrides SURFFLOW_THREADS and [run] threads)");
    app.add_option("--out-dir", g.out_dir, "Output directory (overrides [output] dir)");
    app.add_option("--set", g.overrides, "Config override section.key=value (repeatable), e.g. --set mesh.kind=torus");
    app.add_flag("-v,--verbose", g.verbose, "Debug logging");
    app.add_flag("-q,--quiet", g.quiet, "Warnings and errors only");

    std::string out = "mesh.off";
    auto* mesh_gen = app.add_subcommand("mesh-gen", "Generate a mesh and write it as OFF or OBJ");
    mesh_gen->add_option("-o,--output", out, "Output file (.off or .obj)");
    int probes = 3;
    auto* hodge = app.add_subcommand("hodge-info", "Topology, harmonic dimension and basis of a mesh");
    hodge->add_option("--probes", probes, "Extra random probes for the rank estimate");
    int samples = 10;
    auto* decompose = app.add_subcommand("decompose", "Decompose random fields and report the identities");
    decompose->add_option("--samples", samples, "Number of random fields");
    auto* simulate = app.add_subcommand("simulate", "Run a simulation from --config");
    bool verify = false;
    std::optional<double> t_end;
    auto* bench_st = app.add_subcommand("bench-st", "Channel benchmark: drag, lift and Strouhal number");
    bench_st->add_flag("--verify", verify, "Compare against the coarse reference row and fail outside tolerance");
    bench_st->add_option("--t-end", t_end, "Override the end time");
    auto* bench_kh = app.add_subcommand("bench-kh", "Kelvin-Helmholtz torus run with property checks");
    bench_kh->add_option("--t-end", t_end, "Override the end time");
    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(g.verbose ? spdlog::level::debug : g.quiet ? spdlog::level::warn : spdlog::level::info);

    try {
        if (*mesh_gen) {
            return cmd_mesh_gen(g, out);
        }
        if (*hodge) {
            return cmd_hodge_info(g, probes);
        }
        if (*decompose) {
            return cmd_decompose(g, samples);
        }
        if (*simulate) {
            return cmd_simulate(g);
        }
        if (*bench_st) {
            return cmd_bench_st(g, verify, t_end);
        }
        if (*bench_kh) {
            return cmd_bench_kh(g, t_end);
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return exit_code(e);
    }
    return 0;
}
