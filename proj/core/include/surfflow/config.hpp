#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surfflow/bcs.hpp"
#include "surfflow/bench.hpp"
#include "surfflow/generators.hpp"
#include "surfflow/stepper.hpp"

namespace surfflow {

struct MeshSpec {
    std::optional<std::filesystem::path> file; // takes precedence over the generator
    MeshKind kind = MeshKind::torus;
    GeneratorParams params;
};

enum class InitialKind { zero, random, harmonic, kh_torus, radial };
enum class ForceKind { none, constant, pierced_ring };
enum class BenchKind { none, st, pierced_ring, kh };

struct InitialSpec {
    InitialKind kind = InitialKind::zero;
    double amplitude = 1.0;        // random, radial
    std::vector<double> harmonic;  // harmonic coefficients
    KhParams kh;
    double radial_scale = 1.0;     // radial: omega0 = amplitude * J0(3.8317 r / radial_scale)
};

struct ForceSpec {
    ForceKind kind = ForceKind::none;
    Vec3 vector = Vec3::Zero(); // constant: ambient vector projected per element
    double magnitude = 0.1;     // pierced_ring
};

struct OutputSpec {
    std::filesystem::path dir = "out";
    int csv_stride = 1;
    int vtk_stride = 0;      // 0 disables VTK output
    int snapshot_stride = 0; // 0 disables JSON state snapshots
    std::string csv = "series.csv";
};

struct BenchSpec {
    BenchKind kind = BenchKind::none;
    double t_start = 10.0;
    double census_fraction = 0.5;
    StBenchParams st;
};

/// Everything a run needs, after validation.
struct RunConfig {
    MeshSpec mesh;
    Scheme scheme = Scheme::navier_stokes;
    double nu = 0.0;
    double dt = 1e-3;
    double t_end = 1.0;
    CurvatureMode curvature_mode = CurvatureMode::angle_defect;
    double curvature_value = 0.0;
    bool lumped_mass = false;
    SolverBackend backend = SolverBackend::cg;
    CgOptions cg{1e-10, 0};
    double stabilization_beta = 0.0;
    double blowup_speed = 1e8;
    InitialSpec initial;
    ForceSpec force;
    std::vector<PatchRule> boundary;
    OutputSpec output;
    BenchSpec bench;
    std::uint64_t seed = 1;
    int threads = 0; // 0: leave the library default

    /// Number of steps to reach t_end (rounded to the nearest integer).
    [[nodiscard]] long step_count() const;
    /// SimConfig without the force (the driver builds it from the mesh).
    [[nodiscard]] SimConfig sim_config() const;
};

/// Parses TOML text. Syntax errors name the line; unknown sections or keys
/// and invalid values are collected and reported together as one ConfigError.
/// Relative mesh file paths are resolved against `base_dir`.
/// `overrides` are `section.key=value` strings (value in TOML syntax, bare
/// words taken as strings) that replace or add entries before validation.
RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir = {},
                            const std::vector<std::string>& overrides = {});
RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Semantic checks; returns one message per violation.
std::vector<std::string> validate(const RunConfig& config);

std::string to_string(Scheme scheme);
std::string to_string(CurvatureMode mode);

} // namespace surfflow
