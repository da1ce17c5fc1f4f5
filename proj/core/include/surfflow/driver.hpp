#pragma once

#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "surfflow/config.hpp"

namespace surfflow {

SurfaceMesh build_mesh(const MeshSpec& spec);
/// Empty function for ForceKind::none.
ForceField build_force(const SurfaceMesh& mesh, const ForceSpec& spec);

/// Mesh, boundary setup, harmonic basis and solver of one run. Members keep
/// stable addresses (the solver points into the others), so the object is
/// neither copyable nor movable.
class Simulation {
public:
    explicit Simulation(const RunConfig& config);
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    [[nodiscard]] const RunConfig& config() const { return config_; }
    [[nodiscard]] const SurfaceMesh& mesh() const { return *mesh_; }
    [[nodiscard]] const BoundarySetup& setup() const { return *setup_; }
    [[nodiscard]] const HarmonicBasis& basis() const { return *basis_; }
    [[nodiscard]] const FlowSolver& solver() const { return *solver_; }
    /// -1 unless the run is the channel benchmark.
    [[nodiscard]] int obstacle() const { return obstacle_; }

    [[nodiscard]] FlowState initial_state() const;
    [[nodiscard]] ForceXY force_coefficients(const FlowState& s) const;

private:
    RunConfig config_;
    std::unique_ptr<SurfaceMesh> mesh_;
    std::unique_ptr<BoundarySetup> setup_;
    std::unique_ptr<HarmonicBasis> basis_;
    std::unique_ptr<FlowSolver> solver_;
    int obstacle_ = -1;
};

/// Command-line overrides of config values.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::filesystem::path> out_dir;
};

RunConfig apply_options(RunConfig config, const RunOptions& options);

/// Thread count from (in order) the command line, SURFFLOW_THREADS, and the
/// config; 0 means the library default.
int resolve_threads(std::optional<int> cli, int config_value);

struct RunResult {
    long steps = 0;
    FlowState final_state;
    double final_energy = 0.0;
    ForceSeries forces; // channel benchmark only
    int max_vortices = 0;
    std::vector<std::filesystem::path> files;
};

/// Called after every completed step.
using StepObserver = std::function<void(const Simulation&, const FlowState&, long step)>;

/// Runs to t_end, writing the CSV series (t, e_kin, mean_omega, then cd, cl on
/// the channel benchmark), optional VTK files and JSON snapshots into
/// config.output.dir. Every file is written atomically.
RunResult run(const RunConfig& config, const StepObserver& observer = {});

/// Exit status of the CLI for an exception: config 2, mesh 3, solver 4,
/// blow-up 5, anything else 1.
int exit_code(const std::exception& e);

} // namespace surfflow
