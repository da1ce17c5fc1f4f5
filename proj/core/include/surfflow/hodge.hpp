#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "surfflow/fem.hpp"

namespace surfflow {

/// l = |E| - |V| - |T| + 1, plus one more on closed surfaces.
int betti_dimension(const SurfaceMesh& mesh);

/// Orthonormal (under inner_vec) basis of the discrete harmonic fields.
struct HarmonicBasis {
    std::vector<FieldP0Vec> fields;
    Eigen::MatrixXd gram; // (H_i, H_j)_h, identity up to round-off

    [[nodiscard]] int size() const { return static_cast<int>(fields.size()); }
    /// sum_i c_i H_i
    [[nodiscard]] FieldP0Vec combine(const SurfaceMesh& mesh, const std::vector<double>& coeffs) const;
    /// (X, H_i)_h for every i
    [[nodiscard]] std::vector<double> project(const SurfaceMesh& mesh, const FieldP0Vec& X) const;
};

struct HodgeOptions {
    CgOptions cg{1e-12, 0, Preconditioner::jacobi};
    SolverBackend backend = SolverBackend::cg;
    int max_redraws = 5;
    double rank_tol = 1e-8; // relative Gram-Schmidt pivot threshold
};

/// Removes the rot(S) and grad(Q) parts of a field by the two Poisson solves
/// (rot xi, rot phi) = (X, rot phi) and (grad zeta, grad q) = (X, grad q).
/// The solvers are factored (or set up) once.
class HodgeProjector {
public:
    HodgeProjector(const SurfaceMesh& mesh, const DiscreteSpaces& spaces, const HodgeOptions& options = {});

    [[nodiscard]] FieldP1 stream_part(const FieldP0Vec& X) const;
    [[nodiscard]] FieldCR potential_part(const FieldP0Vec& X) const;
    /// X - rot(xi) - grad(zeta), applied `passes` times.
    [[nodiscard]] FieldP0Vec harmonic_remainder(const FieldP0Vec& X, int passes = 2) const;

    [[nodiscard]] const SurfaceMesh& mesh() const { return *mesh_; }
    [[nodiscard]] const DiscreteSpaces& spaces() const { return spaces_; }

private:
    const SurfaceMesh* mesh_;
    DiscreteSpaces spaces_;
    ConstrainedSolver stream_;
    ConstrainedSolver potential_;
};

/// Random-projection construction: draw `dimension` random tangential fields,
/// project out the rot and grad parts, then modified Gram-Schmidt with one
/// reorthogonalization pass. A rank-deficient draw is redrawn up to
/// `max_redraws` times before LinearDependenceError.
HarmonicBasis harmonic_basis(const HodgeProjector& projector, int dimension, std::uint64_t seed,
                             const HodgeOptions& options = {});
/// Homogeneous setting (S^1_0, CR^1 with zero mean), l = betti_dimension.
HarmonicBasis harmonic_basis(const SurfaceMesh& mesh, std::uint64_t seed, const HodgeOptions& options = {});

/// Numerical rank of the harmonic space: projects `probes` random fields and
/// counts Gram eigenvalues above rank_tol times the largest.
int harmonic_rank(const HodgeProjector& projector, int probes, std::uint64_t seed, const HodgeOptions& options = {});

/// Tangential per-element random field with entries uniform in (-1, 1),
/// keyed by (seed, stream, element) so it is independent of evaluation order.
FieldP0Vec random_tangent_field(const SurfaceMesh& mesh, std::uint64_t seed, std::uint64_t stream);

struct HodgeComponents {
    FieldCR q;
    FieldP1 psi;
    std::vector<double> h_coeffs;
    double residual = 0.0; // ||X - grad q - rot psi - sum h_i H_i||_h
};

/// Decomposes fields against a fixed basis; reuses the projector's solvers.
class HodgeDecomposer {
public:
    HodgeDecomposer(const HodgeProjector& projector, const HarmonicBasis& basis);

    [[nodiscard]] HodgeComponents decompose(const FieldP0Vec& X) const;
    /// grad q + rot psi + sum h_i H_i
    [[nodiscard]] FieldP0Vec reconstruct(const HodgeComponents& c) const;

private:
    const HodgeProjector* projector_;
    const HarmonicBasis* basis_;
};

/// One-shot homogeneous decomposition.
HodgeComponents hodge_decompose(const SurfaceMesh& mesh, const HarmonicBasis& basis, const FieldP0Vec& X,
                                const HodgeOptions& options = {});

} // namespace surfflow
