#include "surfflow/hodge.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include "surfflow/errors.hpp"

namespace surfflow {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform_pm1(std::uint64_t key) {
    // top 53 bits -> [0,1) -> (-1,1)
    const double u = static_cast<double>(splitmix(key) >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

ConstrainedSolver make_solver(const SparseMatrix& A, const ScalarSpace& space, std::vector<double> weights,
                              const HodgeOptions& o) {
    return ConstrainedSolver(A, space.fixed, space.zero_mean ? std::move(weights) : std::vector<double>{}, o.cg,
                             o.backend);
}

} // namespace

int betti_dimension(const SurfaceMesh& mesh) {
    return mesh.edge_count() - mesh.vertex_count() - mesh.triangle_count() + 1 + (mesh.is_closed() ? 1 : 0);
}

FieldP0Vec HarmonicBasis::combine(const SurfaceMesh& mesh, const std::vector<double>& coeffs) const {
    FieldP0Vec out(mesh.triangle_count(), Vec3::Zero());
    for (int i = 0; i < size(); ++i) {
        axpy(coeffs[i], fields[i], out);
    }
    return out;
}

std::vector<double> HarmonicBasis::project(const SurfaceMesh& mesh, const FieldP0Vec& X) const {
    std::vector<double> c(fields.size());
    for (int i = 0; i < size(); ++i) {
        c[i] = inner_vec(mesh, X, fields[i]);
    }
    return c;
}

FieldP0Vec random_tangent_field(const SurfaceMesh& mesh, std::uint64_t seed, std::uint64_t stream) {
    FieldP0Vec X(mesh.triangle_count());
    const std::uint64_t base = splitmix(splitmix(seed) ^ (stream * 0xd1342543de82ef95ULL));
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const std::uint64_t k = splitmix(base + static_cast<std::uint64_t>(t));
        Vec3 v(uniform_pm1(k), uniform_pm1(k + 1), uniform_pm1(k + 2));
        const Vec3& n = mesh.normal(t);
        X[t] = v - n.dot(v) * n;
    }
    return X;
}

HodgeProjector::HodgeProjector(const SurfaceMesh& mesh, const DiscreteSpaces& spaces, const HodgeOptions& options)
    : mesh_(&mesh), spaces_(spaces),
      stream_(make_solver(stiffness_p1(mesh), spaces.stream, p1_weights(mesh), options)),
      potential_(make_solver(stiffness_cr(mesh), spaces.potential, cr_weights(mesh), options)) {}

FieldP1 HodgeProjector::stream_part(const FieldP0Vec& X) const {
    auto r = stream_.solve(rot_weak_p1(*mesh_, X));
    if (!r.report.converged) {
        spdlog::warn("stream projection did not converge (residual {:.3e})", r.report.relative_residual);
    }
    return FieldP1(std::move(r.x));
}

FieldCR HodgeProjector::potential_part(const FieldP0Vec& X) const {
    auto r = potential_.solve(grad_weak_cr(*mesh_, X));
    if (!r.report.converged) {
        spdlog::warn("potential projection did not converge (residual {:.3e})", r.report.relative_residual);
    }
    return FieldCR(std::move(r.x));
}

FieldP0Vec HodgeProjector::harmonic_remainder(const FieldP0Vec& X, int passes) const {
    FieldP0Vec R = X;
    for (int p = 0; p < passes; ++p) {
        const auto psi = stream_part(R);
        const auto q = potential_part(R);
        R = R - rot_h(*mesh_, psi) - grad_h_cr(*mesh_, q);
    }
    return R;
}

HarmonicBasis harmonic_basis(const HodgeProjector& projector, int dimension, std::uint64_t seed,
                             const HodgeOptions& options) {
    const auto& mesh = projector.mesh();
    HarmonicBasis basis;
    if (dimension <= 0) {
        basis.gram = Eigen::MatrixXd(0, 0);
        return basis;
    }
    for (int attempt = 0; attempt <= options.max_redraws; ++attempt) {
        std::vector<FieldP0Vec> q;
        double lead = 0.0;
        bool deficient = false;
        for (int i = 0; i < dimension && !deficient; ++i) {
            const std::uint64_t stream = static_cast<std::uint64_t>(attempt) * 1000003ULL + static_cast<std::uint64_t>(i);
            FieldP0Vec v = projector.harmonic_remainder(random_tangent_field(mesh, seed, stream));
            const double raw = norm_vec(mesh, v);
            lead = std::max(lead, raw);
            // modified Gram-Schmidt, two passes
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& u : q) {
                    axpy(-inner_vec(mesh, v, u), u, v);
                }
            }
            const double nv = norm_vec(mesh, v);
            if (!(nv > options.rank_tol * lead)) {
                deficient = true;
                break;
            }
            q.push_back((1.0 / nv) * v);
        }
        if (!deficient) {
            basis.fields = std::move(q);
            break;
        }
        spdlog::warn("harmonic candidates rank deficient (attempt {}), redrawing", attempt + 1);
        if (attempt == options.max_redraws) {
            throw LinearDependenceError("harmonic basis: candidate fields stayed linearly dependent after " +
                                        std::to_string(options.max_redraws) + " redraws");
        }
    }
    const int l = basis.size();
    basis.gram.resize(l, l);
    for (int i = 0; i < l; ++i) {
        for (int j = 0; j < l; ++j) {
            basis.gram(i, j) = inner_vec(mesh, basis.fields[i], basis.fields[j]);
        }
    }
    return basis;
}

HarmonicBasis harmonic_basis(const SurfaceMesh& mesh, std::uint64_t seed, const HodgeOptions& options) {
    const int l = betti_dimension(mesh);
    if (l == 0) {
        return {};
    }
    const HodgeProjector projector(mesh, homogeneous_spaces(mesh), options);
    return harmonic_basis(projector, l, seed, options);
}

int harmonic_rank(const HodgeProjector& projector, int probes, std::uint64_t seed, const HodgeOptions& options) {
    const auto& mesh = projector.mesh();
    std::vector<FieldP0Vec> v;
    for (int i = 0; i < probes; ++i) {
        v.push_back(projector.harmonic_remainder(random_tangent_field(mesh, seed, 7777777ULL + i)));
    }
    Eigen::MatrixXd G(probes, probes);
    for (int i = 0; i < probes; ++i) {
        for (int j = 0; j <= i; ++j) {
            G(i, j) = G(j, i) = inner_vec(mesh, v[i], v[j]);
        }
    }
    // compare against the squared size of an unprojected probe
    const double scale = std::pow(norm_vec(mesh, random_tangent_field(mesh, seed, 7777777ULL)), 2);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues();
    int rank = 0;
    for (int i = 0; i < probes; ++i) {
        rank += ev[i] > options.rank_tol * scale ? 1 : 0;
    }
    return rank;
}

HodgeDecomposer::HodgeDecomposer(const HodgeProjector& projector, const HarmonicBasis& basis)
    : projector_(&projector), basis_(&basis) {}

HodgeComponents HodgeDecomposer::decompose(const FieldP0Vec& X) const {
    const auto& mesh = projector_->mesh();
    HodgeComponents c;
    c.psi = projector_->stream_part(X);
    c.q = projector_->potential_part(X);
    c.h_coeffs = basis_->project(mesh, X);
    const auto R = X - reconstruct(c);
    c.residual = norm_vec(mesh, R);
    return c;
}

FieldP0Vec HodgeDecomposer::reconstruct(const HodgeComponents& c) const {
    const auto& mesh = projector_->mesh();
    FieldP0Vec out = rot_h(mesh, c.psi) + grad_h_cr(mesh, c.q);
    axpy(1.0, basis_->combine(mesh, c.h_coeffs), out);
    return out;
}

HodgeComponents hodge_decompose(const SurfaceMesh& mesh, const HarmonicBasis& basis, const FieldP0Vec& X,
                                const HodgeOptions& options) {
    const HodgeProjector projector(mesh, homogeneous_spaces(mesh), options);
    return HodgeDecomposer(projector, basis).decompose(X);
}

} // namespace surfflow
