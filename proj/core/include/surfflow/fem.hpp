#pragma once

#include <span>
#include <vector>

#include "surfflow/linalg.hpp"
#include "surfflow/mesh.hpp"

namespace surfflow {

/// Coefficient vector of one discrete function space. The tag keeps P1, CR
/// and P0-vector coefficients from being mixed up.
template <class T, class Tag>
class Field {
public:
    using value_type = T;

    Field() = default;
    explicit Field(std::size_t n, T init = T{}) : data_(n, init) {}
    explicit Field(std::vector<T> values) : data_(std::move(values)) {}

    [[nodiscard]] std::size_t size() const { return data_.size(); }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }
    std::vector<T>& values() { return data_; }
    [[nodiscard]] const std::vector<T>& values() const { return data_; }
    operator std::span<const T>() const { return data_; }

private:
    std::vector<T> data_;
};

struct P1Tag;
struct CrTag;
struct P0VecTag;

/// Continuous piecewise linears, one value per vertex.
using FieldP1 = Field<double, P1Tag>;
/// Crouzeix-Raviart, one value per edge (at the edge midpoint).
using FieldCR = Field<double, CrTag>;
/// Piecewise constant tangential vectors, one ambient 3-vector per triangle.
using FieldP0Vec = Field<Vec3, P0VecTag>;

// Linear combinations of P0 vector fields.
FieldP0Vec operator+(const FieldP0Vec& a, const FieldP0Vec& b);
FieldP0Vec operator-(const FieldP0Vec& a, const FieldP0Vec& b);
FieldP0Vec operator*(double s, const FieldP0Vec& a);
void axpy(double alpha, const FieldP0Vec& x, FieldP0Vec& y);

FieldP0Vec grad_h_p1(const SurfaceMesh& mesh, const FieldP1& f);
FieldP0Vec grad_h_cr(const SurfaceMesh& mesh, const FieldCR& q);
/// Element-wise rotation by 90 degrees: N x X.
FieldP0Vec j_h(const SurfaceMesh& mesh, const FieldP0Vec& X);
/// rot = -J grad
FieldP0Vec rot_h(const SurfaceMesh& mesh, const FieldP1& f);
FieldP0Vec rot_h(const SurfaceMesh& mesh, const FieldCR& q);

/// Gradients of the three CR basis functions of triangle t, ordered by local
/// edge (local edge i is opposite local vertex i).
std::array<Vec3, 3> cr_gradients(const SurfaceMesh& mesh, int t);

SparseMatrix mass_p1(const SurfaceMesh& mesh, bool lumped = false);
SparseMatrix stiffness_p1(const SurfaceMesh& mesh);
SparseMatrix stiffness_cr(const SurfaceMesh& mesh);
/// (rot phi_i, rot phi_j) on all of S^1, assembled from rotated gradients.
SparseMatrix rotrot_p1(const SurfaceMesh& mesh);
/// rotrot_p1 restricted to S^1_0: interior vertices, or everything on a
/// closed surface (where the zero-mean constraint is applied by the solver).
SparseMatrix rotrot_s10(const SurfaceMesh& mesh);
/// sum_K scale_K (grad phi_i, grad phi_j)_K
SparseMatrix weighted_stiffness_p1(const SurfaceMesh& mesh, std::span<const double> element_scale);

/// integral of each P1 basis function (= lumped mass)
std::vector<double> p1_weights(const SurfaceMesh& mesh);
/// integral of each CR basis function
std::vector<double> cr_weights(const SurfaceMesh& mesh);

/// (X, Y)_h = sum_K |K| <X_K, Y_K>
double inner_vec(const SurfaceMesh& mesh, const FieldP0Vec& X, const FieldP0Vec& Y);
double norm_vec(const SurfaceMesh& mesh, const FieldP0Vec& X);

/// Exact integral of w X . Y for w piecewise linear: sum_K |K| mean_K(w) <X_K, Y_K>.
double weighted_vec_form(const SurfaceMesh& mesh, const FieldP1& w, const FieldP0Vec& X, const FieldP0Vec& Y);
/// Per-element mean of a P1 field (the weight used by weighted_vec_form).
std::vector<double> element_means(const SurfaceMesh& mesh, const FieldP1& w);

/// Per-element <V_K, grad_h(w)_K>.
std::vector<double> advection_p0(const SurfaceMesh& mesh, const FieldP0Vec& V, const FieldP1& w);

/// Weak adjoints: entry i is (G, op(basis_i))_h.
std::vector<double> rot_weak_p1(const SurfaceMesh& mesh, const FieldP0Vec& G);
std::vector<double> grad_weak_p1(const SurfaceMesh& mesh, const FieldP0Vec& G);
std::vector<double> grad_weak_cr(const SurfaceMesh& mesh, const FieldP0Vec& G);
/// (s, phi_i)_h for a piecewise constant scalar s.
std::vector<double> load_p1(const SurfaceMesh& mesh, std::span<const double> element_values);

/// Interpolation S^1 -> CR^1 (midpoint values).
FieldCR p1_to_cr(const SurfaceMesh& mesh, const FieldP1& f);
/// Vertex average of a CR field, for display only.
FieldP1 cr_to_p1_average(const SurfaceMesh& mesh, const FieldCR& q);

/// Removes the normal component of each element vector.
FieldP0Vec project_tangent(const SurfaceMesh& mesh, const FieldP0Vec& X);
/// max_K |<X_K, N_K>| / max(1, |X_K|)
double tangential_defect(const SurfaceMesh& mesh, const FieldP0Vec& X);

/// Mass-weighted mean (f, 1)_h / |M| of a P1 field.
double mean_p1(const SurfaceMesh& mesh, const FieldP1& f);

/// Dirichlet mask and mean constraint of one scalar space.
struct ScalarSpace {
    std::vector<char> fixed; // per dof; fixed dofs carry prescribed values
    bool zero_mean = false;  // only meaningful when nothing is fixed

    [[nodiscard]] int free_count() const;
};

/// The three potential spaces behind the discrete Hodge decomposition:
/// stream (S_h, P1), vorticity (W_h, P1) and potential (Q_h, CR).
struct DiscreteSpaces {
    ScalarSpace stream;
    ScalarSpace vorticity;
    ScalarSpace potential;
};

/// S^1_0 (boundary vertices fixed, zero mean on closed surfaces), full S^1,
/// and CR^1 with zero mean.
DiscreteSpaces homogeneous_spaces(const SurfaceMesh& mesh);

} // namespace surfflow
