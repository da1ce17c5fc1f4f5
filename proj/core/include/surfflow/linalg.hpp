#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace surfflow {

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx, std::vector<double> values);

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] int nnz() const { return static_cast<int>(values_.size()); }
    [[nodiscard]] const std::vector<int>& row_ptr() const { return row_ptr_; }
    [[nodiscard]] const std::vector<int>& col_idx() const { return col_idx_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }

    /// Entry (i, j); zero when not stored.
    [[nodiscard]] double at(int i, int j) const;
    [[nodiscard]] std::vector<double> diagonal() const;
    [[nodiscard]] std::vector<double> row_sums() const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    [[nodiscard]] std::vector<double> operator*(std::span<const double> x) const;

    /// x^T A y
    [[nodiscard]] double bilinear(std::span<const double> x, std::span<const double> y) const;

    [[nodiscard]] bool is_symmetric(double rel_tol = 1e-14) const;

    /// Rows and columns picked by index lists (new index -> old index).
    [[nodiscard]] SparseMatrix submatrix(std::span<const int> rows, std::span<const int> cols) const;

    /// alpha * this + beta * other; shapes must match.
    [[nodiscard]] SparseMatrix combine(double alpha, const SparseMatrix& other, double beta) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// Builds a CSR matrix, summing duplicate entries. Throws SolverError on an
/// index outside the shape.
SparseMatrix assemble(std::span<const Triplet> triplets, int rows, int cols);

SparseMatrix identity_matrix(int n);

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = true;
};

enum class Preconditioner { none, jacobi };

struct CgOptions {
    double tol = 1e-10;
    int max_iter = 0; // 0 selects 10 * n
    Preconditioner precond = Preconditioner::jacobi;
};

struct CgResult {
    std::vector<double> x;
    SolveReport report;
};

/// Conjugate gradients for a symmetric positive (semi-)definite matrix.
///
/// Stops when ||b - A x|| <= tol ||b||. Hitting max_iter returns the best
/// iterate with converged = false; a NaN breakdown throws SolverError.
CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, std::span<const double> x0,
                  const CgOptions& options = {});

/// Solves A x = b where A is SPSD with kernel = constants, returning the
/// solution with zero weighted mean sum_i w_i x_i = 0. A b that is not
/// orthogonal to the constants is projected first.
std::vector<double> solve_singular_zero_mean(const SparseMatrix& A, std::span<const double> b,
                                             std::span<const double> weights, const CgOptions& options = {},
                                             SolveReport* report = nullptr);

enum class SolverBackend { cg, direct };

SolverBackend parse_solver_backend(std::string_view name);

/// Reusable solver for A x = b on a subset of "free" dofs. Fixed dofs take
/// prescribed values; when nothing is fixed and `zero_mean_weights` is
/// non-empty, the constants are factored out and the weighted mean is zero.
///
/// The reduced matrix (and the factorization for the direct backend) is
/// built once in the constructor.
class ConstrainedSolver {
public:
    ConstrainedSolver(const SparseMatrix& full, std::vector<char> fixed, std::vector<double> zero_mean_weights,
                      CgOptions options, SolverBackend backend = SolverBackend::cg);
    ~ConstrainedSolver();
    ConstrainedSolver(ConstrainedSolver&&) noexcept;
    ConstrainedSolver& operator=(ConstrainedSolver&&) noexcept;

    /// `b` has full length; `fixed_values` (full length or empty = zeros)
    /// supplies the values of fixed dofs; `x0` (full length or empty) is a
    /// warm start for CG.
    [[nodiscard]] CgResult solve(std::span<const double> b, std::span<const double> fixed_values = {},
                                 std::span<const double> x0 = {}) const;

    [[nodiscard]] int size() const { return full_size_; }
    [[nodiscard]] int free_count() const { return static_cast<int>(free_.size()); }
    [[nodiscard]] const std::vector<int>& free_dofs() const { return free_; }
    [[nodiscard]] const std::vector<char>& fixed_mask() const { return fixed_; }
    [[nodiscard]] bool zero_mean() const { return !weights_.empty(); }

private:
    struct Direct;

    int full_size_ = 0;
    std::vector<char> fixed_;
    std::vector<int> free_;
    std::vector<double> weights_; // zero-mean weights restricted to free dofs
    SparseMatrix full_;
    SparseMatrix reduced_;
    CgOptions options_;
    SolverBackend backend_ = SolverBackend::cg;
    std::unique_ptr<Direct> direct_;
};

/// Thread count used by data-parallel kernels (matrix-vector products).
void set_thread_count(int n);
int thread_count();

// Small dense-vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

} // namespace surfflow
