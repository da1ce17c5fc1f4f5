#include "surfflow/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "surfflow/errors.hpp"

namespace surfflow {

namespace {

std::atomic<int> g_threads{1};

// Rows are split into contiguous chunks so the result does not depend on the
// thread count.
template <class Fn>
void parallel_rows(int n, Fn&& fn) {
    const int threads = g_threads.load();
    if (threads <= 1 || n < 20000) {
        fn(0, n);
        return;
    }
    std::vector<std::jthread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int begin = 0; begin < n; begin += chunk) {
        const int end = std::min(n, begin + chunk);
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
}

} // namespace

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }
int thread_count() { return g_threads.load(); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

// ---------------------------------------------------------------------------

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {}

double SparseMatrix::at(int i, int j) const {
    const auto begin = col_idx_.begin() + row_ptr_[i];
    const auto end = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(begin, end, j);
    if (it != end && *it == j) {
        return values_[it - col_idx_.begin()];
    }
    return 0.0;
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(std::min(rows_, cols_), 0.0);
    for (int i = 0; i < static_cast<int>(d.size()); ++i) {
        d[i] = at(i, i);
    }
    return d;
}

std::vector<double> SparseMatrix::row_sums() const {
    std::vector<double> s(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            s[i] += values_[k];
        }
    }
    return s;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    parallel_rows(rows_, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            double s = 0.0;
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                s += values_[k] * x[col_idx_[k]];
            }
            y[i] = s;
        }
    });
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
    std::vector<double> y(rows_);
    multiply(x, y);
    return y;
}

double SparseMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
    return dot(x, (*this) * y);
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
    if (rows_ != cols_) {
        return false;
    }
    double scale = 0.0;
    for (double v : values_) {
        scale = std::max(scale, std::abs(v));
    }
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            if (std::abs(values_[k] - at(col_idx_[k], i)) > rel_tol * scale) {
                return false;
            }
        }
    }
    return true;
}

SparseMatrix SparseMatrix::submatrix(std::span<const int> rows, std::span<const int> cols) const {
    std::vector<int> col_map(cols_, -1);
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
        col_map[cols[j]] = j;
    }
    std::vector<int> ptr{0};
    std::vector<int> idx;
    std::vector<double> val;
    std::vector<std::pair<int, double>> row;
    for (int old_row : rows) {
        row.clear();
        for (int k = row_ptr_[old_row]; k < row_ptr_[old_row + 1]; ++k) {
            const int j = col_map[col_idx_[k]];
            if (j >= 0) {
                row.emplace_back(j, values_[k]);
            }
        }
        std::sort(row.begin(), row.end());
        for (const auto& [j, v] : row) {
            idx.push_back(j);
            val.push_back(v);
        }
        ptr.push_back(static_cast<int>(idx.size()));
    }
    return SparseMatrix(static_cast<int>(rows.size()), static_cast<int>(cols.size()), std::move(ptr), std::move(idx),
                        std::move(val));
}

SparseMatrix SparseMatrix::combine(double alpha, const SparseMatrix& other, double beta) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw SolverError("matrix shapes differ in combine");
    }
    std::vector<Triplet> t;
    t.reserve(values_.size() + other.values_.size());
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            t.push_back({i, col_idx_[k], alpha * values_[k]});
        }
        for (int k = other.row_ptr_[i]; k < other.row_ptr_[i + 1]; ++k) {
            t.push_back({i, other.col_idx_[k], beta * other.values_[k]});
        }
    }
    return assemble(t, rows_, cols_);
}

SparseMatrix assemble(std::span<const Triplet> triplets, int rows, int cols) {
    std::vector<int> count(rows + 1, 0);
    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw SolverError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                              ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
        }
        ++count[t.row + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    std::vector<int> cursor(count.begin(), count.end() - 1);
    std::vector<int> cols_tmp(triplets.size());
    std::vector<double> vals_tmp(triplets.size());
    for (const Triplet& t : triplets) {
        const int pos = cursor[t.row]++;
        cols_tmp[pos] = t.col;
        vals_tmp[pos] = t.value;
    }
    std::vector<int> ptr{0};
    std::vector<int> idx;
    std::vector<double> val;
    idx.reserve(triplets.size());
    val.reserve(triplets.size());
    std::vector<int> order;
    for (int i = 0; i < rows; ++i) {
        order.resize(count[i + 1] - count[i]);
        std::iota(order.begin(), order.end(), count[i]);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return cols_tmp[a] < cols_tmp[b] || (cols_tmp[a] == cols_tmp[b] && a < b);
        });
        for (int pos : order) {
            if (!idx.empty() && static_cast<int>(idx.size()) > ptr.back() && idx.back() == cols_tmp[pos]) {
                val.back() += vals_tmp[pos];
            } else {
                idx.push_back(cols_tmp[pos]);
                val.push_back(vals_tmp[pos]);
            }
        }
        ptr.push_back(static_cast<int>(idx.size()));
    }
    return SparseMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

SparseMatrix identity_matrix(int n) {
    std::vector<int> ptr(n + 1);
    std::vector<int> idx(n);
    std::iota(ptr.begin(), ptr.end(), 0);
    std::iota(idx.begin(), idx.end(), 0);
    return SparseMatrix(n, n, std::move(ptr), std::move(idx), std::vector<double>(n, 1.0));
}

// ---------------------------------------------------------------------------

namespace {

// Preconditioned CG. `project` (optional) removes the kernel component of the
// residual for singular systems.
template <class Project>
CgResult cg_impl(const SparseMatrix& A, std::span<const double> b, std::span<const double> x0,
                 const CgOptions& options, Project&& project) {
    const int n = A.rows();
    CgResult result;
    result.x.assign(x0.begin(), x0.end());
    if (result.x.empty()) {
        result.x.assign(n, 0.0);
    }
    const int max_iter = options.max_iter > 0 ? options.max_iter : std::max(10 * n, 10);
    const double bnorm = norm2(b);
    if (!std::isfinite(bnorm)) {
        throw SolverError("CG: right-hand side contains NaN or Inf");
    }
    if (bnorm == 0.0) {
        std::fill(result.x.begin(), result.x.end(), 0.0);
        result.report = {0, 0.0, true};
        return result;
    }

    std::vector<double> inv_diag(n, 1.0);
    if (options.precond == Preconditioner::jacobi) {
        const auto d = A.diagonal();
        for (int i = 0; i < n; ++i) {
            inv_diag[i] = d[i] > 0.0 ? 1.0 / d[i] : 1.0;
        }
    }

    std::vector<double> r(n);
    std::vector<double> z(n);
    std::vector<double> p(n);
    std::vector<double> q(n);
    A.multiply(result.x, q);
    for (int i = 0; i < n; ++i) {
        r[i] = b[i] - q[i];
    }
    project(r);
    double rnorm = norm2(r);
    std::vector<double> best = result.x;
    double best_norm = rnorm;
    int it = 0;
    if (rnorm <= options.tol * bnorm) {
        result.report = {0, rnorm / bnorm, true};
        return result;
    }
    for (int i = 0; i < n; ++i) {
        z[i] = inv_diag[i] * r[i];
    }
    project(z);
    p = z;
    double rz = dot(r, z);
    for (it = 1; it <= max_iter; ++it) {
        A.multiply(p, q);
        const double pq = dot(p, q);
        if (!std::isfinite(pq)) {
            throw SolverError("CG breakdown: NaN encountered at iteration " + std::to_string(it));
        }
        if (pq <= 0.0) {
            break; // loss of positive definiteness on this subspace
        }
        const double alpha = rz / pq;
        axpy(alpha, p, result.x);
        axpy(-alpha, q, r);
        project(r);
        rnorm = norm2(r);
        if (rnorm < best_norm) {
            best_norm = rnorm;
            best = result.x;
        }
        if (rnorm <= options.tol * bnorm) {
            result.report = {it, rnorm / bnorm, true};
            return result;
        }
        for (int i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
        }
        project(z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }
    result.x = std::move(best);
    result.report = {std::min(it, max_iter), best_norm / bnorm, best_norm <= options.tol * bnorm};
    return result;
}

void remove_mean(std::span<double> v) {
    if (v.empty()) {
        return;
    }
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) {
        x -= m;
    }
}

void shift_to_zero_weighted_mean(std::span<double> x, std::span<const double> w) {
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    const double m = dot(x, w) / wsum;
    for (double& xi : x) {
        xi -= m;
    }
}

} // namespace

CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, std::span<const double> x0,
                  const CgOptions& options) {
    if (A.rows() != A.cols() || static_cast<int>(b.size()) != A.rows()) {
        throw SolverError("cg_solve: dimension mismatch");
    }
    return cg_impl(A, b, x0, options, [](std::span<double>) {});
}

std::vector<double> solve_singular_zero_mean(const SparseMatrix& A, std::span<const double> b,
                                             std::span<const double> weights, const CgOptions& options,
                                             SolveReport* report) {
    if (static_cast<int>(weights.size()) != A.rows() || static_cast<int>(b.size()) != A.rows()) {
        throw SolverError("solve_singular_zero_mean: dimension mismatch");
    }
    // The range of a symmetric A with kernel span{1} is the Euclidean
    // complement of the constants; residuals are kept there as well.
    std::vector<double> rhs(b.begin(), b.end());
    remove_mean(rhs);
    // Unpreconditioned z would leave the subspace; project after scaling.
    CgResult res = cg_impl(A, rhs, {}, options, [](std::span<double> v) { remove_mean(v); });
    shift_to_zero_weighted_mean(res.x, weights);
    if (report != nullptr) {
        *report = res.report;
    }
    return std::move(res.x);
}

SolverBackend parse_solver_backend(std::string_view name) {
    if (name == "cg") {
        return SolverBackend::cg;
    }
    if (name == "direct") {
        return SolverBackend::direct;
    }
    throw ConfigError("unknown solver backend '" + std::string(name) + "' (expected cg or direct)");
}

// ---------------------------------------------------------------------------

struct ConstrainedSolver::Direct {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool pinned = false; // singular system: last free dof pinned to zero
};

ConstrainedSolver::ConstrainedSolver(const SparseMatrix& full, std::vector<char> fixed,
                                     std::vector<double> zero_mean_weights, CgOptions options, SolverBackend backend)
    : full_size_(full.rows()), fixed_(std::move(fixed)), full_(full), options_(options), backend_(backend) {
    if (fixed_.empty()) {
        fixed_.assign(full_size_, 0);
    }
    if (static_cast<int>(fixed_.size()) != full_size_) {
        throw SolverError("ConstrainedSolver: mask length mismatch");
    }
    for (int i = 0; i < full_size_; ++i) {
        if (!fixed_[i]) {
            free_.push_back(i);
        }
    }
    const bool any_fixed = free_count() < full_size_;
    if (!any_fixed && !zero_mean_weights.empty()) {
        weights_ = std::move(zero_mean_weights);
    }
    reduced_ = full.submatrix(free_, free_);

    if (backend_ == SolverBackend::direct && free_count() > 0) {
        direct_ = std::make_unique<Direct>();
        const int n = free_count();
        const int m = zero_mean() ? n - 1 : n;
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(reduced_.nnz());
        for (int i = 0; i < m; ++i) {
            for (int k = reduced_.row_ptr()[i]; k < reduced_.row_ptr()[i + 1]; ++k) {
                if (reduced_.col_idx()[k] < m) {
                    t.emplace_back(i, reduced_.col_idx()[k], reduced_.values()[k]);
                }
            }
        }
        Eigen::SparseMatrix<double> A(m, m);
        A.setFromTriplets(t.begin(), t.end());
        direct_->pinned = zero_mean();
        direct_->ldlt.compute(A);
        if (direct_->ldlt.info() != Eigen::Success) {
            throw SolverError("direct factorization failed (matrix not SPD on the free dofs)");
        }
    }
}

ConstrainedSolver::~ConstrainedSolver() = default;
ConstrainedSolver::ConstrainedSolver(ConstrainedSolver&&) noexcept = default;
ConstrainedSolver& ConstrainedSolver::operator=(ConstrainedSolver&&) noexcept = default;

CgResult ConstrainedSolver::solve(std::span<const double> b, std::span<const double> fixed_values,
                                  std::span<const double> x0) const {
    if (static_cast<int>(b.size()) != full_size_) {
        throw SolverError("ConstrainedSolver::solve: rhs length mismatch");
    }
    const int n = free_count();
    std::vector<double> x(full_size_, 0.0);
    bool has_fixed_values = false;
    if (!fixed_values.empty()) {
        for (int i = 0; i < full_size_; ++i) {
            if (fixed_[i]) {
                x[i] = fixed_values[i];
                has_fixed_values = has_fixed_values || fixed_values[i] != 0.0;
            }
        }
    }
    std::vector<double> rhs(n);
    for (int k = 0; k < n; ++k) {
        rhs[k] = b[free_[k]];
    }
    if (has_fixed_values) {
        // Move the known values to the right-hand side.
        const auto ax = full_ * std::span<const double>(x);
        for (int k = 0; k < n; ++k) {
            rhs[k] -= ax[free_[k]];
        }
    }

    CgResult out;
    if (n == 0) {
        out.x = std::move(x);
        return out;
    }
    std::vector<double> xr;
    if (direct_) {
        if (zero_mean()) {
            remove_mean(rhs);
        }
        const int m = direct_->pinned ? n - 1 : n;
        Eigen::Map<const Eigen::VectorXd> rb(rhs.data(), m);
        Eigen::VectorXd sol = direct_->ldlt.solve(rb);
        xr.assign(n, 0.0);
        for (int i = 0; i < m; ++i) {
            xr[i] = sol[i];
        }
        if (!sol.allFinite()) {
            throw SolverError("direct solve produced NaN");
        }
        if (zero_mean()) {
            shift_to_zero_weighted_mean(xr, weights_);
        }
        const auto r = reduced_ * std::span<const double>(xr);
        double rn = 0.0;
        for (int i = 0; i < n; ++i) {
            rn += (rhs[i] - r[i]) * (rhs[i] - r[i]);
        }
        const double bn = norm2(rhs);
        out.report = {1, bn > 0 ? std::sqrt(rn) / bn : 0.0, true};
    } else if (zero_mean()) {
        xr = solve_singular_zero_mean(reduced_, rhs, weights_, options_, &out.report);
    } else {
        std::vector<double> guess;
        if (!x0.empty()) {
            guess.resize(n);
            for (int k = 0; k < n; ++k) {
                guess[k] = x0[free_[k]];
            }
        }
        auto res = cg_solve(reduced_, rhs, guess, options_);
        xr = std::move(res.x);
        out.report = res.report;
    }
    for (int k = 0; k < n; ++k) {
        x[free_[k]] = xr[k];
    }
    out.x = std::move(x);
    return out;
}

} // namespace surfflow
