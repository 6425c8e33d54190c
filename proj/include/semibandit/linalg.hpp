#pragma once

#include <cstddef>
#include <vector>

namespace semibandit {

// Dense symmetric matrix, row-major n x n. Dimensions in this project are
// small (L <= ~10 for reward-feature matrices, d <= ~500 for regression),
// so explicit O(n^3) routines are sufficient.
struct SymMatrix {
    std::size_t n = 0;
    std::vector<double> a;  // n*n, row-major

    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static SymMatrix identity(std::size_t dim);

    // rank-one update: A += s * v v^T
    void add_outer(const std::vector<double>& v, double s = 1.0);

    double max_asymmetry() const;
    double frobenius_norm() const;
};

std::vector<double> matvec(const SymMatrix& m, const std::vector<double>& x);

// Cyclic Jacobi eigendecomposition. Sweeps until the off-diagonal Frobenius
// norm drops below rel_tol * ||A||_F. Eigenvalues are returned unsorted;
// eigenvectors (columns of V) satisfy A = V diag(evals) V^T.
void jacobi_eigen(const SymMatrix& m, std::vector<double>& evals, SymMatrix& evecs,
                  double rel_tol = 1e-12);

// Smallest eigenvalue. Throws std::invalid_argument if the asymmetry exceeds
// 1e-9 (absolute, relative to the Frobenius norm). Exact for 1x1.
double min_eigenvalue(const SymMatrix& m);

// Solves A x = b for symmetric positive definite A via Cholesky.
// Returns false (x untouched) when a non-positive pivot is encountered.
bool solve_spd(const SymMatrix& m, const std::vector<double>& b, std::vector<double>& x);

// Minimum-norm solution of A x = b for symmetric A via eigendecomposition
// pseudoinverse; eigenvalues below rel_tol * max|eval| are dropped.
std::vector<double> pinv_solve(const SymMatrix& m, const std::vector<double>& b,
                               double rel_tol = 1e-12);

// Solves A x = b, preferring Cholesky and falling back to the pseudoinverse
// for singular or indefinite systems.
std::vector<double> solve_sym(const SymMatrix& m, const std::vector<double>& b);

}  // namespace semibandit
