#include "semibandit/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace semibandit {

SymMatrix SymMatrix::identity(std::size_t dim) {
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

void SymMatrix::add_outer(const std::vector<double>& v, double s) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] += s * v[i] * v[j];
}

double SymMatrix::max_asymmetry() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            worst = std::max(worst, std::fabs((*this)(i, j) - (*this)(j, i)));
    return worst;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

std::vector<double> matvec(const SymMatrix& m, const std::vector<double>& x) {
    std::vector<double> out(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) s += m(i, j) * x[j];
        out[i] = s;
    }
    return out;
}

namespace {

double offdiag_norm(const SymMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j)
            if (i != j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

}  // namespace

void jacobi_eigen(const SymMatrix& in, std::vector<double>& evals, SymMatrix& evecs,
                  double rel_tol) {
    const std::size_t n = in.n;
    SymMatrix m = in;
    evecs = SymMatrix::identity(n);
    if (n == 0) {
        evals.clear();
        return;
    }
    const double scale = std::max(m.frobenius_norm(), 1e-300);
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps && offdiag_norm(m) > rel_tol * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double app = m(p, p);
                const double aqq = m(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                // smaller-magnitude root for stability
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = evecs(k, p);
                    const double vkq = evecs(k, q);
                    evecs(k, p) = c * vkp - s * vkq;
                    evecs(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    evals.resize(n);
    for (std::size_t i = 0; i < n; ++i) evals[i] = m(i, i);
}

double min_eigenvalue(const SymMatrix& m) {
    if (m.n == 0) throw std::invalid_argument("min_eigenvalue: empty matrix");
    const double scale = std::max(m.frobenius_norm(), 1.0);
    if (m.max_asymmetry() > 1e-9 * scale)
        throw std::invalid_argument("min_eigenvalue: matrix is not symmetric");
    if (m.n == 1) return m(0, 0);
    std::vector<double> evals;
    SymMatrix evecs;
    jacobi_eigen(m, evals, evecs, 1e-10);
    double lo = evals[0];
    for (double v : evals) lo = std::min(lo, v);
    return lo;
}

bool solve_spd(const SymMatrix& m, const std::vector<double>& b, std::vector<double>& x) {
    const std::size_t n = m.n;
    SymMatrix chol(n);  // lower triangle
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= chol(i, k) * chol(j, k);
            if (i == j) {
                if (s <= 0.0) return false;
                chol(i, j) = std::sqrt(s);
            } else {
                chol(i, j) = s / chol(j, j);
            }
        }
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= chol(i, k) * y[k];
        y[i] = s / chol(i, i);
    }
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= chol(k, ii) * x[k];
        x[ii] = s / chol(ii, ii);
    }
    return true;
}

std::vector<double> pinv_solve(const SymMatrix& m, const std::vector<double>& b,
                               double rel_tol) {
    std::vector<double> evals;
    SymMatrix v;
    jacobi_eigen(m, evals, v);
    double largest = 0.0;
    for (double e : evals) largest = std::max(largest, std::fabs(e));
    const double cutoff = rel_tol * std::max(largest, 1e-300);
    const std::size_t n = m.n;
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::fabs(evals[k]) <= cutoff) continue;
        double vb = 0.0;
        for (std::size_t i = 0; i < n; ++i) vb += v(i, k) * b[i];
        const double coef = vb / evals[k];
        for (std::size_t i = 0; i < n; ++i) x[i] += coef * v(i, k);
    }
    return x;
}

std::vector<double> solve_sym(const SymMatrix& m, const std::vector<double>& b) {
    std::vector<double> x;
    if (solve_spd(m, b, x)) return x;
    return pinv_solve(m, b);
}

}  // namespace semibandit
