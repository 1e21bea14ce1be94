#include "qbound/nnls.hpp"

#include <Eigen/QR>

#include <limits>
#include <vector>

namespace qbound {

NnlsResult nnls(const Matrix& A, const Vector& b, int max_iterations) {
    const int n = static_cast<int>(A.cols());
    if (b.size() != A.rows()) throw DomainError("nnls: size mismatch");
    if (max_iterations <= 0) max_iterations = 3 * std::max(n, 10);

    Vector x = Vector::Zero(n);
    std::vector<bool> passive(n, false);
    const double dual_tol = 1e-12 * std::max(1.0, A.norm() * b.norm());

    // Least squares over the passive columns, zeros elsewhere.
    auto passive_solution = [&](Vector& z) {
        std::vector<int> idx;
        for (int j = 0; j < n; ++j) {
            if (passive[j]) idx.push_back(j);
        }
        z.setZero(n);
        if (idx.empty()) return;
        Matrix Ap(A.rows(), static_cast<int>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) Ap.col(c) = A.col(idx[c]);
        const Vector sol = Ap.colPivHouseholderQr().solve(b);
        for (std::size_t c = 0; c < idx.size(); ++c) z[idx[c]] = sol[c];
    };

    NnlsResult result;
    for (int outer = 0; outer < max_iterations; ++outer) {
        ++result.iterations;
        const Vector w = A.transpose() * (b - A * x);

        int candidate = -1;
        double best = dual_tol;
        for (int j = 0; j < n; ++j) {
            if (!passive[j] && w[j] > best) {
                best = w[j];
                candidate = j;
            }
        }
        if (candidate < 0) break;  // KKT satisfied
        passive[candidate] = true;

        Vector z(n);
        passive_solution(z);
        while (z[candidate] <= 0.0 ||
               [&] {
                   for (int j = 0; j < n; ++j) {
                       if (passive[j] && z[j] <= 0.0) return true;
                   }
                   return false;
               }()) {
            double alpha = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) {
                if (passive[j] && z[j] <= 0.0) {
                    alpha = std::min(alpha, x[j] / (x[j] - z[j]));
                }
            }
            if (!std::isfinite(alpha)) break;
            x += alpha * (z - x);
            for (int j = 0; j < n; ++j) {
                if (passive[j] && x[j] <= 1e-14) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            passive_solution(z);
            ++result.iterations;
            if (result.iterations > 10 * max_iterations) {
                throw SolverError("nnls: inner loop failed to terminate");
            }
        }
        x = z;
    }

    for (int j = 0; j < n; ++j) x[j] = std::max(x[j], 0.0);
    result.x = x;
    result.residual = (A * x - b).norm();
    return result;
}

}  // namespace qbound
