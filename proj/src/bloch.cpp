#include "qbound/bloch.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace qbound {

namespace {

// Tolerance for the structural checks below (hermiticity, trace, purity).
constexpr double kStructTol = 1e-9;

std::vector<ComplexMatrix> build_matrices(int d) {
    const Complex i_unit(0.0, 1.0);
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(d) * d - 1);

    // Symmetric off-diagonal family.
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            ComplexMatrix m = ComplexMatrix::Zero(d, d);
            m(j, k) = 1.0;
            m(k, j) = 1.0;
            out.push_back(std::move(m));
        }
    }
    // Antisymmetric off-diagonal family.
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            ComplexMatrix m = ComplexMatrix::Zero(d, d);
            m(j, k) = -i_unit;
            m(k, j) = i_unit;
            out.push_back(std::move(m));
        }
    }
    // Diagonal family, increasing rank.
    for (int l = 1; l < d; ++l) {
        ComplexMatrix m = ComplexMatrix::Zero(d, d);
        const double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
        for (int mIdx = 0; mIdx < l; ++mIdx) m(mIdx, mIdx) = scale;
        m(l, l) = -scale * static_cast<double>(l);
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace

BlochBasis::BlochBasis(int dim) : dim_(dim) {
    if (dim < 2) throw DomainError("BlochBasis: dimension must be >= 2");
    c_d_ = std::sqrt(static_cast<double>(dim) * (dim - 1) / 2.0);
    matrices_ = build_matrices(dim);

    // d_ijk = tr({sigma_i, sigma_j} sigma_k) / 4, computed from the matrices
    // themselves so it is consistent with the ordering above.
    const int n = size();
    d_tensor_.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const ComplexMatrix anti =
                matrices_[i] * matrices_[j] + matrices_[j] * matrices_[i];
            for (int k = 0; k < n; ++k) {
                const double val = 0.25 * (anti * matrices_[k]).trace().real();
                d_tensor_[(static_cast<std::size_t>(i) * n + j) * n + k] = val;
                d_tensor_[(static_cast<std::size_t>(j) * n + i) * n + k] = val;
            }
        }
    }
}

const BlochBasis& bloch_basis(int dim) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<BlochBasis>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(dim);
    if (it == cache.end()) {
        it = cache.emplace(dim, std::make_unique<BlochBasis>(dim)).first;
    }
    return *it->second;
}

ComplexMatrix bloch_matrix(int dim, const Vector& n) {
    const BlochBasis& basis = bloch_basis(dim);
    if (n.size() != basis.size()) {
        throw DomainError("bloch_matrix: vector length must be d^2 - 1");
    }
    ComplexMatrix rho = ComplexMatrix::Identity(dim, dim);
    for (int i = 0; i < basis.size(); ++i) {
        if (n[i] != 0.0) rho += basis.c_d() * n[i] * basis.matrix(i);
    }
    return rho / static_cast<double>(dim);
}

ComplexMatrix QuditState::matrix() const { return bloch_matrix(dim, bloch); }

namespace {

bool is_pure_vector(int dim, const Vector& n, const BlochBasis& basis) {
    if (std::abs(n.norm() - 1.0) > kStructTol) return false;
    if (dim == 2) return true;  // Bloch ball criterion suffices at d = 2.
    return (star_product(n, n, basis) - n).norm() <= kStructTol;
}

}  // namespace

QuditState state_from_bloch(int dim, const Vector& n) {
    const BlochBasis& basis = bloch_basis(dim);
    if (n.size() != basis.size()) {
        throw DomainError("state_from_bloch: vector length must be d^2 - 1");
    }
    const ComplexMatrix rho = bloch_matrix(dim, n);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kStructTol) {
        throw ValidationError("state_from_bloch: reconstructed matrix is not positive semidefinite");
    }
    return QuditState{dim, n, is_pure_vector(dim, n, basis)};
}

QuditState bloch_from_state(const ComplexMatrix& rho) {
    const int d = static_cast<int>(rho.rows());
    if (d < 2 || rho.cols() != d) {
        throw DomainError("bloch_from_state: matrix must be square with d >= 2");
    }
    if ((rho - rho.adjoint()).norm() > kStructTol) {
        throw ValidationError("bloch_from_state: matrix is not Hermitian");
    }
    if (std::abs(rho.trace().real() - 1.0) > kStructTol ||
        std::abs(rho.trace().imag()) > kStructTol) {
        throw ValidationError("bloch_from_state: matrix trace must be 1");
    }
    const BlochBasis& basis = bloch_basis(d);
    Vector n(basis.size());
    const double scale = d / (2.0 * basis.c_d());
    for (int i = 0; i < basis.size(); ++i) {
        n[i] = scale * (rho * basis.matrix(i)).trace().real();
    }
    return QuditState{d, n, is_pure_vector(d, n, basis)};
}

Vector star_product(const Vector& u, const Vector& v, const BlochBasis& basis) {
    const int d = basis.dim();
    if (d == 2) {
        throw DomainError("star_product: undefined at d = 2 (formula divides by d - 2)");
    }
    const int n = basis.size();
    if (u.size() != n || v.size() != n) {
        throw DomainError("star_product: vectors must have length d^2 - 1");
    }
    Vector out = Vector::Zero(n);
    const double scale = basis.c_d() / static_cast<double>(d - 2);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            if (u[j] == 0.0) continue;
            for (int k = 0; k < n; ++k) {
                acc += basis.d_tensor(i, j, k) * u[j] * v[k];
            }
        }
        out[i] = scale * acc;
    }
    return out;
}

double bloch_angle_from_overlap(double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw DomainError("bloch_angle_from_overlap: delta must lie in [0, 1]");
    }
    return std::acos(delta);
}

}  // namespace qbound
