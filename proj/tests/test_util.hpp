// Shared helpers for the test suites: seeded random states, unitaries, and
// rank-1 POVM generators (isometry rows give nonnegative rank-1 elements
// summing to the identity with total trace d).

#pragma once

#include "qbound/bloch.hpp"
#include "qbound/povm.hpp"

#include <Eigen/QR>

#include <random>

namespace qbound::testutil {

inline Matrix random_real_gaussian(int rows, int cols, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    }
    return m;
}

inline ComplexMatrix random_complex_gaussian(int rows, int cols, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    }
    return m;
}

// Haar-ish random unitary via QR with phase-fixed diagonal.
inline ComplexMatrix random_unitary(int d, std::mt19937& rng) {
    const ComplexMatrix g = random_complex_gaussian(d, d, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
        const Complex diag = r(i, i);
        q.col(i) *= std::abs(diag) > 0 ? diag / std::abs(diag) : Complex(1, 0);
    }
    return q;
}

inline ComplexVector random_pure_ket(int d, std::mt19937& rng) {
    ComplexVector v = random_complex_gaussian(d, 1, rng);
    return v / v.norm();
}

inline QuditState random_pure_state(int d, std::mt19937& rng) {
    const ComplexVector ket = random_pure_ket(d, rng);
    return bloch_from_state(ket * ket.adjoint());
}

inline ComplexMatrix random_density_matrix(int d, std::mt19937& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector probs(d);
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
        probs[i] = unif(rng) + 1e-3;
        total += probs[i];
    }
    probs /= total;
    const ComplexMatrix u = random_unitary(d, rng);
    return u * probs.asDiagonal() * u.adjoint();
}

// Random rank-1 POVM from the rows of a random l x d isometry:
// sum_b a_b a_b^dag = A^dag A = I and sum_b |a_b|^2 = d.
inline Povm random_rank1_povm(int d, int outcomes, std::mt19937& rng) {
    const ComplexMatrix g = random_complex_gaussian(outcomes, d, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    const ComplexMatrix q =
        ComplexMatrix(qr.householderQ()).leftCols(d);  // outcomes x d, isometry
    std::vector<ComplexMatrix> matrices;
    for (int b = 0; b < outcomes; ++b) {
        const ComplexVector row = q.row(b).adjoint();  // d-vector
        matrices.push_back(row * row.adjoint());
    }
    return from_matrices(matrices);
}

// Planar variant: a real isometry keeps every Bloch vector in the xz-plane.
inline Povm random_planar_qubit_povm(int outcomes, std::mt19937& rng) {
    const Matrix g = random_real_gaussian(outcomes, 2, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix q = Matrix(qr.householderQ()).leftCols(2);
    std::vector<ComplexMatrix> matrices;
    for (int b = 0; b < outcomes; ++b) {
        const Vector row = q.row(b).transpose();
        matrices.push_back((row * row.transpose()).cast<Complex>());
    }
    return from_matrices(matrices);
}

}  // namespace qbound::testutil
