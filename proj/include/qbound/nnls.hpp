// Dense nonnegative least squares, Lawson-Hanson active set.
// Solves min |A x - b| subject to x >= 0; exact stationarity on the passive
// set, so small conical-feasibility problems are solved to machine accuracy.

#pragma once

#include "qbound/common.hpp"

namespace qbound {

struct NnlsResult {
    Vector x;
    double residual = 0.0; // |A x - b|
    int iterations = 0;
};

NnlsResult nnls(const Matrix& A, const Vector& b, int max_iterations = 0);

}  // namespace qbound
