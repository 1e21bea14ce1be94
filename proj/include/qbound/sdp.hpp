// Small dense semidefinite programming over a product of symmetric PSD
// blocks, solved by an infeasible primal-dual interior-point method (HKM
// direction with Mehrotra predictor-corrector).
//
//   primal:  min  sum_k tr(C_k X_k)   s.t.  A_i(X) = b_i,  X_k >= 0
//   dual:    max  b.y                 s.t.  C - sum_i y_i A_i >= 0
//
// Redundant equality constraints are detected and removed up front (the
// right-hand side is checked for consistency), so callers may pass
// linearly dependent rows.  On success the solution carries a polished
// dual certificate: y is adjusted along a direction g with A^T(g) = I
// (when the identity lies in the constraint span) so that C - A^T(y) is
// positive semidefinite up to roundoff, making b.y a true lower bound on
// the primal optimum.

#pragma once

#include "qbound/common.hpp"

#include <vector>

namespace qbound {

struct SdpTerm {
    int block = 0;
    Matrix coeff;  // symmetric
};

struct SdpConstraint {
    std::vector<SdpTerm> terms;
};

struct SdpProblem {
    std::vector<int> block_dims;
    std::vector<Matrix> objective;  // one symmetric C_k per block
    std::vector<SdpConstraint> constraints;
    Vector rhs;
};

struct SdpOptions {
    double feasibility_tol = 1e-10;
    double gap_tol = 1e-9;            // relative duality gap
    double linear_consistency_tol = 1e-8;
    int max_iterations = 100;
    double step_fraction = 0.98;
    bool show_progress = false;
};

enum class SdpStatus { Optimal, Stalled, IterationLimit };

struct SdpSolution {
    std::vector<Matrix> X;
    std::vector<Matrix> S;
    Vector y;  // over the original constraints; removed rows carry 0

    double primal_objective = 0.0;
    double dual_objective = 0.0;
    // b.y after the PSD polish of the dual slack; a genuine lower bound on
    // the primal optimum (up to floating-point arithmetic).
    double certified_dual_objective = 0.0;

    double gap = 0.0;               // |primal - certified dual|
    double relative_gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    SdpStatus status = SdpStatus::Optimal;
};

// Throws InfeasibleError with a Farkas-style certificate when the primal is
// detected infeasible (inconsistent linear rows, or an unbounded dual ray).
// A solve that stops early reports Stalled / IterationLimit in the status;
// callers decide whether the residuals reached are good enough.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

}  // namespace qbound
