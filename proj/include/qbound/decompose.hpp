// Convex decomposition of rank-1 POVMs into extremals.
//
// Span machinery restricts the analysis to the subspace of R^{d^2-1}
// spanned by the prepared states' Bloch vectors: components of measurement
// vectors orthogonal to every preparation never contribute to statistics.
//
// Two splitting routes:
//   * lemma1_split removes one outcome whose Bloch vector is a conical
//     combination of the others (weights (lambda_b + lambda_j c_b)/N on one
//     branch, mixing coefficient p = min_b lambda_b / lambda_b^(1));
//   * dependency_split handles every non-extremal input, including
//     degenerate configurations with no conical dependency (e.g. two
//     interleaved projective pairs), via a null vector of the matrix with
//     columns (1, v_b) over the nonzero-weight outcomes.
//
// decompose_extremal recurses (preferring the conical route when it exists)
// until every leaf is extremal; with span dimension r every leaf has at
// most r + 1 nonzero outcomes.

#pragma once

#include "qbound/bloch.hpp"
#include "qbound/common.hpp"
#include "qbound/povm.hpp"

#include <optional>
#include <vector>

namespace qbound {

struct SpanBasis {
    int dim = 0;   // qudit dimension d
    Matrix basis;  // (d^2-1) x r, orthonormal columns

    int rank() const { return static_cast<int>(basis.cols()); }
    // Coordinates of v in the span, basis^T v.
    Vector coordinates(const Vector& v) const { return basis.transpose() * v; }
    // Orthogonal projection of v onto the span.
    Vector project(const Vector& v) const { return basis * (basis.transpose() * v); }
};

// Orthonormal basis of the subspace spanned by the states' Bloch vectors.
SpanBasis span_projector(const std::vector<QuditState>& states);

// The trivial span, all of R^{d^2-1}.
SpanBasis full_span(int dim);

struct ProjectedElement {
    double weight = 0.0;
    Vector bloch;         // projected vector, full coordinates
    bool is_rank1 = true; // projection may break |v| = 1 / the star condition
    bool is_psd = true;   // ... and positivity, for d >= 3
};

// Projects every element's Bloch vector onto the span.  Statistics on any
// state inside the span are unchanged.
std::vector<ProjectedElement> project_to_span(const Povm& povm, const SpanBasis& span);

struct ConicalDependency {
    int index = -1;       // outcome j with v_j = sum_{b != j} c_b v_b
    Vector coefficients;  // c_b >= 0 over all outcomes; entry `index` is 0
};

// Lowest-index nonzero-weight outcome whose Bloch vector (in span
// coordinates) is a conical combination of the other nonzero-weight
// outcomes' vectors.  Solved per candidate as a nonnegative least squares
// problem; accepted at reconstruction residual <= 1e-8.
std::optional<ConicalDependency> find_conical_dependency(const Povm& povm,
                                                         const SpanBasis& span);

struct ConvexDecomposition {
    std::vector<double> weights;  // p_i >= 0, sum 1
    std::vector<Povm> branches;   // same dimension and outcome count as parent
};

// The paper-faithful split along a conical dependency.  Branch 1 zeroes
// outcome j, branch 2 zeroes the outcome minimizing lambda_b/lambda_b^(1)
// (lowest index on ties); Bloch vectors are unchanged in both branches.
ConvexDecomposition lemma1_split(const Povm& povm, const ConicalDependency& dep);

// General split from a null vector of the (r+1) x l matrix with columns
// (1, v_b) over nonzero-weight outcomes; returns nullopt exactly when those
// columns are linearly independent (the POVM is extremal on the span).
std::optional<ConvexDecomposition> dependency_split(const Povm& povm,
                                                    const SpanBasis& span);

// Full recursive decomposition into extremal branches.  When states are
// given the span is their Bloch span and every POVM vector must already lie
// in it (within tolerance); otherwise the full space is used.  Identical
// leaves are merged by summing weights.
ConvexDecomposition decompose_extremal(const Povm& povm,
                                       const std::vector<QuditState>& states = {});

// True iff dependency_split over the full span finds nothing; any rank-1
// POVM with more than d^2 nonzero outcomes is therefore non-extremal.
bool is_extremal(const Povm& povm);

// Largest over outcomes of the Frobenius recombination error
// | sum_i p_i M_b^(i) - M_b |.
double recombination_residual(const Povm& parent, const ConvexDecomposition& dec);

}  // namespace qbound
