// Rank-1 POVM data model and operations: validity checking, outcome
// statistics, rank-1 refinement of general POVMs, and conversion between
// the (weight, Bloch vector) form and explicit matrices.
//
// An element is M_b = lambda_b E_b with E_b = (1/d)(I + c_d v_b.sigma),
// |v_b| = 1.  A POVM is valid when
//   sum_b lambda_b = d,   sum_b lambda_b v_b = 0,   lambda_b >= 0.
// Zero-weight entries are permitted as placeholder outcomes and carry the
// zero vector as their Bloch direction; they are excluded from the
// unit-norm and star checks.

#pragma once

#include "qbound/bloch.hpp"
#include "qbound/common.hpp"

#include <string>
#include <vector>

namespace qbound {

struct PovmElement {
    double weight = 0.0; // lambda_b >= 0
    Vector bloch;        // unit vector when weight > 0, zero placeholder otherwise
};

struct Povm {
    int dim = 0;
    std::vector<PovmElement> elements;

    int outcomes() const { return static_cast<int>(elements.size()); }
    // Outcomes with weight above the tolerance.
    int nonzero_outcomes(double tol = kDefaultTol) const;
};

struct ValidationIssue {
    std::string condition;
    double residual = 0.0;
};

struct ValidationReport {
    std::vector<ValidationIssue> violations;
    double max_residual = 0.0;

    bool ok() const { return violations.empty(); }
};

// Checks the weight sum, vector-sum, nonnegativity, unit-norm, and (d >= 3)
// star conditions, reporting every violated one with its residual.
ValidationReport validate(const Povm& povm, double tol = kDefaultTol);

// Throwing variant used as an operation precondition.
void require_valid(const Povm& povm, double tol = kDefaultTol);

// p(b) = (lambda_b / d)(1 + (d - 1) v_b . n); equals tr(M_b rho).
double outcome_probability(const Povm& povm, const QuditState& state, int b);

std::vector<double> outcome_distribution(const Povm& povm, const QuditState& state);

// Rank-1 refinement of a general POVM given as matrices: each input is
// eigendecomposed, every positive eigenvalue becomes its own outcome, and
// `bins[j]` maps refined outcome j back to the input it came from.
// Eigenvectors of a degenerate eigenspace are fixed by projecting canonical
// basis vectors into the eigenspace and orthonormalizing in index order;
// within one input, clusters are emitted in decreasing eigenvalue order.
struct Rank1Refinement {
    Povm povm;
    std::vector<int> bins;
};

Rank1Refinement rank1_refine(const std::vector<ComplexMatrix>& matrices,
                             double tol = kDefaultTol);

// Explicit matrices M_b = lambda_b (1/d)(I + c_d v_b.sigma).
std::vector<ComplexMatrix> to_matrices(const Povm& povm);
ComplexMatrix element_matrix(const Povm& povm, int b);

// Recovers (weight, Bloch) pairs; every input must be a nonnegative multiple
// of a rank-1 projector within the tolerance, otherwise NeedsRefinementError
// points the caller at rank1_refine.
Povm from_matrices(const std::vector<ComplexMatrix>& matrices,
                   double tol = kDefaultTol);

}  // namespace qbound
