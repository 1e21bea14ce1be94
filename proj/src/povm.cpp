#include "qbound/povm.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace qbound {

int Povm::nonzero_outcomes(double tol) const {
    int count = 0;
    for (const auto& el : elements) {
        if (el.weight > tol) ++count;
    }
    return count;
}

ValidationReport validate(const Povm& povm, double tol) {
    ValidationReport report;
    auto flag = [&report](const std::string& cond, double residual) {
        report.violations.push_back({cond, residual});
        report.max_residual = std::max(report.max_residual, residual);
    };

    if (povm.dim < 2) {
        flag("dimension >= 2", 1.0);
        return report;
    }
    const BlochBasis& basis = bloch_basis(povm.dim);
    const int n = basis.size();

    double weight_sum = 0.0;
    Vector vector_sum = Vector::Zero(n);
    for (int b = 0; b < povm.outcomes(); ++b) {
        const PovmElement& el = povm.elements[b];
        if (el.bloch.size() != n) {
            flag("element " + std::to_string(b) + " bloch length d^2-1", 1.0);
            return report;
        }
        weight_sum += el.weight;
        vector_sum += el.weight * el.bloch;
        if (el.weight < -tol) {
            flag("lambda_" + std::to_string(b) + " >= 0", -el.weight);
        }
        if (el.weight > tol) {
            const double norm_res = std::abs(el.bloch.norm() - 1.0);
            if (norm_res > tol) {
                flag("|v_" + std::to_string(b) + "| = 1", norm_res);
            }
            if (povm.dim >= 3) {
                const double star_res =
                    (star_product(el.bloch, el.bloch, basis) - el.bloch).norm();
                if (star_res > tol) {
                    flag("v_" + std::to_string(b) + " * v_" + std::to_string(b) +
                             " = v_" + std::to_string(b),
                         star_res);
                }
            }
        }
    }
    const double sum_res = std::abs(weight_sum - povm.dim);
    if (sum_res > tol) flag("sum lambda_b = d", sum_res);
    const double vec_res = vector_sum.norm();
    if (vec_res > tol) flag("sum lambda_b v_b = 0", vec_res);
    return report;
}

void require_valid(const Povm& povm, double tol) {
    const ValidationReport report = validate(povm, tol);
    if (!report.ok()) {
        std::ostringstream msg;
        msg << "invalid POVM:";
        for (const auto& v : report.violations) {
            msg << " [" << v.condition << " residual " << v.residual << "]";
        }
        throw ValidationError(msg.str());
    }
}

double outcome_probability(const Povm& povm, const QuditState& state, int b) {
    if (state.dim != povm.dim) {
        throw DomainError("outcome_probability: dimension mismatch");
    }
    if (b < 0 || b >= povm.outcomes()) {
        throw DomainError("outcome_probability: outcome index out of range");
    }
    const PovmElement& el = povm.elements[b];
    const double d = povm.dim;
    return el.weight / d * (1.0 + (d - 1.0) * el.bloch.dot(state.bloch));
}

std::vector<double> outcome_distribution(const Povm& povm, const QuditState& state) {
    std::vector<double> out(povm.outcomes());
    for (int b = 0; b < povm.outcomes(); ++b) {
        out[b] = outcome_probability(povm, state, b);
    }
    return out;
}

namespace {

// Deterministic orthonormal basis of an eigenspace: project canonical basis
// vectors onto it and Gram-Schmidt in index order.
std::vector<ComplexVector> canonical_eigenspace_basis(const ComplexMatrix& projector,
                                                      int expected_dim) {
    const int d = static_cast<int>(projector.rows());
    std::vector<ComplexVector> basis;
    for (int i = 0; i < d && static_cast<int>(basis.size()) < expected_dim; ++i) {
        ComplexVector cand = projector.col(i);  // projector * e_i
        for (const auto& prev : basis) {
            cand -= prev.dot(cand) * prev;
        }
        const double nrm = cand.norm();
        if (nrm > 1e-7) basis.push_back(cand / nrm);
    }
    if (static_cast<int>(basis.size()) != expected_dim) {
        throw InternalError("rank1_refine: eigenspace basis extraction failed");
    }
    return basis;
}

}  // namespace

Rank1Refinement rank1_refine(const std::vector<ComplexMatrix>& matrices, double tol) {
    if (matrices.empty()) throw DomainError("rank1_refine: empty POVM");
    const int d = static_cast<int>(matrices.front().rows());
    if (d < 2) throw DomainError("rank1_refine: dimension must be >= 2");

    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& m : matrices) {
        if (m.rows() != d || m.cols() != d) {
            throw DomainError("rank1_refine: inconsistent matrix sizes");
        }
        if ((m - m.adjoint()).norm() > tol) {
            throw ValidationError("rank1_refine: element is not Hermitian");
        }
        sum += m;
    }
    if ((sum - ComplexMatrix::Identity(d, d)).norm() > tol) {
        throw ValidationError("rank1_refine: elements do not sum to the identity");
    }

    Rank1Refinement out;
    out.povm.dim = d;
    const double drop_tol = 1e-10;
    for (int original = 0; original < static_cast<int>(matrices.size()); ++original) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(matrices[original]);
        const Vector evals = eig.eigenvalues();
        if (evals.minCoeff() < -tol) {
            throw ValidationError("rank1_refine: element is not positive semidefinite");
        }
        // Cluster (near-)equal eigenvalues; emit clusters largest-first.
        int hi = d - 1;  // eigenvalues come back ascending
        while (hi >= 0) {
            int lo = hi;
            while (lo > 0 && std::abs(evals[lo - 1] - evals[hi]) <= tol) --lo;
            const double value = evals.segment(lo, hi - lo + 1).mean();
            if (value > drop_tol) {
                ComplexMatrix projector = ComplexMatrix::Zero(d, d);
                for (int i = lo; i <= hi; ++i) {
                    projector += eig.eigenvectors().col(i) *
                                 eig.eigenvectors().col(i).adjoint();
                }
                for (const auto& vec :
                     canonical_eigenspace_basis(projector, hi - lo + 1)) {
                    const QuditState pure = bloch_from_state(vec * vec.adjoint());
                    out.povm.elements.push_back({value, pure.bloch});
                    out.bins.push_back(original);
                }
            }
            hi = lo - 1;
        }
    }
    return out;
}

ComplexMatrix element_matrix(const Povm& povm, int b) {
    const PovmElement& el = povm.elements[b];
    return el.weight * bloch_matrix(povm.dim, el.bloch);
}

std::vector<ComplexMatrix> to_matrices(const Povm& povm) {
    std::vector<ComplexMatrix> out;
    out.reserve(povm.elements.size());
    for (int b = 0; b < povm.outcomes(); ++b) out.push_back(element_matrix(povm, b));
    return out;
}

Povm from_matrices(const std::vector<ComplexMatrix>& matrices, double tol) {
    if (matrices.empty()) throw DomainError("from_matrices: empty POVM");
    const int d = static_cast<int>(matrices.front().rows());
    const BlochBasis& basis = bloch_basis(d);

    Povm povm;
    povm.dim = d;
    for (int b = 0; b < static_cast<int>(matrices.size()); ++b) {
        const ComplexMatrix& m = matrices[b];
        if (m.rows() != d || m.cols() != d) {
            throw DomainError("from_matrices: inconsistent matrix sizes");
        }
        if ((m - m.adjoint()).norm() > tol) {
            throw ValidationError("from_matrices: element is not Hermitian");
        }
        const double weight = m.trace().real();
        if (weight < -tol) {
            throw ValidationError("from_matrices: element has negative trace");
        }
        if (weight <= tol) {
            povm.elements.push_back({0.0, Vector::Zero(basis.size())});
            continue;
        }
        const ComplexMatrix projector = m / weight;
        if ((projector * projector - projector).norm() > tol) {
            throw NeedsRefinementError(
                "from_matrices: element " + std::to_string(b) +
                " has rank above one; apply rank1_refine first");
        }
        povm.elements.push_back({weight, bloch_from_state(projector).bloch});
    }
    return povm;
}

}  // namespace qbound
