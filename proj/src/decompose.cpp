#include "qbound/decompose.hpp"

#include "qbound/nnls.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace qbound {

namespace {

constexpr double kConicalResidualTol = 1e-8;
constexpr double kNullSingularTol = 1e-9;
constexpr double kZeroWeightTol = kDefaultTol;

std::vector<int> active_outcomes(const Povm& povm) {
    std::vector<int> idx;
    for (int b = 0; b < povm.outcomes(); ++b) {
        if (povm.elements[b].weight > kZeroWeightTol) idx.push_back(b);
    }
    return idx;
}

}  // namespace

SpanBasis span_projector(const std::vector<QuditState>& states) {
    if (states.empty()) throw DomainError("span_projector: empty state list");
    const int dim = states.front().dim;
    const int n = static_cast<int>(states.front().bloch.size());
    Matrix cols(n, static_cast<int>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dim != dim) {
            throw DomainError("span_projector: mixed dimensions");
        }
        cols.col(static_cast<int>(i)) = states[i].bloch;
    }
    Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
    const double sigma_max = svd.singularValues().size() > 0
                                 ? svd.singularValues()[0]
                                 : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()[i] > 1e-10 * std::max(1.0, sigma_max)) ++rank;
    }
    return SpanBasis{dim, svd.matrixU().leftCols(rank)};
}

SpanBasis full_span(int dim) {
    const int n = dim * dim - 1;
    return SpanBasis{dim, Matrix::Identity(n, n)};
}

std::vector<ProjectedElement> project_to_span(const Povm& povm, const SpanBasis& span) {
    if (span.dim != povm.dim) throw DomainError("project_to_span: dimension mismatch");
    const BlochBasis& basis = bloch_basis(povm.dim);
    std::vector<ProjectedElement> out;
    out.reserve(povm.elements.size());
    for (const PovmElement& el : povm.elements) {
        ProjectedElement proj;
        proj.weight = el.weight;
        proj.bloch = span.project(el.bloch);
        if (el.weight > kZeroWeightTol) {
            proj.is_rank1 = std::abs(proj.bloch.norm() - 1.0) <= kDefaultTol;
            if (proj.is_rank1 && povm.dim >= 3) {
                proj.is_rank1 =
                    (star_product(proj.bloch, proj.bloch, basis) - proj.bloch).norm() <=
                    kDefaultTol;
            }
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(
                bloch_matrix(povm.dim, proj.bloch), Eigen::EigenvaluesOnly);
            proj.is_psd = eig.eigenvalues().minCoeff() >= -kDefaultTol;
        }
        out.push_back(std::move(proj));
    }
    return out;
}

std::optional<ConicalDependency> find_conical_dependency(const Povm& povm,
                                                         const SpanBasis& span) {
    require_valid(povm);
    const std::vector<int> active = active_outcomes(povm);
    if (active.size() < 2) return std::nullopt;

    const int r = span.rank();
    Matrix coords(r, static_cast<int>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c) {
        coords.col(static_cast<int>(c)) = span.coordinates(povm.elements[active[c]].bloch);
    }

    for (std::size_t j = 0; j < active.size(); ++j) {
        Matrix others(r, static_cast<int>(active.size()) - 1);
        int col = 0;
        for (std::size_t b = 0; b < active.size(); ++b) {
            if (b != j) others.col(col++) = coords.col(static_cast<int>(b));
        }
        const NnlsResult fit = nnls(others, coords.col(static_cast<int>(j)));
        if (fit.residual <= kConicalResidualTol) {
            ConicalDependency dep;
            dep.index = active[j];
            dep.coefficients = Vector::Zero(povm.outcomes());
            col = 0;
            for (std::size_t b = 0; b < active.size(); ++b) {
                if (b != j) dep.coefficients[active[b]] = fit.x[col++];
            }
            return dep;
        }
    }
    return std::nullopt;
}

ConvexDecomposition lemma1_split(const Povm& povm, const ConicalDependency& dep) {
    require_valid(povm);
    const int l = povm.outcomes();
    const int j = dep.index;
    if (j < 0 || j >= l || dep.coefficients.size() != l) {
        throw PreconditionError("lemma1_split: dependency does not match the POVM");
    }
    const double lambda_j = povm.elements[j].weight;
    if (lambda_j <= kZeroWeightTol) {
        throw PreconditionError("lemma1_split: outcome has zero weight, nothing to split");
    }
    if (dep.coefficients.minCoeff() < -kDefaultTol) {
        throw PreconditionError("lemma1_split: conical coefficients must be nonnegative");
    }
    Vector recon = Vector::Zero(povm.elements[j].bloch.size());
    for (int b = 0; b < l; ++b) {
        if (b == j) continue;
        recon += dep.coefficients[b] * povm.elements[b].bloch;
    }
    if ((recon - povm.elements[j].bloch).norm() > kConicalResidualTol) {
        throw PreconditionError("lemma1_split: v_j is not the claimed conical combination");
    }

    const double d = povm.dim;
    const double coeff_sum = dep.coefficients.sum();
    const double normalization = ((d - lambda_j) + lambda_j * coeff_sum) / d;

    Povm branch1 = povm;
    branch1.elements[j].weight = 0.0;
    for (int b = 0; b < l; ++b) {
        if (b == j) continue;
        branch1.elements[b].weight =
            (povm.elements[b].weight + lambda_j * dep.coefficients[b]) / normalization;
    }

    double p = std::numeric_limits<double>::infinity();
    int minimizer = -1;
    for (int b = 0; b < l; ++b) {
        if (branch1.elements[b].weight <= kZeroWeightTol) continue;
        const double ratio = povm.elements[b].weight / branch1.elements[b].weight;
        if (ratio < p - 1e-15) {  // strict improvement; lowest index wins ties
            p = ratio;
            minimizer = b;
        }
    }
    if (minimizer < 0 || !(p >= 0.0 && p < 1.0)) {
        throw InternalError("lemma1_split: convex coefficient outside [0, 1)");
    }

    Povm branch2 = povm;
    for (int b = 0; b < l; ++b) {
        const double w =
            (povm.elements[b].weight - p * branch1.elements[b].weight) / (1.0 - p);
        branch2.elements[b].weight = std::max(w, 0.0);
    }
    branch2.elements[minimizer].weight = 0.0;

    return ConvexDecomposition{{p, 1.0 - p}, {std::move(branch1), std::move(branch2)}};
}

std::optional<ConvexDecomposition> dependency_split(const Povm& povm,
                                                    const SpanBasis& span) {
    require_valid(povm);
    const std::vector<int> active = active_outcomes(povm);
    const int na = static_cast<int>(active.size());
    if (na < 2) return std::nullopt;

    const int r = span.rank();
    Matrix columns(r + 1, na);  // rows: (1, span coordinates of v_b)
    for (int c = 0; c < na; ++c) {
        columns(0, c) = 1.0;
        columns.block(1, c, r, 1) = span.coordinates(povm.elements[active[c]].bloch);
    }

    Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeFullV);
    const int smallest = static_cast<int>(svd.matrixV().cols()) - 1;
    const double sigma_min =
        na <= r + 1 ? svd.singularValues()[std::min<int>(na, r + 1) - 1] : 0.0;
    if (na <= r + 1 && sigma_min > kNullSingularTol) return std::nullopt;

    Vector c = svd.matrixV().col(smallest);
    for (int i = 0; i < na; ++i) {
        if (std::abs(c[i]) > 1e-12) {
            if (c[i] < 0.0) c = -c;  // first nonzero entry positive
            break;
        }
    }

    double t_plus = std::numeric_limits<double>::infinity();
    double t_minus = std::numeric_limits<double>::infinity();
    for (int i = 0; i < na; ++i) {
        const double lambda = povm.elements[active[i]].weight;
        if (c[i] < -1e-14) t_plus = std::min(t_plus, lambda / -c[i]);
        if (c[i] > 1e-14) t_minus = std::min(t_minus, lambda / c[i]);
    }
    if (!std::isfinite(t_plus) || !std::isfinite(t_minus)) return std::nullopt;

    auto make_branch = [&](double t) {
        Povm branch = povm;
        for (int i = 0; i < na; ++i) {
            const double w = povm.elements[active[i]].weight + t * c[i];
            branch.elements[active[i]].weight = std::max(w, 0.0);
        }
        return branch;
    };
    Povm branch1 = make_branch(t_plus);
    Povm branch2 = make_branch(-t_minus);
    const double p = t_minus / (t_plus + t_minus);

    // Near-dependent (but independent) columns can produce branches that are
    // not valid POVMs; treat the input as extremal in that case.
    if (!validate(branch1).ok() || !validate(branch2).ok()) return std::nullopt;

    return ConvexDecomposition{{p, 1.0 - p}, {std::move(branch1), std::move(branch2)}};
}

bool is_extremal(const Povm& povm) {
    return !dependency_split(povm, full_span(povm.dim)).has_value();
}

double recombination_residual(const Povm& parent, const ConvexDecomposition& dec) {
    double residual = 0.0;
    for (int b = 0; b < parent.outcomes(); ++b) {
        ComplexMatrix sum = ComplexMatrix::Zero(parent.dim, parent.dim);
        for (std::size_t i = 0; i < dec.branches.size(); ++i) {
            sum += dec.weights[i] * element_matrix(dec.branches[i], b);
        }
        residual = std::max(residual, (sum - element_matrix(parent, b)).norm());
    }
    return residual;
}

namespace {

bool same_leaf(const Povm& a, const Povm& b) {
    if (a.outcomes() != b.outcomes()) return false;
    for (int i = 0; i < a.outcomes(); ++i) {
        if (std::abs(a.elements[i].weight - b.elements[i].weight) > kDefaultTol) {
            return false;
        }
        if ((a.elements[i].bloch - b.elements[i].bloch).norm() > kDefaultTol) {
            return false;
        }
    }
    return true;
}

void decompose_recursive(const Povm& povm, const SpanBasis& span, double weight,
                         int depth, int max_depth, ConvexDecomposition& leaves) {
    if (depth > max_depth) {
        throw InternalError("decompose_extremal: recursion depth guard exceeded");
    }
    std::optional<ConvexDecomposition> split;
    if (auto dep = find_conical_dependency(povm, span)) {
        split = lemma1_split(povm, *dep);
        // The conical split can hand back a branch that is itself degenerate
        // in a way lemma 1 cannot reduce; the general splitter below still
        // applies at the next level.
    } else {
        split = dependency_split(povm, span);
    }
    if (!split) {
        for (std::size_t i = 0; i < leaves.branches.size(); ++i) {
            if (same_leaf(leaves.branches[i], povm)) {
                leaves.weights[i] += weight;
                return;
            }
        }
        leaves.weights.push_back(weight);
        leaves.branches.push_back(povm);
        return;
    }
    for (std::size_t i = 0; i < split->branches.size(); ++i) {
        decompose_recursive(split->branches[i], span, weight * split->weights[i],
                            depth + 1, max_depth, leaves);
    }
}

}  // namespace

ConvexDecomposition decompose_extremal(const Povm& povm,
                                       const std::vector<QuditState>& states) {
    require_valid(povm);
    SpanBasis span = states.empty() ? full_span(povm.dim) : span_projector(states);
    if (!states.empty()) {
        for (int b = 0; b < povm.outcomes(); ++b) {
            const Vector& v = povm.elements[b].bloch;
            if ((v - span.project(v)).norm() > 1e-8 * (1.0 + v.norm())) {
                throw PreconditionError(
                    "decompose_extremal: POVM Bloch vectors must lie in the states' "
                    "span; apply project_to_span first");
            }
        }
    }
    ConvexDecomposition leaves;
    decompose_recursive(povm, span, 1.0, 0, povm.outcomes() + 1, leaves);
    return leaves;
}

}  // namespace qbound
