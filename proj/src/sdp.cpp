#include "qbound/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace qbound {

namespace {

// svec with sqrt(2)-scaled off-diagonals, so svec(A).svec(B) = tr(AB).
int svec_size(int n) { return n * (n + 1) / 2; }

void svec_accumulate(const Matrix& A, double* out) {
    const int n = static_cast<int>(A.rows());
    const double rt2 = std::sqrt(2.0);
    int idx = 0;
    for (int j = 0; j < n; ++j) {
        out[idx++] += A(j, j);
        for (int i = j + 1; i < n; ++i) out[idx++] += rt2 * A(i, j);
    }
}

Matrix unsvec(const double* in, int n) {
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    Matrix A(n, n);
    int idx = 0;
    for (int j = 0; j < n; ++j) {
        A(j, j) = in[idx++];
        for (int i = j + 1; i < n; ++i) {
            A(i, j) = A(j, i) = inv_rt2 * in[idx++];
        }
    }
    return A;
}

class Workspace {
  public:
    Workspace(const SdpProblem& p, const SdpOptions& opts)
        : problem_(p), options_(opts) {
        const int nblocks = static_cast<int>(p.block_dims.size());
        if (static_cast<int>(p.objective.size()) != nblocks) {
            throw DomainError("solve_sdp: one objective matrix per block required");
        }
        if (p.rhs.size() != static_cast<Eigen::Index>(p.constraints.size())) {
            throw DomainError("solve_sdp: rhs length must match constraint count");
        }
        if (p.constraints.empty()) {
            throw DomainError("solve_sdp: at least one constraint is required");
        }
        total_dim_ = 0;
        svec_total_ = 0;
        svec_offsets_.resize(nblocks);
        for (int k = 0; k < nblocks; ++k) {
            svec_offsets_[k] = svec_total_;
            svec_total_ += svec_size(p.block_dims[k]);
            total_dim_ += p.block_dims[k];
        }
        check_symmetry();
        reduce_rows();
    }

    SdpSolution run();

  private:
    using Blocks = std::vector<Matrix>;

    void check_symmetry() const {
        for (std::size_t k = 0; k < problem_.objective.size(); ++k) {
            const Matrix& c = problem_.objective[k];
            if (c.rows() != problem_.block_dims[k] || c.cols() != problem_.block_dims[k]) {
                throw DomainError("solve_sdp: objective block size mismatch");
            }
            if ((c - c.transpose()).norm() > 1e-10 * (1.0 + c.norm())) {
                throw DomainError("solve_sdp: objective block is not symmetric");
            }
        }
        for (const auto& con : problem_.constraints) {
            for (const auto& t : con.terms) {
                if (t.block < 0 || t.block >= static_cast<int>(problem_.block_dims.size())) {
                    throw DomainError("solve_sdp: constraint refers to unknown block");
                }
                const int n = problem_.block_dims[t.block];
                if (t.coeff.rows() != n || t.coeff.cols() != n) {
                    throw DomainError("solve_sdp: constraint block size mismatch");
                }
                if ((t.coeff - t.coeff.transpose()).norm() > 1e-10 * (1.0 + t.coeff.norm())) {
                    throw DomainError("solve_sdp: constraint block is not symmetric");
                }
            }
        }
    }

    Vector svec_constraint(const SdpConstraint& con) const {
        Vector row = Vector::Zero(svec_total_);
        for (const auto& t : con.terms) {
            svec_accumulate(t.coeff, row.data() + svec_offsets_[t.block]);
        }
        return row;
    }

    // Select a maximal independent subset of rows, verify the dropped rows
    // are consistent with it, and replace the kept rows by an orthonormal
    // recombination (QR): the interior-point Schur systems are far better
    // conditioned on orthonormal rows, and equality constraints are
    // invariant under invertible row recombination.
    void reduce_rows() {
        const int m = static_cast<int>(problem_.constraints.size());
        Matrix A(m, svec_total_);
        for (int i = 0; i < m; ++i) A.row(i) = svec_constraint(problem_.constraints[i]);

        Eigen::ColPivHouseholderQR<Matrix> pivot_qr(A.transpose());
        pivot_qr.setThreshold(1e-11);
        const int rank = static_cast<int>(pivot_qr.rank());
        kept_.assign(pivot_qr.colsPermutation().indices().data(),
                     pivot_qr.colsPermutation().indices().data() + rank);
        std::sort(kept_.begin(), kept_.end());

        Matrix At(svec_total_, rank);  // columns = kept rows of A
        Vector bk(rank);
        for (int i = 0; i < rank; ++i) {
            At.col(i) = A.row(kept_[i]).transpose();
            bk[i] = problem_.rhs[kept_[i]];
        }

        Eigen::HouseholderQR<Matrix> qr(At);
        Aortho_ = Matrix(qr.householderQ() * Matrix::Identity(svec_total_, rank))
                      .transpose();                                  // rank x N
        R_ = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
        bortho_ = R_.transpose()
                      .triangularView<Eigen::Lower>()
                      .solve(bk);  // R^{-T} b

        // Consistency of the dropped rows: x0 solves the kept system.
        const Vector x0 = Aortho_.transpose() * bortho_;
        const Vector full_residual = A * x0 - problem_.rhs;
        if (full_residual.lpNorm<Eigen::Infinity>() >
            options_.linear_consistency_tol *
                (1.0 + problem_.rhs.lpNorm<Eigen::Infinity>())) {
            std::ostringstream msg;
            msg << "solve_sdp: equality constraints are inconsistent (residual "
                << full_residual.lpNorm<Eigen::Infinity>() << ")";
            throw InfeasibleError(msg.str());
        }

        // Materialize the orthonormal rows as per-block coefficient matrices.
        const int nb = static_cast<int>(problem_.block_dims.size());
        con_blocks_.assign(rank, Blocks(nb));
        for (int i = 0; i < rank; ++i) {
            const Vector row = Aortho_.row(i).transpose();
            for (int k = 0; k < nb; ++k) {
                con_blocks_[i][k] =
                    unsvec(row.data() + svec_offsets_[k], problem_.block_dims[k]);
            }
        }
    }

    int nblocks() const { return static_cast<int>(problem_.block_dims.size()); }
    int mkept() const { return static_cast<int>(kept_.size()); }

    double inner(const Blocks& a, const Blocks& b) const {
        double acc = 0.0;
        for (int k = 0; k < nblocks(); ++k) acc += (a[k].array() * b[k].array()).sum();
        return acc;
    }

    Vector apply_A(const Blocks& X) const {
        const int m = mkept();
        Vector out(m);
        for (int i = 0; i < m; ++i) out[i] = inner(con_blocks_[i], X);
        return out;
    }

    Blocks apply_At(const Vector& y) const {
        Blocks out = zero_blocks();
        for (int i = 0; i < mkept(); ++i) {
            if (y[i] == 0.0) continue;
            for (int k = 0; k < nblocks(); ++k) out[k] += y[i] * con_blocks_[i][k];
        }
        return out;
    }

    Blocks zero_blocks() const {
        Blocks out(nblocks());
        for (int k = 0; k < nblocks(); ++k) {
            out[k] = Matrix::Zero(problem_.block_dims[k], problem_.block_dims[k]);
        }
        return out;
    }

    Blocks identity_blocks(double scale) const {
        Blocks out(nblocks());
        for (int k = 0; k < nblocks(); ++k) {
            out[k] = scale *
                     Matrix::Identity(problem_.block_dims[k], problem_.block_dims[k]);
        }
        return out;
    }

    // Largest step alpha in (0, 1] keeping X + alpha * D positive definite.
    static double max_step(const Matrix& X, const Matrix& D, double fraction) {
        Eigen::LLT<Matrix> llt(X);
        if (llt.info() != Eigen::Success) return 0.0;
        const Matrix L = llt.matrixL();
        Matrix T = L.triangularView<Eigen::Lower>().solve(D);
        T = L.triangularView<Eigen::Lower>().solve(T.transpose()).transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (T + T.transpose()),
                                                  Eigen::EigenvaluesOnly);
        const double lam_min = eig.eigenvalues().minCoeff();
        if (lam_min >= 0.0) return 1.0;
        return std::min(1.0, -fraction / lam_min);
    }

    static double blocks_step(const Blocks& X, const Blocks& D, double fraction) {
        double alpha = 1.0;
        for (std::size_t k = 0; k < X.size(); ++k) {
            alpha = std::min(alpha, max_step(X[k], D[k], fraction));
        }
        return alpha;
    }

    const SdpProblem& problem_;
    const SdpOptions& options_;
    std::vector<int> kept_;
    Matrix Aortho_;                   // rank x N, orthonormal rows
    Matrix R_;                        // kept rows = R^T * Aortho_
    Vector bortho_;
    std::vector<Blocks> con_blocks_;  // per kept constraint, per block
    std::vector<int> svec_offsets_;
    int svec_total_ = 0;
    int total_dim_ = 0;
};

SdpSolution Workspace::run() {
    const int m = mkept();
    const int nb = nblocks();

    double data_scale = 1.0;
    for (const auto& c : problem_.objective) data_scale = std::max(data_scale, c.norm());
    data_scale = std::max(data_scale, bortho_.lpNorm<Eigen::Infinity>());

    Blocks X = identity_blocks(std::max(10.0, data_scale));
    Blocks S = identity_blocks(std::max(10.0, data_scale));
    Vector y = Vector::Zero(m);

    double norm_c = 0.0;
    for (const auto& c : problem_.objective) norm_c += c.squaredNorm();
    norm_c = std::sqrt(norm_c);
    const double norm_b = bortho_.norm();

    SdpSolution sol;
    double best_mu = std::numeric_limits<double>::infinity();
    int stall_count = 0;

    // Iterates can degrade once the achievable accuracy floor is reached
    // (degenerate optima); keep the best one seen and return that.
    Blocks bestX = X, bestS = S;
    Vector besty = y;
    double best_merit = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter <= options_.max_iterations; ++iter) {
        const Vector r_p = bortho_ - apply_A(X);
        Blocks aty = apply_At(y);
        Blocks R_d(nb);
        double rd_norm2 = 0.0;
        for (int k = 0; k < nb; ++k) {
            R_d[k] = problem_.objective[k] - S[k] - aty[k];
            rd_norm2 += R_d[k].squaredNorm();
        }
        const double pobj = inner(problem_.objective, X);
        const double dobj = bortho_.dot(y);
        const double xs = inner(X, S);
        const double mu = xs / total_dim_;

        const double pres = r_p.norm() / (1.0 + norm_b);
        const double dres = std::sqrt(rd_norm2) / (1.0 + norm_c);
        const double relgap = xs / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double merit = std::max({pres, dres, relgap});
        if (merit < best_merit) {
            best_merit = merit;
            bestX = X;
            bestS = S;
            besty = y;
            sol.iterations = iter;
            sol.primal_objective = pobj;
            sol.dual_objective = dobj;
            sol.primal_residual = pres;
            sol.dual_residual = dres;
            sol.relative_gap = relgap;
        }

        if (options_.show_progress) {
            std::fprintf(stderr,
                         "iter %3d  pobj % .9e  dobj % .9e  mu %.3e  "
                         "pres %.3e  dres %.3e\n",
                         iter, pobj, dobj, mu, pres, dres);
        }

        if (pres <= options_.feasibility_tol && dres <= options_.feasibility_tol &&
            relgap <= options_.gap_tol) {
            sol.status = SdpStatus::Optimal;
            break;
        }
        if (iter == options_.max_iterations) {
            sol.status = SdpStatus::IterationLimit;
            break;
        }

        // Unbounded dual ray => primal infeasible (Farkas certificate).
        if (dobj > 1e7 * (1.0 + std::abs(pobj)) && dobj > 0.0) {
            double lam_max = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < nb; ++k) {
                Eigen::SelfAdjointEigenSolver<Matrix> eig(aty[k], Eigen::EigenvaluesOnly);
                lam_max = std::max(lam_max, eig.eigenvalues().maxCoeff());
            }
            if (lam_max / dobj < 1e-7) {
                std::ostringstream msg;
                msg << "solve_sdp: primal infeasible (Farkas ray with b.y = " << dobj
                    << ", max eig A^T(y) = " << lam_max << ")";
                throw InfeasibleError(msg.str());
            }
        }

        if (mu > 0.999 * best_mu) {
            if (++stall_count >= 8) {
                sol.status = SdpStatus::Stalled;
                break;
            }
        } else {
            stall_count = 0;
        }
        best_mu = std::min(best_mu, mu);

        std::vector<Matrix> Sinv(nb);
        bool factor_failed = false;
        for (int k = 0; k < nb; ++k) {
            Eigen::LLT<Matrix> llt(S[k]);
            if (llt.info() != Eigen::Success) {
                factor_failed = true;
                break;
            }
            Sinv[k] = llt.solve(Matrix::Identity(S[k].rows(), S[k].cols()));
        }
        if (factor_failed) {
            sol.status = SdpStatus::Stalled;
            break;
        }

        // Schur matrix M_ij = tr(A_i X A_j S^{-1}), symmetrized.
        Matrix M(m, m);
        std::vector<Blocks> XAjSinv(m, Blocks(nb));
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < nb; ++k) {
                XAjSinv[j][k] = X[k] * con_blocks_[j][k] * Sinv[k];
            }
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) M(i, j) = inner(con_blocks_[i], XAjSinv[j]);
        }
        M = 0.5 * (M + M.transpose());
        M.diagonal().array() += 1e-14 * (1.0 + M.diagonal().maxCoeff());
        Eigen::LDLT<Matrix> Mfact(M);
        const auto solve_schur = [&](const Vector& rhs) {
            Vector dy = Mfact.solve(rhs);
            // Two rounds of iterative refinement; the Schur system turns
            // ill-conditioned near degenerate optima.
            for (int round = 0; round < 2; ++round) dy += Mfact.solve(rhs - M * dy);
            return dy;
        };

        const auto solve_direction = [&](double sigma_mu, const Blocks* correction,
                                         Blocks& dX, Vector& dy, Blocks& dS) {
            // M dy = r_p + A(X) + A((X R_d + K) S^{-1}) - sigma mu A(S^{-1})
            Blocks inner_term(nb);
            for (int k = 0; k < nb; ++k) {
                Matrix t = X[k] * R_d[k];
                if (correction) t += (*correction)[k];
                if (sigma_mu != 0.0) {
                    t -= sigma_mu * Matrix::Identity(t.rows(), t.cols());
                }
                inner_term[k] = t * Sinv[k];
            }
            const Vector rhs = r_p + apply_A(X) + apply_A(inner_term);
            dy = solve_schur(rhs);
            Blocks atdy = apply_At(dy);
            dS.resize(nb);
            dX.resize(nb);
            for (int k = 0; k < nb; ++k) {
                dS[k] = R_d[k] - atdy[k];
                Matrix t = X[k] * dS[k];
                if (correction) t += (*correction)[k];
                Matrix dx = -X[k] - t * Sinv[k];
                if (sigma_mu != 0.0) dx += sigma_mu * Sinv[k];
                dX[k] = 0.5 * (dx + dx.transpose());
            }
        };

        Blocks dX_aff, dS_aff;
        Vector dy_aff;
        solve_direction(0.0, nullptr, dX_aff, dy_aff, dS_aff);
        const double ap_aff = blocks_step(X, dX_aff, options_.step_fraction);
        const double ad_aff = blocks_step(S, dS_aff, options_.step_fraction);

        double mu_aff = 0.0;
        for (int k = 0; k < nb; ++k) {
            mu_aff += ((X[k] + ap_aff * dX_aff[k]).array() *
                       (S[k] + ad_aff * dS_aff[k]).array())
                          .sum();
        }
        mu_aff /= total_dim_;
        const double sigma =
            std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 1e-8, 0.9999);

        Blocks correction(nb);
        for (int k = 0; k < nb; ++k) correction[k] = dX_aff[k] * dS_aff[k];

        Blocks dX, dS;
        Vector dy;
        solve_direction(sigma * mu, &correction, dX, dy, dS);
        const double ap = blocks_step(X, dX, options_.step_fraction);
        const double ad = blocks_step(S, dS, options_.step_fraction);

        if (ap < 1e-10 && ad < 1e-10) {
            sol.status = SdpStatus::Stalled;
            break;
        }
        for (int k = 0; k < nb; ++k) {
            X[k] += ap * dX[k];
            S[k] += ad * dS[k];
            X[k] = 0.5 * (X[k] + X[k].transpose());
            S[k] = 0.5 * (S[k] + S[k].transpose());
        }
        y += ad * dy;
    }

    X = std::move(bestX);
    S = std::move(bestS);
    y = std::move(besty);

    // Primal polish: project X onto the affine constraint set (exact for
    // orthonormal rows), which removes the objective bias that tiny linear
    // residuals cause when the dual multipliers are large.
    {
        Vector r_p = bortho_ - apply_A(X);
        Vector delta = Aortho_.transpose() * r_p;  // svec-space correction
        for (int k = 0; k < nb; ++k) {
            const Matrix d = unsvec(delta.data() + svec_offsets_[k],
                                    problem_.block_dims[k]);
            X[k] += d;
        }
        sol.primal_objective = inner(problem_.objective, X);
        sol.primal_residual =
            (bortho_ - apply_A(X)).norm() / (1.0 + norm_b);
    }

    // Dual polish: shift y along g with A^T(g) = I so the exact slack
    // C - A^T(y) is PSD; b.y there is a genuine bound on the optimum.
    Blocks slack = apply_At(y);
    double lam_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb; ++k) {
        slack[k] = problem_.objective[k] - slack[k];
        Eigen::SelfAdjointEigenSolver<Matrix> eig(slack[k], Eigen::EigenvaluesOnly);
        lam_min = std::min(lam_min, eig.eigenvalues().minCoeff());
    }
    double certified = bortho_.dot(y);
    if (lam_min < 0.0) {
        Vector svec_id = Vector::Zero(svec_total_);
        {
            const Blocks id = identity_blocks(1.0);
            for (int k = 0; k < nb; ++k) {
                svec_accumulate(id[k], svec_id.data() + svec_offsets_[k]);
            }
        }
        const Vector g = Aortho_ * svec_id;
        if ((Aortho_.transpose() * g - svec_id).norm() <=
            1e-9 * std::sqrt(1.0 * total_dim_)) {
            y += lam_min * g;
            certified = bortho_.dot(y);
            for (int k = 0; k < nb; ++k) {
                slack[k] -= lam_min *
                            Matrix::Identity(slack[k].rows(), slack[k].cols());
            }
        }
    }

    sol.X = std::move(X);
    sol.S = std::move(slack);
    sol.certified_dual_objective = certified;
    sol.dual_objective = certified;
    sol.gap = std::abs(sol.primal_objective - certified);

    // Map the multipliers back to the original row basis.
    const Vector y_kept = R_.triangularView<Eigen::Upper>().solve(y);
    Vector y_full = Vector::Zero(problem_.constraints.size());
    for (int i = 0; i < m; ++i) y_full[kept_[i]] = y_kept[i];
    sol.y = std::move(y_full);
    return sol;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
    Workspace ws(problem, options);
    return ws.run();
}

}  // namespace qbound
