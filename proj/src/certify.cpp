#include "qbound/certify.hpp"

#include "qbound/bounds.hpp"
#include "qbound/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qbound {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector planar_bloch(double theta) {
    Vector v(3);
    v << std::sin(theta), 0.0, std::cos(theta);
    return v;
}

}  // namespace

OverlapScenario make_overlap_scenario(double delta, int guess_input) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw DomainError("make_overlap_scenario: delta must lie in [0, 1]");
    }
    if (guess_input != 0 && guess_input != 1) {
        throw DomainError("make_overlap_scenario: guess input must be 0 or 1");
    }
    const double theta = bloch_angle_from_overlap(delta);
    OverlapScenario s;
    s.delta = delta;
    s.state0 = state_from_bloch(2, planar_bloch(theta));
    s.state1 = state_from_bloch(2, planar_bloch(-theta));
    s.guess_input = guess_input;
    // overlap^2 = (1 + n0.n1)/2
    const double overlap_sq = 0.5 * (1.0 + s.state0.bloch.dot(s.state1.bloch));
    if (std::abs(overlap_sq - delta * delta) > 1e-9) {
        throw InternalError("make_overlap_scenario: overlap check failed");
    }
    return s;
}

Povm TernaryParams::to_povm() const {
    Povm povm;
    povm.dim = 2;
    const double thetas[3] = {theta1, theta2, theta3};
    const double lambdas[3] = {lambda1, lambda2, lambda3};
    for (int b = 0; b < 3; ++b) {
        if (lambdas[b] > kDefaultTol) {
            povm.elements.push_back({lambdas[b], planar_bloch(thetas[b])});
        } else {
            povm.elements.push_back({0.0, Vector::Zero(3)});
        }
    }
    return povm;
}

TernaryParams close_ternary(double theta1, double theta2, double lambda1) {
    if (!(lambda1 >= 0.0 && lambda1 <= 2.0)) {
        throw DomainError("close_ternary: lambda1 must lie in [0, 2]");
    }
    const double c12 = std::cos(theta1 - theta2);
    // |l1 u1 + l2 u2|^2 = (2 - l1 - l2)^2 collapses to a linear equation:
    // lambda2 (2 + lambda1 (c12 - 1)) = 2 (1 - lambda1).
    const double denom = 2.0 + lambda1 * (c12 - 1.0);
    const double numer = 2.0 * (1.0 - lambda1);

    double lambda2;
    if (std::abs(denom) <= 1e-12) {
        if (std::abs(numer) > 1e-12) {
            throw InfeasibleError("close_ternary: no nonnegative closure exists");
        }
        // Antipodal pair with lambda1 = 1: any split closes; put the
        // remaining weight on outcome 2.
        lambda2 = 2.0 - lambda1;
    } else {
        lambda2 = numer / denom;
    }
    if (lambda2 < -kDefaultTol) {
        throw InfeasibleError("close_ternary: closure requires lambda2 < 0");
    }
    lambda2 = std::max(lambda2, 0.0);
    double lambda3 = 2.0 - lambda1 - lambda2;
    if (lambda3 < -kDefaultTol) {
        throw InfeasibleError("close_ternary: closure requires lambda3 < 0");
    }
    lambda3 = std::max(lambda3, 0.0);

    TernaryParams params;
    params.theta1 = theta1;
    params.theta2 = theta2;
    params.lambda1 = lambda1;
    params.lambda2 = lambda2;
    params.lambda3 = lambda3;

    const Vector w = lambda1 * planar_bloch(theta1) + lambda2 * planar_bloch(theta2);
    if (lambda3 > kDefaultTol) {
        if (std::abs(w.norm() - lambda3) > 1e-8) {
            throw InfeasibleError("close_ternary: no unit third vector closes the POVM");
        }
        const Vector u3 = -w / lambda3;
        params.theta3 = std::atan2(u3[0], u3[2]);
    } else {
        if (w.norm() > 1e-8) {
            throw InfeasibleError("close_ternary: residual vector with lambda3 = 0");
        }
        params.theta3 = 0.0;
    }
    require_valid(params.to_povm());
    return params;
}

double paper_lambda_fit(double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw DomainError("paper_lambda_fit: delta must lie in [0, 1]");
    }
    const double d2 = delta * delta;
    const double d3 = d2 * delta;
    return (0.7323 * d3 - 6.077 * d2 + 4.017 * delta + 5.742) /
           (d3 - 7.645 * d2 + 4.903 * delta + 7.147);
}

TernaryParams paper_params(double delta) {
    const double lambda = paper_lambda_fit(delta);
    const double beta = std::acos(1.0 - 1.0 / lambda);
    TernaryParams params;
    params.theta1 = 0.0;
    params.theta2 = beta;
    params.theta3 = -beta;
    params.lambda1 = 2.0 * (1.0 - lambda);
    params.lambda2 = lambda;
    params.lambda3 = lambda;
    require_valid(params.to_povm());
    return params;
}

StatsTable honest_statistics(const TernaryParams& params, const OverlapScenario& scenario) {
    const Povm povm = params.to_povm();
    require_valid(povm);
    StatsTable stats;
    for (int b = 0; b < 3; ++b) {
        stats(b, 0) = outcome_probability(povm, scenario.state0, b);
        stats(b, 1) = outcome_probability(povm, scenario.state1, b);
    }
    return stats;
}

namespace {

Matrix real_state_matrix(const QuditState& state) {
    // xz-plane qubit state as a real symmetric 2x2 matrix.
    const double nx = state.bloch[0];
    const double nz = state.bloch[2];
    Matrix rho(2, 2);
    rho << 0.5 * (1.0 + nz), 0.5 * nx, 0.5 * nx, 0.5 * (1.0 - nz);
    return rho;
}

}  // namespace

GuessingResult guessing_probability(const StatsTable& stats, const OverlapScenario& scenario) {
    for (int x = 0; x < 2; ++x) {
        if (std::abs(stats.col(x).sum() - 1.0) > 1e-8) {
            throw DomainError("guessing_probability: statistics columns must sum to 1");
        }
        for (int b = 0; b < 3; ++b) {
            if (stats(b, x) < -kDefaultTol || stats(b, x) > 1.0 + kDefaultTol) {
                throw DomainError("guessing_probability: probabilities outside [0, 1]");
            }
        }
    }

    const Matrix rho[2] = {real_state_matrix(scenario.state0),
                           real_state_matrix(scenario.state1)};
    const Matrix& rho_star = rho[scenario.guess_input];
    Matrix sigma_x(2, 2), sigma_z(2, 2);
    sigma_x << 0, 1, 1, 0;
    sigma_z << 1, 0, 0, -1;
    const Matrix eye = Matrix::Identity(2, 2);

    const auto blk = [](int e, int b) { return 3 * e + b; };

    SdpProblem problem;
    problem.block_dims.assign(9, 2);
    problem.objective.assign(9, Matrix::Zero(2, 2));
    for (int e = 0; e < 3; ++e) problem.objective[blk(e, e)] = -rho_star;

    std::vector<double> rhs;
    // Branch completeness: sum_b N_b^e proportional to the identity.
    for (int e = 0; e < 3; ++e) {
        SdpConstraint off, diag;
        for (int b = 0; b < 3; ++b) {
            off.terms.push_back({blk(e, b), sigma_x});
            diag.terms.push_back({blk(e, b), sigma_z});
        }
        problem.constraints.push_back(std::move(off));
        rhs.push_back(0.0);
        problem.constraints.push_back(std::move(diag));
        rhs.push_back(0.0);
    }
    // Observed statistics.
    for (int b = 0; b < 3; ++b) {
        for (int x = 0; x < 2; ++x) {
            SdpConstraint con;
            for (int e = 0; e < 3; ++e) con.terms.push_back({blk(e, b), rho[x]});
            problem.constraints.push_back(std::move(con));
            rhs.push_back(std::max(stats(b, x), 0.0));
        }
    }
    // Normalization sum_e t_e = 1, i.e. total trace 2.
    {
        SdpConstraint con;
        for (int k = 0; k < 9; ++k) con.terms.push_back({k, eye});
        problem.constraints.push_back(std::move(con));
        rhs.push_back(2.0);
    }
    problem.rhs = Eigen::Map<Vector>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

    SdpSolution sol = solve_sdp(problem);
    const bool accurate = sol.gap <= 5e-7 * (1.0 + std::abs(sol.primal_objective)) &&
                          sol.primal_residual <= 1e-7 && sol.dual_residual <= 1e-7;
    if (!accurate) {
        std::ostringstream msg;
        msg << "guessing_probability: solver accuracy not reached (gap " << sol.gap
            << ", primal residual " << sol.primal_residual << ", dual residual "
            << sol.dual_residual << ")";
        throw SolverError(msg.str());
    }

    GuessingResult result;
    result.p_guess = -sol.certified_dual_objective;
    result.dual_gap = sol.gap;
    result.iterations = sol.iterations;
    result.branch_weights = Vector::Zero(3);
    for (int e = 0; e < 3; ++e) {
        for (int b = 0; b < 3; ++b) {
            result.branches[e][b] = sol.X[blk(e, b)];
            result.branch_weights[e] += 0.5 * sol.X[blk(e, b)].trace();
        }
    }
    return result;
}

namespace {

CertificationResult evaluate_params(const TernaryParams& params,
                                    const OverlapScenario& scenario) {
    CertificationResult result;
    result.delta = scenario.delta;
    result.params = params;
    result.statistics = honest_statistics(params, scenario);
    const GuessingResult guess = guessing_probability(result.statistics, scenario);
    result.p_guess = guess.p_guess;
    result.h_min = std::max(0.0, -std::log2(guess.p_guess));
    result.dual_gap = guess.dual_gap;
    result.solver_iterations = guess.iterations;

    const double max_honest = result.statistics.col(scenario.guess_input).maxCoeff();
    if (result.p_guess < max_honest - 1e-8) {
        throw SolverError("certify: p_guess fell below the honest single-outcome bound");
    }
    if (result.h_min > pm_bound({2, 1, 3}) + 1e-6) {
        throw SolverError("certify: certified entropy exceeds the closed-form bound");
    }
    return result;
}

}  // namespace

CertificationResult certify_with_params(const TernaryParams& params, double delta,
                                        int guess_input) {
    return evaluate_params(params, make_overlap_scenario(delta, guess_input));
}

CertificationResult optimize_entropy(double delta, const CertifyConfig& config) {
    if (!(delta >= 0.0 && delta < 1.0)) {
        throw DomainError("optimize_entropy: delta must lie in [0, 1)");
    }
    if (config.restarts < 1) {
        throw DomainError("optimize_entropy: at least one restart is required");
    }
    const OverlapScenario scenario = make_overlap_scenario(delta, config.guess_input);

    // Objective: log2(p_guess), minimized.  Infeasible parameters and solver
    // hiccups simply reject the point.
    const auto params_of = [&](const Vector& x) -> TernaryParams {
        if (config.symmetric_ansatz) {
            const double beta = x[0];
            if (beta < 0.5 * kPi || beta > kPi) {
                throw InfeasibleError("outside symmetric box");
            }
            const double lambda1 = 2.0 - 2.0 / (1.0 - std::cos(beta));
            return close_ternary(0.0, beta, std::clamp(lambda1, 0.0, 2.0));
        }
        if (std::abs(x[0]) > kPi || std::abs(x[1]) > kPi || x[2] < 0.0 || x[2] > 2.0) {
            throw InfeasibleError("outside parameter box");
        }
        return close_ternary(x[0], x[1], x[2]);
    };
    const auto objective = [&](const Vector& x) -> double {
        try {
            const TernaryParams params = params_of(x);
            const StatsTable stats = honest_statistics(params, scenario);
            return std::log2(guessing_probability(stats, scenario).p_guess);
        } catch (const InfeasibleError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const SolverError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // Draw all restart starts up front so the sequence depends only on the
    // seed: paper-initialized first, then warm starts, then random ones.
    std::mt19937 rng(config.seed);
    std::vector<Vector> starts;
    {
        const TernaryParams paper = paper_params(delta);
        if (config.symmetric_ansatz) {
            Vector s(1);
            s << std::clamp(paper.theta2, 0.5 * kPi, kPi);
            starts.push_back(s);
            for (const TernaryParams& warm : config.extra_starts) {
                Vector v(1);
                v << std::clamp(std::abs(warm.theta2), 0.5 * kPi, kPi);
                starts.push_back(v);
            }
            std::uniform_real_distribution<double> beta_dist(0.5 * kPi, kPi);
            for (int r = 0; r < config.restarts; ++r) {
                Vector v(1);
                v << beta_dist(rng);
                starts.push_back(v);
            }
        } else {
            Vector s(3);
            s << paper.theta1, paper.theta2, paper.lambda1;
            starts.push_back(s);
            for (const TernaryParams& warm : config.extra_starts) {
                Vector v(3);
                v << std::clamp(warm.theta1, -kPi, kPi),
                    std::clamp(warm.theta2, -kPi, kPi),
                    std::clamp(warm.lambda1, 0.0, 2.0);
                starts.push_back(v);
            }
            std::uniform_real_distribution<double> angle_dist(-kPi, kPi);
            std::uniform_real_distribution<double> weight_dist(0.0, 2.0);
            for (int r = 0; r < config.restarts; ++r) {
                Vector v(3);
                v << angle_dist(rng), angle_dist(rng), weight_dist(rng);
                starts.push_back(v);
            }
        }
    }

    const Vector step = config.symmetric_ansatz
                            ? (Vector(1) << 0.2).finished()
                            : (Vector(3) << 0.3, 0.3, 0.2).finished();
    double best_value = std::numeric_limits<double>::infinity();
    Vector best_x;
    int best_restart = -1;
    for (std::size_t r = 0; r < starts.size(); ++r) {
        const NelderMeadResult nm =
            nelder_mead(objective, starts[r], step, config.nm_options);
        if (nm.value < best_value) {
            best_value = nm.value;
            best_x = nm.x;
            best_restart = static_cast<int>(r);
        }
    }
    if (!std::isfinite(best_value)) {
        throw OptimizationError("optimize_entropy: every restart was infeasible");
    }

    CertificationResult result = evaluate_params(params_of(best_x), scenario);
    result.restart_best = best_restart;
    return result;
}

std::vector<CurvePoint> entropy_curve(const std::vector<double>& delta_grid,
                                      const CertifyConfig& config) {
    std::vector<double> grid = delta_grid;
    std::sort(grid.begin(), grid.end());  // results are reported in delta order
    std::vector<CurvePoint> curve;
    curve.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CurvePoint point;
        point.delta = grid[i];
        CertifyConfig local = config;
        // Grid points are independent tasks; give each its own seed stream.
        local.seed = config.seed + 1000003u * static_cast<unsigned>(i);
        try {
            point.result = optimize_entropy(grid[i], local);
        } catch (const Error& err) {
            point.error = err.what();
        }
        curve.push_back(std::move(point));
    }
    return curve;
}

}  // namespace qbound
