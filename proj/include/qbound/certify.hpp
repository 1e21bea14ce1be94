// Min-entropy certification for the two-preparation bounded-overlap
// scenario: planar ternary POVM parametrization and closure, honest
// statistics, the guessing-probability semidefinite program, heuristic
// entropy maximization, and entropy-versus-overlap curves.
//
// The two pure qubit preparations sit at (+-sin theta, 0, cos theta) with
// theta = arccos(delta), so their overlap is exactly delta.  Measurement
// Bloch vectors are planar, u_b = (sin theta_b, 0, cos theta_b), with
// angles measured from the states' symmetry axis.
//
// Adversary model (classical side information): the unknown measurement is
// decomposed into three guess-labeled subnormalized branches N_b^e >= 0
// with sum_b N_b^e = t_e I, sum_e t_e = 1, constrained to reproduce the
// full observed table p(b|x) on the honest preparation pair; the guessing
// probability maximizes sum_e tr(rho_x* N_e^e).  All operators are real
// symmetric (states, constraints, and objective are invariant under
// conjugation in this basis).

#pragma once

#include "qbound/bloch.hpp"
#include "qbound/common.hpp"
#include "qbound/neldermead.hpp"
#include "qbound/povm.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qbound {

struct OverlapScenario {
    double delta = 0.0;
    QuditState state0;
    QuditState state1;
    int guess_input = 0;  // x*

    const QuditState& guess_state() const { return guess_input == 0 ? state0 : state1; }
};

OverlapScenario make_overlap_scenario(double delta, int guess_input = 0);

struct TernaryParams {
    double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;

    Povm to_povm() const;
};

// Completes (theta1, theta2, lambda1) to a valid ternary POVM from
// sum lambda_b = 2 and sum lambda_b u_b = 0.  The closure equation
// |lambda1 u1 + lambda2 u2|^2 = (2 - lambda1 - lambda2)^2 is linear in
// lambda2 after cancellation; the antipodal degenerate case (both sides
// identical for every lambda2) assigns all remaining weight to lambda2.
// lambda3 = 0 yields a valid binary POVM with a zero-weight third outcome.
TernaryParams close_ternary(double theta1, double theta2, double lambda1);

// The printed rational fit for the optimal symmetric weight.
double paper_lambda_fit(double delta);

// Reported optimal parametrization: theta1 = 0, lambda2 = lambda3 = lambda
// from the fit, lambda1 = 2(1 - lambda), theta2 = -theta3 = beta with
// cos beta = 1 - 1/lambda (the closure-consistent reflection of the printed
// arccos(1/lambda - 1), which does not satisfy the closure conditions).
TernaryParams paper_params(double delta);

// p(b|x) for b in {0,1,2} (rows) and x in {0,1} (columns).
using StatsTable = Eigen::Matrix<double, 3, 2>;

StatsTable honest_statistics(const TernaryParams& params, const OverlapScenario& scenario);

struct GuessingResult {
    double p_guess = 0.0;  // certified (dual-side) optimum
    double dual_gap = 0.0; // |primal - certified dual|
    std::array<std::array<Matrix, 3>, 3> branches;  // branches[e][b] = N_b^e
    Vector branch_weights;                          // t_e
    int iterations = 0;
};

// Solves the guessing-probability SDP to relative accuracy 1e-7 with a dual
// certificate; throws InfeasibleError when no measurement reproduces the
// statistics at this overlap, SolverError when accuracy is not reached.
GuessingResult guessing_probability(const StatsTable& stats, const OverlapScenario& scenario);

struct CertifyConfig {
    int restarts = 20;      // random restarts, plus one seeded at paper_params
    unsigned seed = 42;
    int guess_input = 0;
    // Restrict the search to the symmetric ansatz theta1 = 0,
    // theta2 = -theta3, lambda2 = lambda3 (one free angle).
    bool symmetric_ansatz = false;
    // Additional warm starts tried after the paper-initialized one
    // (e.g. the previous grid point's optimum when sweeping a curve).
    std::vector<TernaryParams> extra_starts;
    NelderMeadOptions nm_options{};
};

struct CertificationResult {
    double delta = 0.0;
    double p_guess = 0.0;
    double h_min = 0.0;
    TernaryParams params;
    StatsTable statistics;
    double dual_gap = 0.0;
    int solver_iterations = 0;
    int restart_best = -1;  // 0 = paper-initialized restart, 1..R = random
};

// Maximizes H_min over the free parameters by Nelder-Mead restarts;
// deterministic for a fixed seed.  delta must lie in [0, 1) -- the program
// value is discontinuous at delta = 1.
CertificationResult optimize_entropy(double delta, const CertifyConfig& config = {});

// Evaluates one fixed parametrization (no optimization).
CertificationResult certify_with_params(const TernaryParams& params, double delta,
                                        int guess_input = 0);

struct CurvePoint {
    double delta = 0.0;
    std::optional<CertificationResult> result;
    std::string error;  // set when this grid point failed
};

// One optimization per grid value (ordered as given); per-point failures are
// recorded and the curve continues.
std::vector<CurvePoint> entropy_curve(const std::vector<double>& delta_grid,
                                      const CertifyConfig& config = {});

}  // namespace qbound
