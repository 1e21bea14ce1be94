// qbound command line: POVM validation and extremal decomposition, the
// closed-form randomness bounds, and min-entropy certification for the
// two-preparation bounded-overlap scenario.
//
// Exit codes: 0 success, 1 validation/domain failure, 2 solver/infeasibility
// failure.

#include "qbound/bounds.hpp"
#include "qbound/certify.hpp"
#include "qbound/decompose.hpp"
#include "qbound/io.hpp"
#include "qbound/povm.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace qbound;

std::string format_fixed12(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12f", value);
    return buf;
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
    } else {
        save_text_file(output_path, text);
    }
}

unsigned resolve_seed(unsigned cli_seed) {
    // QBOUND_SEED wins over --seed when set.
    if (const char* env = std::getenv("QBOUND_SEED")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (...) {
            throw DomainError("QBOUND_SEED is not a valid unsigned integer");
        }
    }
    return cli_seed;
}

int run(int argc, char** argv) {
    CLI::App app{"Randomness bounds and POVM decomposition toolbox"};
    app.require_subcommand(1);
    // Global options (--seed, --restarts, --tolerance) may follow the
    // subcommand name.
    app.fallthrough();

    double tolerance = kDefaultTol;
    unsigned seed = 42;
    int restarts = 20;
    app.add_option("--tolerance", tolerance, "Validation tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", seed, "Optimizer seed (QBOUND_SEED overrides)")
        ->capture_default_str();
    app.add_option("--restarts", restarts, "Random optimizer restarts")
        ->check(CLI::Range(1, 10000))
        ->capture_default_str();

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Check a POVM file");
    std::string validate_path;
    bool validate_json = false;
    validate_cmd->add_option("povm", validate_path, "POVM JSON file")->required();
    validate_cmd->add_flag("--json", validate_json, "Emit the report as JSON");

    // decompose
    auto* decompose_cmd =
        app.add_subcommand("decompose", "Decompose a rank-1 POVM into extremals");
    std::string decompose_path, span_path, decompose_out;
    decompose_cmd->add_option("povm", decompose_path, "POVM JSON file")->required();
    decompose_cmd->add_option("--span", span_path,
                              "States JSON fixing the Bloch span");
    decompose_cmd->add_option("-o,--output", decompose_out, "Output JSON path");

    // bound pm / bound bell
    auto* bound_cmd = app.add_subcommand("bound", "Closed-form randomness bounds");
    bound_cmd->require_subcommand(1);
    auto* pm_cmd = bound_cmd->add_subcommand("pm", "Prepare-and-measure bound");
    int pm_k = 0, pm_l = 0, pm_m = 1;
    pm_cmd->add_option("--k", pm_k, "Number of preparations")->required();
    pm_cmd->add_option("--l", pm_l, "Number of outcomes")->required();
    pm_cmd->add_option("--m", pm_m, "Number of measurements (does not affect the bound)");
    auto* bell_cmd = bound_cmd->add_subcommand("bell", "Bell-scenario bound for Bob");
    int bell_nx = 0, bell_na = 0, bell_nb = 0;
    bell_cmd->add_option("--nx", bell_nx, "Alice inputs")->required();
    bell_cmd->add_option("--na", bell_na, "Alice outputs")->required();
    bell_cmd->add_option("--nb", bell_nb, "Bob outputs")->required();

    // certify
    auto* certify_cmd =
        app.add_subcommand("certify", "Certify min-entropy at one overlap");
    double certify_delta = 0.0;
    std::string certify_params = "auto";
    std::string certify_stats;
    int guess_input = 0;
    bool symmetric = false;
    certify_cmd->add_option("--delta", certify_delta, "Overlap bound")->required();
    certify_cmd->add_option("--params", certify_params,
                            "auto | paper | parameter JSON file");
    certify_cmd->add_option("--stats", certify_stats,
                            "Statistics JSON; solve the SDP for a raw p(b|x) table");
    certify_cmd->add_option("--guess-input", guess_input, "Guessed input x*")
        ->check(CLI::Range(0, 1));
    certify_cmd->add_flag("--symmetric", symmetric,
                          "Optimize within the symmetric ansatz");

    // curve
    auto* curve_cmd = app.add_subcommand("curve", "Entropy curve over an overlap grid");
    double delta_min = 0.0, delta_max = 0.0;
    int steps = 0;
    std::string curve_out;
    bool curve_symmetric = false;
    curve_cmd->add_option("--delta-min", delta_min, "First grid value")->required();
    curve_cmd->add_option("--delta-max", delta_max, "Last grid value")->required();
    curve_cmd->add_option("--steps", steps, "Number of grid points")
        ->required()
        ->check(CLI::Range(1, 100000));
    curve_cmd->add_option("-o,--output", curve_out, "Output CSV path")->required();
    curve_cmd->add_flag("--symmetric", curve_symmetric,
                        "Optimize within the symmetric ansatz");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*validate_cmd) {
        const Povm povm = povm_from_json(load_json_file(validate_path));
        const ValidationReport report = validate(povm, tolerance);
        if (validate_json) {
            std::cout << validation_report_to_json(report).dump(2) << '\n';
        } else if (report.ok()) {
            std::cout << "valid\n";
        } else {
            for (const auto& v : report.violations) {
                std::cout << "violated: " << v.condition << " (residual "
                          << format_sig(v.residual) << ")\n";
            }
        }
        return report.ok() ? 0 : 1;
    }

    if (*decompose_cmd) {
        const Povm povm = povm_from_json(load_json_file(decompose_path));
        std::vector<QuditState> states;
        if (!span_path.empty()) states = states_from_json(load_json_file(span_path));
        const ConvexDecomposition dec = decompose_extremal(povm, states);
        emit(decomposition_to_json(povm, dec).dump(2), decompose_out);
        return 0;
    }

    if (*pm_cmd) {
        std::cout << format_fixed12(pm_bound({pm_k, pm_m, pm_l})) << '\n';
        return 0;
    }
    if (*bell_cmd) {
        std::cout << format_fixed12(bell_bound({bell_nx, bell_na, bell_nb})) << '\n';
        return 0;
    }

    if (*certify_cmd) {
        CertificationResult result;
        if (!certify_stats.empty()) {
            const StatsTable stats = stats_from_json(load_json_file(certify_stats));
            const OverlapScenario scenario =
                make_overlap_scenario(certify_delta, guess_input);
            const GuessingResult guess = guessing_probability(stats, scenario);
            result.delta = certify_delta;
            result.p_guess = guess.p_guess;
            result.h_min = std::max(0.0, -std::log2(guess.p_guess));
            result.statistics = stats;
            result.dual_gap = guess.dual_gap;
            result.solver_iterations = guess.iterations;
        } else if (certify_params == "auto") {
            CertifyConfig config;
            config.restarts = restarts;
            config.seed = resolve_seed(seed);
            config.guess_input = guess_input;
            config.symmetric_ansatz = symmetric;
            result = optimize_entropy(certify_delta, config);
        } else if (certify_params == "paper") {
            result = certify_with_params(paper_params(certify_delta), certify_delta,
                                         guess_input);
        } else {
            const Json pj = load_json_file(certify_params);
            const TernaryParams params =
                close_ternary(pj.at("theta1").get<double>(),
                              pj.at("theta2").get<double>(),
                              pj.at("lambda1").get<double>());
            result = certify_with_params(params, certify_delta, guess_input);
        }
        std::cout << certification_to_json(result).dump(2) << '\n';
        return 0;
    }

    if (*curve_cmd) {
        if (!(delta_min >= 0.0 && delta_max < 1.0 && delta_min <= delta_max)) {
            throw DomainError("curve: grid must satisfy 0 <= delta-min <= delta-max < 1");
        }
        std::vector<double> grid;
        for (int i = 0; i < steps; ++i) {
            grid.push_back(steps == 1 ? delta_min
                                      : delta_min + (delta_max - delta_min) * i /
                                            static_cast<double>(steps - 1));
        }
        CertifyConfig config;
        config.restarts = restarts;
        config.seed = resolve_seed(seed);
        config.guess_input = guess_input;
        config.symmetric_ansatz = curve_symmetric;
        const std::vector<CurvePoint> curve = entropy_curve(grid, config);
        for (const CurvePoint& point : curve) {
            if (!point.result) {
                std::cerr << "warning: delta " << format_sig(point.delta)
                          << " failed: " << point.error << '\n';
            }
        }
        save_text_file(curve_out, curve_to_csv(curve));
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const qbound::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const qbound::SolverError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const qbound::OptimizationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const qbound::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
