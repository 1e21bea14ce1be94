#include "qbound/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qbound {

std::string format_sig(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

double round_sig(double value) { return std::stod(format_sig(value)); }

namespace {

Json vector_to_json(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(round_sig(v[i]));
    return arr;
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw ValidationError("expected a numeric array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

ComplexMatrix matrix_from_json(const Json& j, int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim) {
        throw ValidationError("matrix must have d rows");
    }
    ComplexMatrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const Json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
            throw ValidationError("matrix must have d columns per row");
        }
        for (int c = 0; c < dim; ++c) {
            const Json& entry = row[c];
            if (!entry.is_array() || entry.size() != 2) {
                throw ValidationError("matrix entries must be [re, im] pairs");
            }
            m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

}  // namespace

Json povm_to_json(const Povm& povm) {
    Json j;
    j["dim"] = povm.dim;
    Json elements = Json::array();
    for (const auto& el : povm.elements) {
        elements.push_back({{"weight", round_sig(el.weight)}, {"bloch", vector_to_json(el.bloch)}});
    }
    j["elements"] = std::move(elements);
    return j;
}

Povm povm_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dim")) {
        throw ValidationError("POVM JSON must be an object with a \"dim\" field");
    }
    const int dim = j.at("dim").get<int>();
    if (dim < 2) throw ValidationError("POVM JSON: dim must be >= 2");
    const bool has_elements = j.contains("elements");
    const bool has_matrices = j.contains("matrices");
    if (has_elements == has_matrices) {
        throw ValidationError("POVM JSON must have exactly one of \"elements\"/\"matrices\"");
    }

    if (has_matrices) {
        std::vector<ComplexMatrix> matrices;
        for (const Json& mj : j.at("matrices")) matrices.push_back(matrix_from_json(mj, dim));
        return from_matrices(matrices);
    }

    Povm povm;
    povm.dim = dim;
    const int n = dim * dim - 1;
    for (const Json& ej : j.at("elements")) {
        if (!ej.contains("weight") || !ej.contains("bloch")) {
            throw ValidationError("POVM element needs \"weight\" and \"bloch\"");
        }
        PovmElement el;
        el.weight = ej.at("weight").get<double>();
        el.bloch = vector_from_json(ej.at("bloch"));
        if (el.bloch.size() != n) {
            throw ValidationError("POVM element bloch vector must have length d^2 - 1");
        }
        povm.elements.push_back(std::move(el));
    }
    return povm;
}

std::vector<QuditState> states_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("states")) {
        throw ValidationError("states JSON must carry \"dim\" and \"states\"");
    }
    const int dim = j.at("dim").get<int>();
    std::vector<QuditState> out;
    for (const Json& sj : j.at("states")) {
        out.push_back(state_from_bloch(dim, vector_from_json(sj.at("bloch"))));
    }
    if (out.empty()) throw ValidationError("states JSON: empty state list");
    return out;
}

StatsTable stats_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("p")) {
        throw ValidationError("statistics JSON must carry a \"p\" table");
    }
    const Json& table = j.at("p");
    if (!table.is_array() || table.size() != 3) {
        throw ValidationError("statistics table must have 3 outcome rows");
    }
    StatsTable stats;
    for (int b = 0; b < 3; ++b) {
        const Json& row = table[b];
        if (!row.is_array() || row.size() != 2) {
            throw ValidationError("statistics rows must be [p(b|0), p(b|1)]");
        }
        stats(b, 0) = row[0].get<double>();
        stats(b, 1) = row[1].get<double>();
    }
    return stats;
}

Json decomposition_to_json(const Povm& parent, const ConvexDecomposition& dec) {
    Json j;
    Json weights = Json::array();
    for (double w : dec.weights) weights.push_back(round_sig(w));
    j["weights"] = std::move(weights);
    Json branches = Json::array();
    Json counts = Json::array();
    for (const Povm& branch : dec.branches) {
        branches.push_back(povm_to_json(branch));
        counts.push_back(branch.nonzero_outcomes());
    }
    j["branches"] = std::move(branches);
    j["leaf_outcome_counts"] = std::move(counts);
    j["residual"] = round_sig(recombination_residual(parent, dec));
    return j;
}

Json validation_report_to_json(const ValidationReport& report) {
    Json j;
    j["valid"] = report.ok();
    j["max_residual"] = round_sig(report.max_residual);
    Json violations = Json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"condition", v.condition}, {"residual", round_sig(v.residual)}});
    }
    j["violations"] = std::move(violations);
    return j;
}

Json certification_to_json(const CertificationResult& result) {
    Json j;
    j["delta"] = round_sig(result.delta);
    j["p_guess"] = round_sig(result.p_guess);
    j["h_min"] = round_sig(result.h_min);
    j["params"] = {{"theta1", round_sig(result.params.theta1)},
                   {"theta2", round_sig(result.params.theta2)},
                   {"theta3", round_sig(result.params.theta3)},
                   {"lambda1", round_sig(result.params.lambda1)},
                   {"lambda2", round_sig(result.params.lambda2)},
                   {"lambda3", round_sig(result.params.lambda3)}};
    Json table = Json::array();
    for (int b = 0; b < 3; ++b) {
        table.push_back({round_sig(result.statistics(b, 0)), round_sig(result.statistics(b, 1))});
    }
    j["statistics"] = std::move(table);
    j["dual_gap"] = round_sig(result.dual_gap);
    j["solver_iterations"] = result.solver_iterations;
    j["restart_best"] = result.restart_best;
    return j;
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream out;
    out << "delta,p_guess,h_min,theta1,theta2,lambda1,dual_gap,restart_best\n";
    for (const CurvePoint& point : curve) {
        if (!point.result) continue;
        const CertificationResult& r = *point.result;
        out << format_sig(r.delta) << ',' << format_sig(r.p_guess) << ','
            << format_sig(r.h_min) << ',' << format_sig(r.params.theta1) << ','
            << format_sig(r.params.theta2) << ',' << format_sig(r.params.lambda1) << ','
            << format_sig(r.dual_gap) << ',' << r.restart_best << '\n';
    }
    return out.str();
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& err) {
        throw ValidationError("malformed JSON in " + path + ": " + err.what());
    }
}

void save_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

}  // namespace qbound
