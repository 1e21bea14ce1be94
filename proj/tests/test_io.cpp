#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qbound/decompose.hpp"
#include "qbound/io.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace qbound;

namespace {

Povm trine() {
    Povm povm;
    povm.dim = 2;
    const double deg = M_PI / 180.0;
    for (double angle : {90.0, 210.0, 330.0}) {
        Vector v(3);
        v << std::cos(angle * deg), std::sin(angle * deg), 0.0;
        povm.elements.push_back({2.0 / 3.0, v});
    }
    return povm;
}

}  // namespace

TEST_CASE("format_sig: 12 significant digits") {
    CHECK(format_sig(std::log2(3.0)) == "1.58496250072");
    CHECK(format_sig(0.5) == "0.5");
    CHECK(format_sig(1e-10) == "1e-10");
    CHECK(round_sig(std::log2(3.0)) == 1.58496250072);
}

TEST_CASE("povm json: elements round trip") {
    const Json j = povm_to_json(trine());
    CHECK(j.at("dim") == 2);
    const Povm back = povm_from_json(j);
    REQUIRE(back.outcomes() == 3);
    for (int b = 0; b < 3; ++b) {
        CHECK(back.elements[b].weight ==
              doctest::Approx(2.0 / 3.0).epsilon(1e-11));
        CHECK((back.elements[b].bloch - trine().elements[b].bloch).norm() < 1e-11);
    }
}

TEST_CASE("povm json: matrices form goes through from_matrices") {
    Json j;
    j["dim"] = 2;
    Json matrices = Json::array();
    for (const ComplexMatrix& m : to_matrices(trine())) {
        Json rows = Json::array();
        for (int r = 0; r < 2; ++r) {
            Json row = Json::array();
            for (int c = 0; c < 2; ++c) {
                row.push_back({m(r, c).real(), m(r, c).imag()});
            }
            rows.push_back(std::move(row));
        }
        matrices.push_back(std::move(rows));
    }
    j["matrices"] = std::move(matrices);
    const Povm back = povm_from_json(j);
    CHECK(validate(back).ok());
    CHECK(back.nonzero_outcomes() == 3);
}

TEST_CASE("povm json: schema violations") {
    CHECK_THROWS_AS(povm_from_json(Json::parse(R"({"dim": 2})")), ValidationError);
    CHECK_THROWS_AS(
        povm_from_json(Json::parse(
            R"({"dim": 2, "elements": [], "matrices": []})")),
        ValidationError);
    CHECK_THROWS_AS(
        povm_from_json(Json::parse(
            R"({"dim": 2, "elements": [{"weight": 1.0, "bloch": [0, 0]}]})")),
        ValidationError);
    CHECK_THROWS_AS(povm_from_json(Json::parse(R"({"dim": 1, "elements": []})")),
                    ValidationError);
}

TEST_CASE("states and stats json") {
    const Json sj = Json::parse(
        R"({"dim": 2, "states": [{"bloch": [0, 0, 1]}, {"bloch": [1, 0, 0]}]})");
    const auto states = states_from_json(sj);
    REQUIRE(states.size() == 2);
    CHECK(states[0].pure);
    CHECK(states[1].bloch[0] == 1.0);
    CHECK_THROWS_AS(states_from_json(Json::parse(R"({"dim": 2, "states": []})")),
                    ValidationError);

    const Json tj = Json::parse(
        R"({"p": [[0.5, 0.2], [0.3, 0.3], [0.2, 0.5]]})");
    const StatsTable stats = stats_from_json(tj);
    CHECK(stats(0, 0) == 0.5);
    CHECK(stats(2, 1) == 0.5);
    CHECK_THROWS_AS(stats_from_json(Json::parse(R"({"p": [[0.5, 0.5]]})")),
                    ValidationError);
}

TEST_CASE("decomposition json carries weights, branches, residual, counts") {
    Povm cross;
    cross.dim = 2;
    Vector x(3), z(3);
    x << 1, 0, 0;
    z << 0, 0, 1;
    cross.elements = {{0.5, x}, {0.5, -x}, {0.5, z}, {0.5, -z}};
    const ConvexDecomposition dec = decompose_extremal(cross);
    const Json j = decomposition_to_json(cross, dec);
    REQUIRE(j.at("weights").size() == 2);
    CHECK(j.at("weights")[0].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    REQUIRE(j.at("branches").size() == 2);
    CHECK(j.at("residual").get<double>() <= 1e-9);
    for (const Json& count : j.at("leaf_outcome_counts")) {
        CHECK(count.get<int>() == 2);
    }
    for (const Json& branch : j.at("branches")) {
        CHECK(validate(povm_from_json(branch)).ok());
    }
}

TEST_CASE("curve csv: header, row shape, and determinism") {
    CertifyConfig config;
    config.restarts = 1;
    config.nm_options.max_iterations = 40;
    const auto curve = entropy_curve({0.3, 0.6}, config);
    const std::string csv = curve_to_csv(curve);
    CHECK(csv.rfind("delta,p_guess,h_min,theta1,theta2,lambda1,dual_gap,restart_best\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    const auto curve2 = entropy_curve({0.3, 0.6}, config);
    CHECK(curve_to_csv(curve2) == csv);  // bit-identical for a fixed seed
}

TEST_CASE("certification json fields") {
    const CertificationResult r = certify_with_params(paper_params(0.4), 0.4);
    const Json j = certification_to_json(r);
    CHECK(j.at("delta") == 0.4);
    CHECK(j.at("p_guess").get<double>() > 0.0);
    CHECK(j.at("params").contains("theta3"));
    CHECK(j.at("statistics").size() == 3);
    CHECK(j.at("restart_best") == -1);
    CHECK(j.at("dual_gap").get<double>() <= 1e-6);
}
