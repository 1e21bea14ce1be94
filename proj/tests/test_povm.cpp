#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qbound/povm.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace qbound;

namespace {

Vector planar_xy(double angle) {
    Vector v(3);
    v << std::cos(angle), std::sin(angle), 0.0;
    return v;
}

Povm trine(double weight = 2.0 / 3.0) {
    const double deg = M_PI / 180.0;
    Povm povm;
    povm.dim = 2;
    for (double angle : {90.0, 210.0, 330.0}) {
        povm.elements.push_back({weight, planar_xy(angle * deg)});
    }
    return povm;
}

}  // namespace

TEST_CASE("validate: trine is a valid POVM, reweighted trine is not") {
    CHECK(validate(trine()).ok());

    const ValidationReport bad = validate(trine(0.6));
    CHECK_FALSE(bad.ok());
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.violations[0].condition == "sum lambda_b = d");
    CHECK(bad.violations[0].residual == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("validate: qutrit basis projectors with unit weights") {
    Povm povm;
    povm.dim = 3;
    for (int i = 0; i < 3; ++i) {
        ComplexMatrix projector = ComplexMatrix::Zero(3, 3);
        projector(i, i) = 1.0;
        povm.elements.push_back({1.0, bloch_from_state(projector).bloch});
    }
    CHECK(validate(povm).ok());
}

TEST_CASE("validate: flags non-unit vectors and negative weights") {
    Povm povm = trine();
    povm.elements[0].bloch *= 0.9;
    CHECK_FALSE(validate(povm).ok());

    Povm neg = trine();
    neg.elements[0].weight = -0.1;
    CHECK_FALSE(validate(neg).ok());
}

TEST_CASE("probability: aligned projector, trine on the maximally mixed state") {
    Povm projective;
    projective.dim = 2;
    Vector z(3);
    z << 0, 0, 1;
    projective.elements.push_back({1.0, z});
    projective.elements.push_back({1.0, -z});
    const QuditState up = state_from_bloch(2, z);
    CHECK(outcome_probability(projective, up, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(outcome_probability(projective, up, 1) == doctest::Approx(0.0).epsilon(1e-15));

    const QuditState mixed = state_from_bloch(2, Vector::Zero(3));
    for (int b = 0; b < 3; ++b) {
        CHECK(outcome_probability(trine(), mixed, b) ==
              doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
}

TEST_CASE("probability: fast path equals the matrix-trace oracle") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> dims(2, 3);
    std::uniform_int_distribution<int> outcome_count(2, 6);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int d = dims(rng);
        const Povm povm = testutil::random_rank1_povm(d, outcome_count(rng) + d - 2, rng);
        const QuditState state = bloch_from_state(testutil::random_density_matrix(d, rng));
        const auto matrices = to_matrices(povm);
        double total = 0.0;
        for (int b = 0; b < povm.outcomes(); ++b) {
            const double fast = outcome_probability(povm, state, b);
            const double oracle = (matrices[b] * state.matrix()).trace().real();
            CHECK(std::abs(fast - oracle) < 1e-10);
            CHECK(fast > -1e-9);
            CHECK(fast < 1.0 + 1e-9);
            total += fast;
            ++checked;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(checked > 1000);
}

TEST_CASE("rank1_refine: identity POVM splits into the +-z pair") {
    const std::vector<ComplexMatrix> input = {ComplexMatrix::Identity(2, 2)};
    const Rank1Refinement refined = rank1_refine(input);
    REQUIRE(refined.povm.outcomes() == 2);
    CHECK(refined.bins == std::vector<int>{0, 0});
    Vector z(3);
    z << 0, 0, 1;
    CHECK(refined.povm.elements[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((refined.povm.elements[0].bloch - z).norm() < 1e-12);
    CHECK(refined.povm.elements[1].weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((refined.povm.elements[1].bloch + z).norm() < 1e-12);
    CHECK(validate(refined.povm).ok());
}

TEST_CASE("rank1_refine: rank-1 input is unchanged with identity binning") {
    std::mt19937 rng(29);
    const Povm povm = testutil::random_rank1_povm(3, 5, rng);
    const Rank1Refinement refined = rank1_refine(to_matrices(povm));
    REQUIRE(refined.povm.outcomes() == povm.outcomes());
    for (int b = 0; b < povm.outcomes(); ++b) {
        CHECK(refined.bins[b] == b);
        CHECK(refined.povm.elements[b].weight ==
              doctest::Approx(povm.elements[b].weight).epsilon(1e-9));
        CHECK((refined.povm.elements[b].bloch - povm.elements[b].bloch).norm() < 1e-8);
    }
}

TEST_CASE("rank1_refine: rank-2 projector splits and recombines by bin") {
    ComplexMatrix block = ComplexMatrix::Zero(3, 3);
    block(0, 0) = block(1, 1) = 1.0;
    ComplexMatrix rest = ComplexMatrix::Zero(3, 3);
    rest(2, 2) = 1.0;
    const Rank1Refinement refined = rank1_refine({block, rest});
    REQUIRE(refined.povm.outcomes() == 3);
    CHECK(refined.bins == std::vector<int>{0, 0, 1});
    CHECK(refined.povm.elements[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(refined.povm.elements[1].weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(validate(refined.povm).ok());

    const auto matrices = to_matrices(refined.povm);
    const ComplexMatrix recombined = matrices[0] + matrices[1];
    CHECK((recombined - block).norm() < 1e-9);
    CHECK((matrices[2] - rest).norm() < 1e-9);
}

TEST_CASE("rank1_refine: recombination property on random general POVMs") {
    // Coarse-grain a random rank-1 POVM by pairing outcomes, refine, and
    // check the bins reproduce the coarse matrices.
    std::mt19937 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const Povm fine = testutil::random_rank1_povm(3, 6, rng);
        const auto fine_matrices = to_matrices(fine);
        std::vector<ComplexMatrix> coarse;
        for (int g = 0; g < 3; ++g) coarse.push_back(fine_matrices[2 * g] + fine_matrices[2 * g + 1]);

        const Rank1Refinement refined = rank1_refine(coarse);
        CHECK(validate(refined.povm).ok());
        std::vector<ComplexMatrix> rebuilt(3, ComplexMatrix::Zero(3, 3));
        const auto refined_matrices = to_matrices(refined.povm);
        for (std::size_t j = 0; j < refined_matrices.size(); ++j) {
            rebuilt[refined.bins[j]] += refined_matrices[j];
        }
        for (int g = 0; g < 3; ++g) CHECK((rebuilt[g] - coarse[g]).norm() < 1e-9);
    }
}

TEST_CASE("rank1_refine: input validation") {
    ComplexMatrix not_psd(2, 2);
    not_psd << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS(rank1_refine({not_psd, ComplexMatrix::Identity(2, 2) - not_psd}),
                    ValidationError);
    CHECK_THROWS_AS(rank1_refine({ComplexMatrix::Identity(2, 2) * 0.5}),
                    ValidationError);
}

TEST_CASE("to_matrices / from_matrices: trine completeness and round trips") {
    const auto matrices = to_matrices(trine());
    ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
    for (const auto& m : matrices) sum += m;
    CHECK((sum - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);

    const Povm back = from_matrices(matrices);
    REQUIRE(back.outcomes() == 3);
    for (int b = 0; b < 3; ++b) {
        CHECK(back.elements[b].weight ==
              doctest::Approx(trine().elements[b].weight).epsilon(1e-12));
        CHECK((back.elements[b].bloch - trine().elements[b].bloch).norm() < 1e-12);
    }

    std::mt19937 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Povm povm = testutil::random_rank1_povm(3, 6, rng);
        const Povm round = from_matrices(to_matrices(povm));
        for (int b = 0; b < povm.outcomes(); ++b) {
            CHECK(std::abs(round.elements[b].weight - povm.elements[b].weight) < 1e-12);
            CHECK((round.elements[b].bloch - povm.elements[b].bloch).norm() < 1e-11);
        }
    }
}

TEST_CASE("from_matrices: rank-2 element needs refinement") {
    ComplexMatrix block = ComplexMatrix::Zero(3, 3);
    block(0, 0) = block(1, 1) = 1.0;
    ComplexMatrix rest = ComplexMatrix::Zero(3, 3);
    rest(2, 2) = 1.0;
    CHECK_THROWS_AS(from_matrices({block, rest}), NeedsRefinementError);
}

TEST_CASE("from_matrices: zero matrix becomes a placeholder outcome") {
    Vector z(3);
    z << 0, 0, 1;
    const std::vector<ComplexMatrix> matrices = {
        ComplexMatrix::Zero(2, 2), bloch_matrix(2, z), bloch_matrix(2, Vector(-z))};
    const Povm povm = from_matrices(matrices);
    CHECK(povm.elements[0].weight == 0.0);
    CHECK(povm.elements[0].bloch.norm() == 0.0);
    CHECK(povm.nonzero_outcomes() == 2);
    CHECK(validate(povm).ok());
}
