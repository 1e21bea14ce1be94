#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qbound/bounds.hpp"

#include <cmath>

using namespace qbound;

TEST_CASE("pm_bound: paper instantiations, exact at double precision") {
    CHECK(pm_bound({2, 1, 3}) == std::log2(3.0));
    CHECK(pm_bound({4, 1, 100}) == std::log2(5.0));
    CHECK(pm_bound({100, 1, 2}) == 1.0);
    // independent of the measurement count
    CHECK(pm_bound({2, 7, 3}) == pm_bound({2, 1, 3}));
}

TEST_CASE("bell_bound: paper instantiations") {
    CHECK(bell_bound({2, 2, 8}) == std::log2(5.0));
    CHECK(bell_bound({1, 1, 4}) == 1.0);
    CHECK(bell_bound({3, 2, 1000}) == std::log2(7.0));
}

TEST_CASE("bounds: monotonicity and the two separate caps") {
    for (int k = 1; k <= 6; ++k) {
        for (int l = 1; l <= 6; ++l) {
            const double bound = pm_bound({k, 1, l});
            CHECK(bound <= std::log2(double(l)) + 1e-15);
            CHECK(bound <= std::log2(double(k + 1)) + 1e-15);
            if (k > 1) CHECK(bound >= pm_bound({k - 1, 1, l}) - 1e-15);
            if (l > 1) CHECK(bound >= pm_bound({k, 1, l - 1}) - 1e-15);
        }
    }
    for (int nx = 1; nx <= 3; ++nx) {
        for (int na = 1; na <= 3; ++na) {
            for (int nb = 2; nb <= 6; ++nb) {
                CHECK(bell_bound({nx, na, nb}) >= bell_bound({nx, na, nb - 1}) - 1e-15);
                CHECK(bell_bound({nx + 1, na, nb}) >= bell_bound({nx, na, nb}) - 1e-15);
                CHECK(bell_bound({nx, na + 1, nb}) >= bell_bound({nx, na, nb}) - 1e-15);
            }
        }
    }
}

TEST_CASE("min_entropy: values and domain") {
    CHECK(min_entropy(1.0) == 0.0);
    CHECK(min_entropy(0.5) == 1.0);
    CHECK(min_entropy(1.0 / 3.0) == doctest::Approx(1.5849625007211562).epsilon(1e-15));
    CHECK_THROWS_AS(min_entropy(0.0), DomainError);
    CHECK_THROWS_AS(min_entropy(-0.2), DomainError);
    CHECK_THROWS_AS(min_entropy(1.2), DomainError);
}

TEST_CASE("bounds: invalid scenarios") {
    CHECK_THROWS_AS(pm_bound({0, 1, 3}), DomainError);
    CHECK_THROWS_AS(bell_bound({1, 0, 3}), DomainError);
}
