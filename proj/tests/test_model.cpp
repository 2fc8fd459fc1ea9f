#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "rencontre/model.hpp"

using namespace rencontre;

TEST_CASE("walk params validate their inputs") {
    CHECK_NOTHROW(new_walk_params(2, {0.5, 0.5}));
    CHECK_NOTHROW(new_walk_params(3, {0.3, 0.4, 0.5}));
    CHECK_THROWS_AS(new_walk_params(1, {0.5}), DimensionTooSmallError);
    CHECK_THROWS_AS(new_walk_params(3, {0.5, 0.5}), DimensionMismatchError);
    CHECK_THROWS_AS(new_walk_params(2, {0.0, 0.5}), ProbabilityRangeError);
    CHECK_THROWS_AS(new_walk_params(2, {0.5, 1.0}), ProbabilityRangeError);
    CHECK_THROWS_AS(new_walk_params(2, {-0.1, 0.5}), ProbabilityRangeError);
}

TEST_CASE("symmetric flag is an exact comparison") {
    CHECK(new_walk_params(3, {0.4, 0.4, 0.4}).symmetric());
    CHECK_FALSE(new_walk_params(3, {0.4, 0.4, 0.4 + 1e-12}).symmetric());
}

TEST_CASE("derived constants for the symmetric two-walk case") {
    const auto dc = derived_constants(new_walk_params(2, {0.5, 0.5}));
    CHECK(dc.odds_product == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dc.zero_step_prob == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(dc.decay_base == 1.0);
    CHECK(dc.decay_is_one);
    CHECK(derived_constants(new_walk_params(3, {0.5, 0.5, 0.5})).decay_base == 1.0);
}

TEST_CASE("decay base against 50-digit evaluation") {
    const auto dc = derived_constants(new_walk_params(3, {0.3, 0.4, 0.5}));
    const double expected = static_cast<double>(oracle::decay_base({"0.3", "0.4", "0.5"}));
    CHECK(dc.decay_base == doctest::Approx(expected).epsilon(1e-13));
    // frozen digits of the same quantity
    CHECK(dc.decay_base == doctest::Approx(0.95823227375406981801859551).epsilon(1e-13));
    CHECK(dc.decay_base < 1.0);
}

TEST_CASE("amgm gap zero exactly on equal parameters, positive otherwise") {
    CHECK(amgm_gap(new_walk_params(4, {0.5, 0.5, 0.5, 0.5})) == 0.0);
    CHECK(amgm_gap(new_walk_params(2, {0.3, 0.5})) > 0.0);
    const double gap = amgm_gap(new_walk_params(3, {0.3, 0.4, 0.5}));
    const double expected = static_cast<double>(oracle::amgm_gap({"0.3", "0.4", "0.5"}));
    CHECK(gap == doctest::Approx(expected).epsilon(1e-12));
    CHECK(gap == doctest::Approx(0.014121040606800660240721599).epsilon(1e-12));
}

TEST_CASE("decay base identity and range over random parameters") {
    oracle::Rng rng(0xA11CE5ull);
    for (int trial = 0; trial < 300; ++trial) {
        const int d = static_cast<int>(rng.integer(2, 6));
        std::vector<double> p;
        for (int j = 0; j < d; ++j)
            p.push_back(rng.uniform(0.02, 0.98));
        const WalkParams params(d, p);
        const auto dc = derived_constants(params);
        CHECK(dc.decay_base > 0.0);
        CHECK(dc.decay_base <= 1.0);
        // same quantity through Q (1 + P^{1/d})^d, assembled independently
        const double other =
            dc.zero_step_prob * std::pow(1.0 + std::pow(dc.odds_product, 1.0 / d), d);
        CHECK(dc.decay_base == doctest::Approx(other).epsilon(1e-12));
        CHECK(amgm_gap(params) >= 0.0);
    }
}

TEST_CASE("perturbing one coordinate of an equal vector opens the gap") {
    oracle::Rng rng(0xBEE5ull);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = static_cast<int>(rng.integer(2, 5));
        const double base = rng.uniform(0.1, 0.9);
        std::vector<double> p(static_cast<std::size_t>(d), base);
        const double delta = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(1e-6, 0.05);
        const std::size_t idx = static_cast<std::size_t>(rng.integer(0, d - 1));
        p[idx] = std::min(0.99, std::max(0.01, base + delta));
        if (p[idx] == base)
            continue;
        CHECK(amgm_gap(WalkParams(d, p)) > 0.0);
    }
}

TEST_CASE("rational parameters parse decimals and fractions identically") {
    const auto a = parse_probability_rational("0.3");
    const auto b = parse_probability_rational("3/10");
    CHECK(a == b);
    CHECK(a.get_num() == 3);
    CHECK(a.get_den() == 10);
    CHECK(parse_probability_rational("0.125") == mpq_class(1, 8));
    CHECK_THROWS_AS(parse_probability_rational("abc"), ProbabilityRangeError);
    CHECK_THROWS_AS(parse_probability_rational(""), ProbabilityRangeError);
    CHECK_THROWS_AS(parse_probability_rational("0..3"), ProbabilityRangeError);
}

TEST_CASE("rational params validate and expose the common denominator") {
    const auto rp = RationalWalkParams::parse(3, {"3/10", "2/5", "1/2"});
    CHECK(rp.common_denominator() == 10);
    CHECK(rp.q()[0] == mpq_class(7, 10));
    CHECK_THROWS_AS(RationalWalkParams::parse(2, {"0/1", "1/2"}), ProbabilityRangeError);
    CHECK_THROWS_AS(RationalWalkParams::parse(2, {"1/1", "1/2"}), ProbabilityRangeError);
    CHECK_THROWS_AS(RationalWalkParams::parse(3, {"1/2", "1/2"}), DimensionMismatchError);

    const auto params = rp.to_float();
    CHECK(params.d() == 3);
    CHECK(params.p(0) == doctest::Approx(0.3).epsilon(1e-15));
}
