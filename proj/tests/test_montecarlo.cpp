#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "rencontre/exact.hpp"
#include "rencontre/montecarlo.hpp"

using namespace rencontre;

namespace {

bool summaries_equal(const SimSummary& a, const SimSummary& b) {
    return a.histogram == b.histogram && a.censored == b.censored &&
           a.replications == b.replications && a.conditional_mean == b.conditional_mean &&
           a.conditional_mean_se == b.conditional_mean_se;
}

} // namespace

TEST_CASE("single replication conserves mass") {
    const WalkParams params(2, {0.3, 0.5});
    SimConfig cfg{42, 10, 1, 1};
    const auto s = run_batch(params, cfg);
    std::uint64_t total = s.censored;
    for (auto c : s.histogram)
        total += c;
    CHECK(total == 1);
}

TEST_CASE("histogram plus censored always equals replications") {
    const WalkParams params(3, {0.3, 0.4, 0.5});
    SimConfig cfg{7, 50, 10007, 0};
    const auto s = run_batch(params, cfg);
    std::uint64_t total = s.censored;
    for (auto c : s.histogram)
        total += c;
    CHECK(total == 10007);
}

TEST_CASE("identical seed and config replay bit-identically across workers") {
    const WalkParams params(2, {0.3, 0.5});
    SimConfig base{0xDEADBEEFull, 200, 20001, 1};
    const auto one = run_batch(params, base);
    for (int workers : {2, 3, 7}) {
        SimConfig cfg = base;
        cfg.workers = workers;
        CHECK(summaries_equal(one, run_batch(params, cfg)));
    }
}

TEST_CASE("simulate_one replays deterministically and matches the definition") {
    const WalkParams params(3, {0.2, 0.5, 0.8});
    for (std::uint64_t rep = 0; rep < 500; ++rep) {
        RepRng a(99, rep), b(99, rep);
        const auto first = simulate_one(params, 30, a);
        const auto second = simulate_one(params, 30, b);
        CHECK(first == second);

        // step-by-step reconstruction from the same stream
        RepRng c(99, rep);
        std::vector<std::uint64_t> thr;
        for (int j = 0; j < 3; ++j)
            thr.push_back(bernoulli_threshold(params.p(j)));
        long found = 0;
        int s1 = 0, s2 = 0, s3 = 0;
        for (long n = 1; n <= 30 && found == 0; ++n) {
            s1 += c.next() < thr[0] ? 1 : 0;
            s2 += c.next() < thr[1] ? 1 : 0;
            s3 += c.next() < thr[2] ? 1 : 0;
            if (s1 == s2 && s2 == s3)
                found = n;
        }
        CHECK(first.value_or(0) == found);
    }
}

TEST_CASE("a first-step meeting happens exactly when all first increments agree") {
    const WalkParams params(2, {0.9, 0.1});
    for (std::uint64_t rep = 0; rep < 2000; ++rep) {
        RepRng probe(5, rep);
        const bool x1 = probe.next() < bernoulli_threshold(0.9);
        const bool x2 = probe.next() < bernoulli_threshold(0.1);
        RepRng run(5, rep);
        const auto j = simulate_one(params, 1, run);
        CHECK(j.has_value() == (x1 == x2));
    }
}

TEST_CASE("one-step histogram frequency matches the meeting probability") {
    const WalkParams params(2, {0.35, 0.6});
    const double r1 = rencontre_prob(params, 1);
    SimConfig cfg{0xFEEDull, 1, 200000, 0};
    const auto s = run_batch(params, cfg);
    const double freq = static_cast<double>(s.histogram[1]) / static_cast<double>(cfg.replications);
    const double sigma = std::sqrt(r1 * (1 - r1) / static_cast<double>(cfg.replications));
    CHECK(std::abs(freq - r1) < 3.5 * sigma);
}

TEST_CASE("empirical first-passage masses track the exact distribution") {
    const WalkParams params(2, {0.5, 0.5});
    SimConfig cfg{20240817ull, 50, 200000, 0};
    const auto s = run_batch(params, cfg);
    const auto fp = first_passage_seq(params, 20);
    const double reps = static_cast<double>(cfg.replications);
    int misses = 0;
    for (long n = 1; n <= 20; ++n) {
        const double fn = fp.f[static_cast<std::size_t>(n)];
        const double freq = static_cast<double>(s.histogram[static_cast<std::size_t>(n)]) / reps;
        const double tol = 4.0 * std::sqrt(fn * (1 - fn) / reps);
        if (std::abs(freq - fn) > tol)
            ++misses;
    }
    CHECK(misses <= 1); // 4-sigma misses should be rare across 20 cells
}

TEST_CASE("censored fraction approaches the no-meeting probability") {
    const WalkParams params(2, {0.3, 0.5});
    SimConfig cfg{31337ull, 2000, 20000, 0};
    const auto s = run_batch(params, cfg);
    const double frac = static_cast<double>(s.censored) / static_cast<double>(cfg.replications);
    const double sigma = std::sqrt(0.2 * 0.8 / static_cast<double>(cfg.replications));
    CHECK(std::abs(frac - 0.2) < 3.0 * sigma + 1e-2);
}

TEST_CASE("conditional mean is nondecreasing in the horizon on one seed") {
    const WalkParams params(2, {0.3, 0.5});
    double prev = 0.0;
    for (long horizon : {50L, 200L, 1000L}) {
        SimConfig cfg{123456789ull, horizon, 20000, 0};
        const auto s = run_batch(params, cfg);
        CHECK(s.conditional_mean >= prev - 1e-12);
        prev = s.conditional_mean;
    }
}

TEST_CASE("config validation") {
    const WalkParams params(2, {0.3, 0.5});
    SimConfig bad{1, 0, 10, 1};
    CHECK_THROWS_AS(run_batch(params, bad), DomainError);
    SimConfig bad2{1, 10, 0, 1};
    CHECK_THROWS_AS(run_batch(params, bad2), DomainError);
}
