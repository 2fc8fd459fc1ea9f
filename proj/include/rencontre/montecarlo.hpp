#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rencontre/kernels/rng.hpp"
#include "rencontre/model.hpp"

namespace rencontre {

struct SimConfig {
    std::uint64_t seed = 0;
    long horizon = 1;
    long replications = 1;
    int workers = 0; // 0 = hardware concurrency; results are identical either way
};

struct SimSummary {
    std::vector<std::uint64_t> histogram; // histogram[n] counts J = n, n = 1..horizon
    std::uint64_t censored = 0;           // runs with no meeting by the horizon
    std::uint64_t replications = 0;
    long horizon = 0;
    double conditional_mean = 0.0; // mean of J given J <= horizon
    double conditional_mean_se = 0.0;
};

/// Per-replication stream; same (seed, replication) always replays the same walk.
using RepRng = kernels::Xoshiro256pp;

/// First time n <= horizon with all walks equal, tracking the d-1 differences
/// S_j(n) - S_d(n); empty when the walks never meet within the horizon.
std::optional<long> simulate_one(const WalkParams& params, long horizon, RepRng& rng);

SimSummary run_batch(const WalkParams& params, const SimConfig& config);

/// p scaled to the u64 threshold used by the step kernels (u < thr <=> success).
std::uint64_t bernoulli_threshold(double p);

} // namespace rencontre
