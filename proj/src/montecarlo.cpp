#include "rencontre/montecarlo.hpp"

#include <cmath>
#include <thread>

#include "rencontre/kernels/kernels.hpp"

namespace rencontre {

std::uint64_t bernoulli_threshold(double p) {
    // round(p * 2^64) without overflowing at p near 1
    const long double scaled = static_cast<long double>(p) * 18446744073709551616.0L;
    if (scaled >= 18446744073709551615.0L)
        return ~0ull;
    if (scaled <= 1.0L)
        return 1;
    return static_cast<std::uint64_t>(scaled);
}

std::optional<long> simulate_one(const WalkParams& params, long horizon, RepRng& rng) {
    if (horizon < 1)
        throw DomainError("horizon must be at least 1");
    const int d = params.d();
    std::vector<std::uint64_t> thr(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        thr[static_cast<std::size_t>(j)] = bernoulli_threshold(params.p(j));

    std::vector<std::int64_t> diff(static_cast<std::size_t>(d - 1), 0);
    std::vector<int> x(static_cast<std::size_t>(d));
    for (long n = 1; n <= horizon; ++n) {
        for (int j = 0; j < d; ++j)
            x[static_cast<std::size_t>(j)] = rng.next() < thr[static_cast<std::size_t>(j)] ? 1 : 0;
        std::int64_t any = 0;
        for (int j = 0; j < d - 1; ++j) {
            auto& dj = diff[static_cast<std::size_t>(j)];
            dj += x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(d - 1)];
            any |= dj;
        }
        if (any == 0)
            return n;
    }
    return std::nullopt;
}

SimSummary run_batch(const WalkParams& params, const SimConfig& config) {
    if (config.horizon < 1)
        throw DomainError("horizon must be at least 1");
    if (config.replications < 1)
        throw DomainError("replications must be at least 1");

    const int d = params.d();
    std::vector<std::uint64_t> thr(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        thr[static_cast<std::size_t>(j)] = bernoulli_threshold(params.p(j));

    int workers = config.workers > 0 ? config.workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1)
        workers = 1;
    const std::uint64_t reps = static_cast<std::uint64_t>(config.replications);
    workers = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), reps));

    const auto& ks = kernels::active_kernels();
    const std::size_t bins = static_cast<std::size_t>(config.horizon) + 1;
    std::vector<std::vector<std::uint64_t>> hists(static_cast<std::size_t>(workers),
                                                  std::vector<std::uint64_t>(bins, 0));
    std::vector<std::uint64_t> censored(static_cast<std::size_t>(workers), 0);

    // Contiguous replication ranges per worker; streams are derived per
    // replication, so the partition does not affect the aggregate.
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t lo = reps * static_cast<std::uint64_t>(w) /
                                 static_cast<std::uint64_t>(workers);
        const std::uint64_t hi = reps * static_cast<std::uint64_t>(w + 1) /
                                 static_cast<std::uint64_t>(workers);
        pool.emplace_back([&, w, lo, hi] {
            kernels::McTask task{d,           thr.data(), config.horizon,
                                 config.seed, lo,         hi};
            ks.mc_batch(task, hists[static_cast<std::size_t>(w)].data(),
                        &censored[static_cast<std::size_t>(w)]);
        });
    }
    for (auto& th : pool)
        th.join();

    SimSummary out;
    out.horizon = config.horizon;
    out.replications = reps;
    out.histogram.assign(bins, 0);
    for (int w = 0; w < workers; ++w) {
        out.censored += censored[static_cast<std::size_t>(w)];
        for (std::size_t i = 0; i < bins; ++i)
            out.histogram[i] += hists[static_cast<std::size_t>(w)][i];
    }

    // Conditional moments of J given J <= horizon, from the histogram so the
    // result is independent of worker count and accumulation order.
    long double hits = 0.0L, sum = 0.0L, sum_sq = 0.0L;
    for (long n = 1; n <= config.horizon; ++n) {
        const auto c = out.histogram[static_cast<std::size_t>(n)];
        if (!c)
            continue;
        hits += c;
        sum += static_cast<long double>(c) * n;
        sum_sq += static_cast<long double>(c) * n * static_cast<long double>(n);
    }
    if (hits > 0) {
        const long double mean = sum / hits;
        out.conditional_mean = static_cast<double>(mean);
        if (hits > 1) {
            const long double var = (sum_sq / hits - mean * mean) * hits / (hits - 1);
            out.conditional_mean_se =
                static_cast<double>(std::sqrt(std::max(var, 0.0L) / hits));
        }
    }
    return out;
}

} // namespace rencontre
