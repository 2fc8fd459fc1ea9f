#include "rencontre/kernels/kernels.hpp"

#include <cmath>
#include <limits>

#include "rencontre/kernels/rng.hpp"

namespace rencontre::kernels {
namespace {

double logsumexp_scalar(const double* x, std::size_t len) {
    if (len == 0)
        return -std::numeric_limits<double>::infinity();
    double m = x[0];
    for (std::size_t i = 1; i < len; ++i)
        m = x[i] > m ? x[i] : m;
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i)
        acc += std::exp(x[i] - m);
    return m + std::log(acc);
}

void log_binom_row_scalar(long n, int d, double log_odds, const double* lf,
                          long k_begin, std::size_t len, double* out) {
    const double lfn = lf[n];
    for (std::size_t i = 0; i < len; ++i) {
        const long k = k_begin + static_cast<long>(i);
        out[i] = d * (lfn - lf[k] - lf[n - k]) + static_cast<double>(k) * log_odds;
    }
}

double power_weight_sum_scalar(double s, double log_y, std::uint64_t n_begin,
                               std::uint64_t n_end) {
    double acc = 0.0, comp = 0.0; // Kahan
    for (std::uint64_t n = n_begin; n < n_end; ++n) {
        const double t =
            std::exp(-s * std::log(static_cast<double>(n)) + static_cast<double>(n) * log_y);
        const double y = t - comp;
        const double a = acc + y;
        comp = (a - acc) - y;
        acc = a;
    }
    return acc;
}

double dot_reverse_scalar(const double* a, const double* b, std::size_t len) {
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i)
        acc += a[i] * b[len - 1 - i];
    return acc;
}

void mc_batch_scalar(const McTask& task, std::uint64_t* hist, std::uint64_t* censored) {
    const int d = task.d;
    // Difference counters S_j(n) - S_d(n); rencontre iff all are zero.
    std::vector<std::int64_t> diff(static_cast<std::size_t>(d - 1));
    std::vector<int> step_x(static_cast<std::size_t>(d));
    for (std::uint64_t rep = task.rep_begin; rep < task.rep_end; ++rep) {
        Xoshiro256pp rng(task.seed, rep);
        std::fill(diff.begin(), diff.end(), 0);
        bool hit = false;
        for (long n = 1; n <= task.horizon; ++n) {
            for (int j = 0; j < d; ++j)
                step_x[static_cast<std::size_t>(j)] = rng.next() < task.thresholds[j] ? 1 : 0;
            std::int64_t any = 0;
            for (int j = 0; j < d - 1; ++j) {
                auto& dj = diff[static_cast<std::size_t>(j)];
                dj += step_x[static_cast<std::size_t>(j)] - step_x[static_cast<std::size_t>(d - 1)];
                any |= dj;
            }
            if (any == 0) {
                ++hist[n];
                hit = true;
                break;
            }
        }
        if (!hit)
            ++*censored;
    }
}

constexpr KernelSet kScalar = {
    "scalar",          logsumexp_scalar, log_binom_row_scalar,
    power_weight_sum_scalar, dot_reverse_scalar, mc_batch_scalar,
};

} // namespace

const KernelSet& scalar_kernels() {
    return kScalar;
}

} // namespace rencontre::kernels
