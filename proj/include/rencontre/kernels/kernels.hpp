#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rencontre::kernels {

/// One Monte-Carlo work item: replications [rep_begin, rep_end) of d walks,
/// stepped until rencontre or horizon. thresholds[j] is p_j scaled to u64
/// fixed point; a step of walk j succeeds iff next_u64 < thresholds[j].
struct McTask {
    int d;
    const std::uint64_t* thresholds; // d entries
    long horizon;
    std::uint64_t seed;
    std::uint64_t rep_begin;
    std::uint64_t rep_end;
};

/// Runtime-selected kernel set. Scalar implementations are the reference;
/// SIMD variants must agree bit-exactly for integer kernels (mc_batch) and to
/// tight relative tolerance for floating kernels (see tests/test_kernels).
struct KernelSet {
    const char* name;

    /// log(sum_k exp(x_k)) over x[0..len); -inf for len == 0.
    double (*logsumexp)(const double* x, std::size_t len);

    /// Fills out[i] = d * (lf[n] - lf[k] - lf[n-k]) + k * log_odds for
    /// k = k_begin + i, i in [0, len); lf is a log-factorial table with
    /// lf[m] = log(m!) valid through index n.
    void (*log_binom_row)(long n, int d, double log_odds, const double* lf,
                          long k_begin, std::size_t len, double* out);

    /// sum over n in [n_begin, n_end) of exp(-s*log n + n*log_y).
    double (*power_weight_sum)(double s, double log_y, std::uint64_t n_begin,
                               std::uint64_t n_end);

    /// sum_{i=0..len-1} a[i] * b[len-1-i]  (linear-convolution inner product).
    double (*dot_reverse)(const double* a, const double* b, std::size_t len);

    /// Runs the Monte-Carlo batch, accumulating into hist[1..horizon] and
    /// *censored. hist must have horizon+1 entries.
    void (*mc_batch)(const McTask& task, std::uint64_t* hist, std::uint64_t* censored);
};

const KernelSet& scalar_kernels();
const KernelSet* avx2_kernels(); // nullptr when unsupported by the build/CPU

/// Kernel set chosen at startup: best available unless the environment
/// variable RENCONTRE_KERNEL is set to "scalar" or "avx2".
const KernelSet& active_kernels();

} // namespace rencontre::kernels
