#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they check: plain-loop exact rationals, 50-digit floats and compensated
// long-double summation.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using bf50 = boost::multiprecision::cpp_bin_float_50;

// Direct product-sum for the meeting probability at time n, written as naively
// as possible: sum_k prod_j C(n,k) p_j^k q_j^{n-k}.
inline mpq_class rencontre(const std::vector<mpq_class>& p, long n) {
    mpq_class total = 0;
    for (long k = 0; k <= n; ++k) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n),
                     static_cast<unsigned long>(k));
        mpq_class term = 1;
        for (const auto& pj : p) {
            mpq_class factor = binom;
            for (long i = 0; i < k; ++i)
                factor *= pj;
            for (long i = 0; i < n - k; ++i)
                factor *= 1 - pj;
            term *= factor;
        }
        total += term;
    }
    return total;
}

// First-meeting masses by the renewal recursion, built on the oracle r-values.
inline std::vector<mpq_class> renewal_first_passage(const std::vector<mpq_class>& p, long n_max) {
    std::vector<mpq_class> r(static_cast<std::size_t>(n_max) + 1), f(r.size());
    for (long n = 1; n <= n_max; ++n)
        r[static_cast<std::size_t>(n)] = rencontre(p, n);
    for (long n = 1; n <= n_max; ++n) {
        mpq_class fn = r[static_cast<std::size_t>(n)];
        for (long k = 1; k < n; ++k)
            fn -= f[static_cast<std::size_t>(k)] * r[static_cast<std::size_t>(n - k)];
        f[static_cast<std::size_t>(n)] = fn;
    }
    return f;
}

// ((prod p)^(1/d) + (prod q)^(1/d))^d at 50 digits, from decimal strings.
inline bf50 decay_base(const std::vector<std::string>& p_literals) {
    const int d = static_cast<int>(p_literals.size());
    bf50 gp = 1, gq = 1;
    for (const auto& lit : p_literals) {
        const bf50 pj(lit);
        gp *= pj;
        gq *= 1 - pj;
    }
    const bf50 inv_d = bf50(1) / d;
    return pow(pow(gp, inv_d) + pow(gq, inv_d), bf50(d));
}

inline bf50 amgm_gap(const std::vector<std::string>& p_literals) {
    const int d = static_cast<int>(p_literals.size());
    bf50 gp = 1, gq = 1;
    for (const auto& lit : p_literals) {
        const bf50 pj(lit);
        gp *= pj;
        gq *= 1 - pj;
    }
    const bf50 inv_d = bf50(1) / d;
    return 1 - (pow(gp, inv_d) + pow(gq, inv_d));
}

// Compensated partial sum of n^{-s} x^n over [n0, n0+terms), long double.
inline long double power_tail_partial(long double s, long double x, long n0, long terms) {
    long double acc = 0.0L, comp = 0.0L;
    for (long n = n0; n < n0 + terms; ++n) {
        const long double t = std::exp(-s * std::log(static_cast<long double>(n)) +
                                       static_cast<long double>(n) * std::log(x));
        const long double y = t - comp;
        const long double a = acc + y;
        comp = (a - acc) - y;
        acc = a;
    }
    return acc;
}

// Deterministic test-case generator.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    long integer(long lo, long hi) { // inclusive
        return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

} // namespace oracle
