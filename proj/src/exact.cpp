#include "rencontre/exact.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "rencontre/kernels/kernels.hpp"

namespace rencontre {

namespace detail {

std::vector<double> log_factorial_table(long n_max) {
    std::vector<double> lf(static_cast<std::size_t>(n_max) + 1);
    long double acc = 0.0L;
    lf[0] = 0.0;
    for (long m = 1; m <= n_max; ++m) {
        acc += std::log(static_cast<long double>(m));
        lf[static_cast<std::size_t>(m)] = static_cast<double>(acc);
    }
    return lf;
}

double log_rencontre_windowed(long n, int d, const DerivedConstants& dc, const double* lf) {
    const double alpha = dc.odds_root;
    long k_star = binomial_weight_argmax(n, alpha);
    k_star = std::clamp(k_star, 0L, n);

    // Half-width from the local curvature of log(C(n,k)^d P^k); drop ~70 nats
    // then verify the edges and widen if the estimate was short.
    const double width_est =
        std::sqrt(2.0 * 70.0 * alpha * static_cast<double>(n) / d) / (1.0 + alpha);
    long half = static_cast<long>(width_est) + 4;
    long k_lo = std::max(0L, k_star - half);
    long k_hi = std::min(n, k_star + half);

    const auto& ks = kernels::active_kernels();
    std::vector<double> row;
    double peak, edge_lo, edge_hi;
    for (;;) {
        row.resize(static_cast<std::size_t>(k_hi - k_lo + 1));
        ks.log_binom_row(n, d, dc.log_odds_product, lf, k_lo, row.size(), row.data());
        peak = row[static_cast<std::size_t>(std::clamp(k_star, k_lo, k_hi) - k_lo)];
        edge_lo = row.front();
        edge_hi = row.back();
        const bool lo_ok = (k_lo == 0) || (edge_lo < peak - 64.0);
        const bool hi_ok = (k_hi == n) || (edge_hi < peak - 64.0);
        if (lo_ok && hi_ok)
            break;
        half *= 2;
        k_lo = std::max(0L, k_star - half);
        k_hi = std::min(n, k_star + half);
    }

    double log_sum = ks.logsumexp(row.data(), row.size());

    // Geometric bounds on the truncated flanks. The term ratio
    // t_{k+1}/t_k = ((n-k)/(k+1))^d P is monotone decreasing in k, so each
    // flank is dominated by a geometric series from its edge.
    double flank = 0.0;
    if (k_hi < n) {
        const double ratio = std::exp(d * (std::log(static_cast<double>(n - k_hi)) -
                                           std::log(static_cast<double>(k_hi + 1))) +
                                      dc.log_odds_product);
        if (ratio < 1.0)
            flank += std::exp(edge_hi - log_sum) * ratio / (1.0 - ratio);
        else // estimate was badly short; should not happen past the peak
            flank += 1.0;
    }
    if (k_lo > 0) {
        const double inv_ratio = std::exp(-d * (std::log(static_cast<double>(n - k_lo + 1)) -
                                                std::log(static_cast<double>(k_lo))) -
                                          dc.log_odds_product);
        if (inv_ratio < 1.0)
            flank += std::exp(edge_lo - log_sum) * inv_ratio / (1.0 - inv_ratio);
        else
            flank += 1.0;
    }
    if (flank > 0.0)
        log_sum += std::log1p(flank);

    return static_cast<double>(n) * dc.log_zero_step_prob + log_sum;
}

std::vector<double> log_rencontre_sequence(const WalkParams& params, long n_max) {
    const DerivedConstants dc = derived_constants(params);
    const auto lf = log_factorial_table(n_max);
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (long n = 1; n <= n_max; ++n)
        out[static_cast<std::size_t>(n)] = log_rencontre_windowed(n, params.d(), dc, lf.data());
    return out;
}

} // namespace detail

long binomial_weight_argmax(long n, double alpha) {
    if (n < 1)
        throw DomainError("argmax needs n >= 1");
    if (!(alpha > 0.0))
        throw DomainError("argmax needs alpha > 0");
    const long double a = alpha;
    return static_cast<long>(std::floor(a * (n + 1) / (a + 1)));
}

double coefficient_sum(long n, double odds_product, int d) {
    if (n < 1)
        throw DomainError("coefficient_sum needs n >= 1");
    if (d < 2)
        throw DimensionTooSmallError("coefficient_sum needs d >= 2");
    if (!(odds_product > 0.0))
        throw DomainError("coefficient_sum needs positive odds product");
    const long double log_odds = std::log(static_cast<long double>(odds_product));
    // online log-sum-exp over the term recurrence
    long double lt = 0.0L; // log of C(n,0)^d P^0
    long double m = lt, acc = 1.0L;
    for (long k = 0; k < n; ++k) {
        lt += d * (std::log(static_cast<long double>(n - k)) -
                   std::log(static_cast<long double>(k + 1))) +
              log_odds;
        if (lt > m) {
            acc = acc * std::exp(m - lt) + 1.0L;
            m = lt;
        } else {
            acc += std::exp(lt - m);
        }
    }
    return static_cast<double>(m + std::log(acc));
}

double rencontre_prob(const WalkParams& params, long n) {
    if (n < 1)
        throw DomainError("rencontre probabilities start at n = 1");
    const DerivedConstants dc = derived_constants(params);
    const double log_r = static_cast<double>(n) * dc.log_zero_step_prob +
                         coefficient_sum(n, dc.odds_product, params.d());
    return std::exp(log_r);
}

mpq_class rencontre_prob_exact(const RationalWalkParams& params, long n) {
    if (n < 1)
        throw DomainError("rencontre probabilities start at n = 1");
    const int d = params.d();
    mpz_class numer = 0;
    mpz_class den = 1;
    std::vector<mpz_class> a(static_cast<std::size_t>(d)), c(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const auto& pj = params.p()[static_cast<std::size_t>(j)];
        a[static_cast<std::size_t>(j)] = pj.get_num();
        c[static_cast<std::size_t>(j)] = pj.get_den() - pj.get_num(); // q numerator
        mpz_class bn;
        mpz_pow_ui(bn.get_mpz_t(), pj.get_den().get_mpz_t(), static_cast<unsigned long>(n));
        den *= bn;
    }
    mpz_class binom, term, apow, cpow;
    for (long k = 0; k <= n; ++k) {
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n),
                     static_cast<unsigned long>(k));
        term = 1;
        for (int j = 0; j < d; ++j) {
            mpz_pow_ui(apow.get_mpz_t(), a[static_cast<std::size_t>(j)].get_mpz_t(),
                       static_cast<unsigned long>(k));
            mpz_pow_ui(cpow.get_mpz_t(), c[static_cast<std::size_t>(j)].get_mpz_t(),
                       static_cast<unsigned long>(n - k));
            term *= binom * apow * cpow;
        }
        numer += term;
    }
    mpq_class r(numer, den);
    r.canonicalize();
    return r;
}

RencontreSequence rencontre_sequence(const WalkParams& params, long n_max) {
    if (n_max < 1)
        throw DomainError("n_max must be at least 1");
    RencontreSequence seq;
    seq.mode = NumericMode::FloatLog;
    seq.n_max = n_max;
    seq.log_r = detail::log_rencontre_sequence(params, n_max);
    seq.r.resize(seq.log_r.size());
    for (long n = 1; n <= n_max; ++n)
        seq.r[static_cast<std::size_t>(n)] = std::exp(seq.log_r[static_cast<std::size_t>(n)]);
    return seq;
}

RencontreSequence rencontre_sequence(const RationalWalkParams& params, long n_max,
                                     long exact_cap) {
    if (n_max < 1)
        throw DomainError("n_max must be at least 1");
    if (n_max > exact_cap)
        throw ExactCapError("exact mode capped at n_max = " + std::to_string(exact_cap));

    const int d = params.d();
    RencontreSequence seq;
    seq.mode = NumericMode::ExactRational;
    seq.n_max = n_max;
    seq.r_exact.resize(static_cast<std::size_t>(n_max) + 1, mpq_class(0));

    // Integer pow tables per walk; r_n = (sum_k prod_j C a^k c^{n-k}) / prod_j b^n.
    std::vector<std::vector<mpz_class>> apow(static_cast<std::size_t>(d)),
        cpow(static_cast<std::size_t>(d));
    std::vector<mpz_class> bpow_all(static_cast<std::size_t>(n_max) + 1);
    mpz_class b_all = 1;
    for (int j = 0; j < d; ++j) {
        const auto& pj = params.p()[static_cast<std::size_t>(j)];
        const mpz_class a = pj.get_num();
        const mpz_class c = pj.get_den() - pj.get_num();
        b_all *= pj.get_den();
        auto& ap = apow[static_cast<std::size_t>(j)];
        auto& cp = cpow[static_cast<std::size_t>(j)];
        ap.resize(static_cast<std::size_t>(n_max) + 1);
        cp.resize(static_cast<std::size_t>(n_max) + 1);
        ap[0] = 1;
        cp[0] = 1;
        for (long k = 1; k <= n_max; ++k) {
            ap[static_cast<std::size_t>(k)] = ap[static_cast<std::size_t>(k - 1)] * a;
            cp[static_cast<std::size_t>(k)] = cp[static_cast<std::size_t>(k - 1)] * c;
        }
    }
    bpow_all[0] = 1;
    for (long nn = 1; nn <= n_max; ++nn)
        bpow_all[static_cast<std::size_t>(nn)] = bpow_all[static_cast<std::size_t>(nn - 1)] * b_all;

    mpz_class numer, binom, term, binpow;
    for (long n = 1; n <= n_max; ++n) {
        numer = 0;
        binom = 1; // C(n,0)
        for (long k = 0; k <= n; ++k) {
            mpz_pow_ui(binpow.get_mpz_t(), binom.get_mpz_t(), static_cast<unsigned long>(d));
            term = binpow;
            for (int j = 0; j < d; ++j)
                term *= apow[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] *
                        cpow[static_cast<std::size_t>(j)][static_cast<std::size_t>(n - k)];
            numer += term;
            if (k < n) {
                binom *= (n - k);
                mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(),
                                static_cast<unsigned long>(k + 1));
            }
        }
        mpq_class r(numer, bpow_all[static_cast<std::size_t>(n)]);
        r.canonicalize();
        seq.r_exact[static_cast<std::size_t>(n)] = r;
    }

    seq.r.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
    seq.log_r.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (long n = 1; n <= n_max; ++n) {
        const double rd = seq.r_exact[static_cast<std::size_t>(n)].get_d();
        seq.r[static_cast<std::size_t>(n)] = rd;
        seq.log_r[static_cast<std::size_t>(n)] = std::log(rd);
    }
    return seq;
}

namespace {

FirstPassageSequence convolve_first_passage_float(const RencontreSequence& rs) {
    FirstPassageSequence fp;
    fp.mode = NumericMode::FloatLog;
    fp.n_max = rs.n_max;
    const auto n_max = rs.n_max;
    fp.f.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
    fp.cumulative.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
    const auto& ks = kernels::active_kernels();

    double cum = 0.0, comp = 0.0;
    for (long n = 1; n <= n_max; ++n) {
        double fn = rs.r[static_cast<std::size_t>(n)];
        if (n >= 2)
            fn -= ks.dot_reverse(fp.f.data() + 1, rs.r.data() + 1,
                                 static_cast<std::size_t>(n - 1));
        if (fn < -1e-12)
            throw NumericFailure("first-passage mass went negative at n = " + std::to_string(n) +
                                 " (f = " + std::to_string(fn) + ")");
        fp.f[static_cast<std::size_t>(n)] = fn;
        const double y = fn - comp;
        const double t = cum + y;
        comp = (t - cum) - y;
        cum = t;
        if (cum > 1.0 + 1e-12)
            throw NumericFailure("first-passage mass exceeded 1 at n = " + std::to_string(n));
        fp.cumulative[static_cast<std::size_t>(n)] = cum;
    }
    fp.defect_at_horizon = 1.0 - cum;
    return fp;
}

} // namespace

FirstPassageSequence first_passage_seq(const WalkParams& params, long n_max) {
    return convolve_first_passage_float(rencontre_sequence(params, n_max));
}

FirstPassageSequence first_passage_seq(const RationalWalkParams& params, long n_max,
                                       long exact_cap) {
    const RencontreSequence rs = rencontre_sequence(params, n_max, exact_cap);
    FirstPassageSequence fp;
    fp.mode = NumericMode::ExactRational;
    fp.n_max = n_max;
    fp.f_exact.resize(static_cast<std::size_t>(n_max) + 1, mpq_class(0));
    fp.cumulative_exact.resize(static_cast<std::size_t>(n_max) + 1, mpq_class(0));
    mpq_class cum = 0;
    for (long n = 1; n <= n_max; ++n) {
        mpq_class fn = rs.r_exact[static_cast<std::size_t>(n)];
        for (long k = 1; k < n; ++k)
            fn -= fp.f_exact[static_cast<std::size_t>(k)] *
                  rs.r_exact[static_cast<std::size_t>(n - k)];
        assert(fn >= 0);
        fp.f_exact[static_cast<std::size_t>(n)] = fn;
        cum += fn;
        fp.cumulative_exact[static_cast<std::size_t>(n)] = cum;
    }
    fp.defect_exact = mpq_class(1) - cum;

    fp.f.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
    fp.cumulative.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (long n = 1; n <= n_max; ++n) {
        fp.f[static_cast<std::size_t>(n)] = fp.f_exact[static_cast<std::size_t>(n)].get_d();
        fp.cumulative[static_cast<std::size_t>(n)] =
            fp.cumulative_exact[static_cast<std::size_t>(n)].get_d();
    }
    fp.defect_at_horizon = fp.defect_exact.get_d();
    return fp;
}

mpq_class first_passage_inclusion_exclusion(const RationalWalkParams& params, long n) {
    if (n < 1)
        throw DomainError("n must be at least 1");
    if (n > kInclusionExclusionCap)
        throw DomainError("composition enumeration capped at n = " +
                          std::to_string(kInclusionExclusionCap));

    const RencontreSequence rs = rencontre_sequence(params, n, kInclusionExclusionCap);
    mpq_class total = 0;
    mpq_class product;
    const std::uint64_t gap_masks = 1ull << (n - 1);
    // Bits of mask mark cuts in the n-1 gaps; s parts carry sign (-1)^{s-1}.
    for (std::uint64_t mask = 0; mask < gap_masks; ++mask) {
        product = 1;
        long part = 1;
        int parts = 1;
        for (long gap = 0; gap < n - 1; ++gap) {
            if (mask & (1ull << gap)) {
                product *= rs.r_exact[static_cast<std::size_t>(part)];
                part = 1;
                ++parts;
            } else {
                ++part;
            }
        }
        product *= rs.r_exact[static_cast<std::size_t>(part)];
        if (parts % 2 == 1)
            total += product;
        else
            total -= product;
    }
    return total;
}

double stirling_trend(long n, double alpha, TrendOffset offset) {
    if (n < 1)
        throw DomainError("stirling_trend needs n >= 1");
    if (!(alpha > 0.0))
        throw DomainError("stirling_trend needs alpha > 0");
    const long double a = alpha;
    long double pos = a * (n + 1) / (a + 1);
    if (offset == TrendOffset::MinusSqrtN)
        pos -= std::sqrt(static_cast<long double>(n));
    else if (offset == TrendOffset::PlusSqrtN)
        pos += std::sqrt(static_cast<long double>(n));
    const long k = static_cast<long>(std::floor(pos));
    if (k < 0 || k > n)
        throw DomainError("offset pushes k outside {0..n}");

    constexpr long double kTwoPi = 6.283185307179586476925286766559005768L;
    const long double log_c = std::log((a + 1) / std::sqrt(kTwoPi * a)) +
                              (offset == TrendOffset::Center ? 0.0L
                                                             : -(a + 1) * (a + 1) / (2.0L * a));
    const long double log_binom = std::lgamma(static_cast<long double>(n + 1)) -
                                  std::lgamma(static_cast<long double>(k + 1)) -
                                  std::lgamma(static_cast<long double>(n - k + 1));
    const long double log_asym = log_c - 0.5L * std::log(static_cast<long double>(n)) +
                                 static_cast<long double>(n) * std::log1p(a);
    return static_cast<double>(std::exp(log_binom + k * std::log(a) - log_asym));
}

} // namespace rencontre
