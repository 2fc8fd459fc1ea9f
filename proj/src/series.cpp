#include "rencontre/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rencontre/bounds.hpp"
#include "rencontre/kernels/kernels.hpp"

namespace rencontre {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;

struct KahanSum {
    double acc = 0.0, comp = 0.0;
    void add(double t) {
        const double y = t - comp;
        const double s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
};

// Grows a log-factorial table on demand (long double accumulator, double store).
struct LogFactBuilder {
    std::vector<double> lf{0.0};
    long double acc = 0.0L;
    void ensure(long n) {
        while (static_cast<long>(lf.size()) <= n) {
            acc += std::log(static_cast<long double>(lf.size()));
            lf.push_back(static_cast<double>(acc));
        }
    }
};

} // namespace

TailEnclosure polylog_tail(double s, double x, long n0, double eps, long max_terms) {
    if (n0 < 1)
        throw DomainError("polylog_tail needs n0 >= 1");
    if (!(x > 0.0) || x > 1.0)
        throw DomainError("polylog_tail needs x in (0,1]");

    TailEnclosure out;
    const auto& ks = kernels::active_kernels();

    if (x == 1.0) {
        if (s <= 1.0) {
            out.outcome = SeriesOutcome::Divergent;
            return out;
        }
        KahanSum partial;
        long m = n0;
        long chunk = 256;
        for (;;) {
            const long stop = m + chunk;
            partial.add(ks.power_weight_sum(s, 0.0, static_cast<std::uint64_t>(m),
                                            static_cast<std::uint64_t>(stop)));
            m = stop;
            // integral comparison bracket for the remainder past m-1:
            // trapezoid from below, midpoint from above (the summand is
            // convex decreasing)
            const double M = static_cast<double>(m - 1);
            const double lower_rem =
                std::pow(M + 1.0, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(M + 1.0, -s);
            const double upper_rem = std::pow(M + 0.5, 1.0 - s) / (s - 1.0);
            if (upper_rem - lower_rem <= eps || m - n0 >= max_terms) {
                out.lower = partial.acc + lower_rem;
                out.upper = partial.acc + upper_rem;
                out.terms_used = m - n0;
                return out;
            }
            chunk = std::min(chunk * 2, 1L << 20);
        }
    }

    // x < 1: direct terms plus a geometric remainder bound. The term ratio is
    // at most x ((m+1)/m)^{max(-s,0)}, monotone down to x.
    const double log_x = std::log(x);
    KahanSum partial;
    long m = n0;
    long chunk = 64;
    for (;;) {
        const long stop = m + chunk;
        partial.add(ks.power_weight_sum(s, log_x, static_cast<std::uint64_t>(m),
                                        static_cast<std::uint64_t>(stop)));
        m = stop;
        const double t_next =
            std::exp(-s * std::log(static_cast<double>(m)) + static_cast<double>(m) * log_x);
        double ratio = x;
        if (s < 0.0)
            ratio *= std::pow((static_cast<double>(m) + 1.0) / static_cast<double>(m), -s);
        if (ratio < 1.0) {
            const double rem = t_next / (1.0 - ratio);
            if (rem <= eps || m - n0 >= max_terms) {
                out.lower = partial.acc + t_next;
                out.upper = partial.acc + rem;
                if (out.upper < out.lower) // single-term tail rounding
                    out.upper = out.lower;
                out.terms_used = m - n0;
                return out;
            }
        }
        chunk = std::min(chunk * 2, 1L << 20);
    }
}

SeriesValue varphi_series(const WalkParams& params, double x, int order, double eps,
                          long max_terms) {
    if (order < 0 || order > 2)
        throw DomainError("order must be 0, 1 or 2");
    if (!(x >= 0.0) || x > 1.0)
        throw DomainError("x must lie in [0,1]");

    const int d = params.d();
    const DerivedConstants dc = derived_constants(params);

    SeriesValue out;
    if (x == 0.0) {
        // only the n = 1 term can survive: r_1 x^0 for the derivative forms
        out.value = order == 0 ? 0.0 : rencontre_prob(params, 1);
        out.terms_used = order == 0 ? 0 : 1;
        return out;
    }

    const double tail_exponent = 0.5 * (d - 1) - order;
    if (x == 1.0 && dc.decay_is_one && tail_exponent <= 1.0) {
        out.outcome = SeriesOutcome::Divergent;
        return out;
    }

    // Tail certificate: beyond N(alpha, 1/2) the summand is dominated by
    // c_tail n^{order-(d-1)/2} (Tx)^n / x^{shift}.
    const double lambda_tail = 0.5;
    const long n_valid = threshold_N(dc.odds_root, lambda_tail);
    const double c_tail =
        std::pow(M_constant(dc.odds_root, lambda_tail) / std::sqrt(kTwoPi), d - 1);
    const int shift = order == 0 ? 0 : 1;
    const double log_x = std::log(x);
    const double log_tx = std::log(dc.decay_base) + log_x;
    const double x_shift_factor = shift ? 1.0 / x : 1.0;

    LogFactBuilder lfb;
    KahanSum sum;
    long n = 0;
    double cert = std::numeric_limits<double>::infinity();
    while (n < max_terms) {
        ++n;
        lfb.ensure(n);
        const double log_r = detail::log_rencontre_windowed(n, d, dc, lfb.lf.data());
        sum.add(std::exp(log_r + order * std::log(static_cast<double>(n)) +
                         static_cast<double>(n - shift) * log_x));

        if (n < n_valid || (n & 0xF) != 0)
            continue;
        // remainder <= c_tail x^{-shift} sum_{m>n} m^{-tail_exponent} (Tx)^m
        if (log_tx < 0.0) {
            const double t_next = std::exp(-tail_exponent * std::log(static_cast<double>(n + 1)) +
                                           static_cast<double>(n + 1) * log_tx);
            double ratio = std::exp(log_tx);
            if (tail_exponent < 0.0)
                ratio *= std::pow((static_cast<double>(n) + 2.0) / (static_cast<double>(n) + 1.0),
                                  -tail_exponent);
            if (ratio < 1.0) {
                cert = c_tail * x_shift_factor * t_next / (1.0 - ratio);
                if (cert <= eps)
                    break;
            }
        } else if (tail_exponent > 1.0) {
            // Tx = 1 with a summable exponent: midpoint integral bound
            cert = c_tail * x_shift_factor *
                   std::pow(static_cast<double>(n) + 0.5, 1.0 - tail_exponent) /
                   (tail_exponent - 1.0);
            if (cert <= eps)
                break;
        }
        // else: the decay base rounded to 1 for nearly-equal parameters and
        // the exponent alone cannot certify a tail; run to the term cap and
        // report the (infinite) certificate honestly.
    }

    out.value = sum.acc;
    out.terms_used = n;
    out.truncation_error = cert + std::abs(sum.acc) * 1e-12;
    return out;
}

double phi2_closed_form(const WalkParams& params, double x) {
    if (params.d() != 2)
        throw DomainError("closed form requires d = 2");
    if (!(x >= 0.0) || x > 1.0)
        throw DomainError("x must lie in [0,1]");
    const double p1 = params.p(0), p2 = params.p(1);
    const double s1 = p1 - params.q(0), s2 = p2 - params.q(1);
    // radicand of 1 - 2x(p1p2+q1q2) + x^2 (p1p2-q1q2)^2 in its factored form
    // (1-x)(1-s1 s2 x) + ((s1-s2)/2)^2 x^2, which never cancels.
    const double half_gap = 0.5 * (s1 - s2);
    const double radicand = (1.0 - x) * (1.0 - s1 * s2 * x) + half_gap * half_gap * x * x;
    return 1.0 - std::sqrt(std::max(radicand, 0.0));
}

namespace {

// Occurrence-series enclosure at x = 1 when the decay base is exactly 1
// (equal parameters, d >= 4): windowed prefix plus two-sided envelope tails.
TailProbResult symmetric_series_tail_prob(const WalkParams& params, const DerivedConstants& dc) {
    const int d = params.d();
    const double alpha = dc.odds_root;
    const double s = 0.5 * (d - 1);

    long prefix_terms = 20'000;
    constexpr long kPrefixBudget = 150'000;

    // Tight lambda when it fits; widen (looser constant, smaller threshold)
    // for extreme odds before giving up.
    double lambda_up = 0.0;
    long n_upper = 0;
    for (double cand : {0.05, 0.2, 0.5, 0.8, 0.95}) {
        const long N = threshold_N(alpha, cand);
        if (N < kPrefixBudget) {
            lambda_up = cand;
            n_upper = N;
            break;
        }
    }
    if (lambda_up == 0.0)
        throw NumericFailure("parameters too extreme for a certified tail at decay base 1");

    // The lower tail constant needs n past threshold_L; pick the largest
    // lambda in a small grid that fits the budget, else settle for a zero
    // lower bound (still a valid enclosure, just wider).
    double lambda_low = 0.0;
    long n_lower = 0;
    for (double cand : {0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 0.9}) {
        const long L = threshold_L(alpha, cand);
        if (L < kPrefixBudget) {
            lambda_low = cand;
            n_lower = L;
            break;
        }
    }
    prefix_terms = std::max({prefix_terms, n_upper + 1, n_lower + 1});

    const auto lf = detail::log_factorial_table(prefix_terms);
    KahanSum prefix;
    for (long n = 1; n <= prefix_terms; ++n)
        prefix.add(std::exp(detail::log_rencontre_windowed(n, d, dc, lf.data())));

    const TailEnclosure ztail = polylog_tail(s, 1.0, prefix_terms + 1, 1e-12);
    const double upper_const = std::pow(M_constant(alpha, lambda_up) / std::sqrt(kTwoPi), d - 1);
    double lower_const = 0.0;
    if (lambda_low > 0.0)
        lower_const = std::pow(std::sqrt(kTwoPi) / std::exp(2.0), d) *
                      K_constant(alpha, d, lambda_low);

    const double slop = prefix.acc * 1e-10;
    const double varphi_lo = prefix.acc + lower_const * ztail.lower - slop;
    const double varphi_hi = prefix.acc + upper_const * ztail.upper + slop;

    TailProbResult out;
    out.method = TailMethod::SeriesAtOne;
    const double p_lo = 1.0 / (1.0 + varphi_hi);
    const double p_hi = 1.0 / (1.0 + varphi_lo);
    out.p_infinity = 0.5 * (p_lo + p_hi);
    out.error_bound = 0.5 * (p_hi - p_lo);
    return out;
}

} // namespace

TailProbResult no_rencontre_prob(const WalkParams& params, double eps) {
    const int d = params.d();
    TailProbResult out;

    if (d == 2) {
        out.method = TailMethod::ClosedFormD2;
        out.p_infinity = std::abs(params.p(0) - params.p(1));
        out.error_bound = 0.0;
        return out;
    }

    const DerivedConstants dc = derived_constants(params);
    if (dc.decay_is_one && d == 3) {
        // occurrence series diverges; meeting happens almost surely
        out.method = TailMethod::SeriesDivergence;
        out.p_infinity = 0.0;
        out.error_bound = 0.0;
        return out;
    }

    if (dc.decay_is_one)
        return symmetric_series_tail_prob(params, dc);

    const SeriesValue v = varphi_series(params, 1.0, 0, eps);
    out.method = TailMethod::SeriesAtOne;
    const double p_lo = 1.0 / (1.0 + v.value + v.truncation_error);
    const double p_hi = 1.0 / (1.0 + v.value);
    out.p_infinity = 0.5 * (p_lo + p_hi);
    out.error_bound = 0.5 * (p_hi - p_lo) + 1e-15;
    return out;
}

WitnessReport mean_divergence_witness(const WalkParams& params, std::span<const double> x_grid) {
    if (params.d() != 3)
        throw DomainError("divergence witness requires d = 3");
    if (!params.symmetric())
        throw DomainError("divergence witness requires equal parameters");

    const DerivedConstants dc = derived_constants(params);
    const double alpha = dc.odds_root;
    const double base = (alpha + 1.0) / std::sqrt(kTwoPi * alpha);
    const double upper_scale = base * base; // squared peak constant
    const double lower_scale =              // cubed off-peak constant
        std::pow(base * std::exp(-(alpha + 1.0) * (alpha + 1.0) / (2.0 * alpha)), 3);

    // Realize the shared validity threshold through the certified envelopes:
    // the upper side needs (M/sqrt(2pi))^2 <= 2 * upper_scale, i.e.
    // (1-lambda)^-2 <= 2; the lower side needs the envelope constant to reach
    // lower_scale / 2, which holds once lambda is small enough.
    const double lambda_up = 0.25;
    if (std::pow(M_constant(alpha, lambda_up) / std::sqrt(kTwoPi), 2) > 2.0 * upper_scale)
        throw NumericFailure("upper envelope constant misses its coefficient bound");
    double lambda_low = 0.0;
    for (int k = 1; k <= 40; ++k) {
        const double cand = std::ldexp(1.0, -k);
        if (std::pow(std::sqrt(kTwoPi) / std::exp(2.0), 3) * K_constant(alpha, 3, cand) >=
            0.5 * lower_scale) {
            lambda_low = cand;
            break;
        }
    }
    if (lambda_low == 0.0)
        throw NumericFailure("no lambda realizes the lower coefficient bound");

    WitnessReport report;
    report.threshold_n = std::max(threshold_N(alpha, lambda_up), threshold_L(alpha, lambda_low));
    report.upper_coeff_scale = upper_scale;
    report.lower_coeff_scale = lower_scale;

    const auto lf = detail::log_factorial_table(report.threshold_n);
    KahanSum prefix;
    for (long n = 1; n < report.threshold_n; ++n)
        prefix.add(std::exp(detail::log_rencontre_windowed(n, 3, dc, lf.data())));
    report.prefix_constant = 1.0 + prefix.acc;

    report.points.reserve(x_grid.size());
    for (double x : x_grid) {
        if (!(x >= 0.0) || x >= 1.0)
            throw DomainError("witness grid points must lie in [0,1)");
        WitnessPoint pt;
        pt.x = x;
        if (x > 0.0) {
            const double numer = 0.5 * lower_scale *
                                 std::exp(static_cast<double>(report.threshold_n - 1) *
                                          std::log(x)) /
                                 (1.0 - x);
            const double denom =
                report.prefix_constant - 2.0 * upper_scale * std::log1p(-x);
            pt.lower_bound = numer / (denom * denom);
        }
        report.points.push_back(pt);
    }
    return report;
}

} // namespace rencontre
