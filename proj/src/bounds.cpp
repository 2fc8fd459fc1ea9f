#include "rencontre/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rencontre/exact.hpp"

namespace rencontre {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;

double require_lambda(double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw DomainError("lambda must lie strictly in (0,1)");
    return lambda;
}

double require_alpha(double alpha) {
    if (!(alpha > 0.0))
        throw DomainError("alpha must be positive");
    return alpha;
}

// floor with a snap to nearby integers: threshold ratios like alpha/lambda are
// exact integers for many parameter sets (alpha = 1, lambda = 1/k), and float
// rounding must not land the floor one short of the exact value. Snapping up
// on a near-tie only enlarges the threshold, which keeps every bound valid.
long floor_snapped(long double x) {
    const long double nearest = std::floor(x + 0.5L);
    if (std::abs(x - nearest) <= 1e-9L * std::max(1.0L, std::abs(x)))
        return static_cast<long>(nearest);
    return static_cast<long>(std::floor(x));
}

} // namespace

LambdaConfig make_lambda_config(double lambda1, double lambda2) {
    return LambdaConfig{require_lambda(lambda1), require_lambda(lambda2)};
}

long threshold_N(double alpha, double lambda) {
    require_alpha(alpha);
    require_lambda(lambda);
    const long double a = alpha, l = lambda;
    const long n1 = floor_snapped(a / l) + 1;
    const long n2 = floor_snapped(1.0L / (l * a)) + 1;
    return std::max(n1, n2);
}

long threshold_L(double alpha, double lambda) {
    require_alpha(alpha);
    require_lambda(lambda);
    const long double a = alpha, l = lambda;
    const long double root = std::sqrt((a + 1.0L) * (a + 1.0L) + 4.0L * l * a);
    const long double u = ((a + 1.0L) + root) / (2.0L * l * a);
    const long double v = ((a + 1.0L) + root) / (2.0L * l);
    const long double big = std::max(u * u, v * v);
    if (big > 9.0e17L)
        throw DomainError("lower-envelope threshold overflows");
    return std::max(floor_snapped(u * u), floor_snapped(v * v)) + 1;
}

double M_constant(double alpha, double lambda) {
    require_alpha(alpha);
    require_lambda(lambda);
    return (alpha + 1.0) / std::sqrt(alpha) / (1.0 - lambda);
}

double C1_constant(double alpha, double lambda) {
    require_alpha(alpha);
    require_lambda(lambda);
    const double a = alpha, l = lambda;
    const double lead = std::max(4.0, (a + 1.0) * (a + 1.0) / (a * (1.0 + l * a)));
    const double expo = -0.5 * (1.0 + l * a) / ((1.0 - l) * a) *
                        ((a + 1.0) * (a + 1.0) + l * a / (1.0 + l * a));
    return lead * std::exp(expo);
}

double C2_constant(double alpha, double lambda) {
    require_alpha(alpha);
    require_lambda(lambda);
    const double a = alpha, l = lambda;
    const double lead = std::max(4.0, (a + 1.0) * (a + 1.0) / (a + l));
    const double expo = -0.5 * (a + l) / ((1.0 - l) * a * a) *
                        ((a + 1.0) * (a + 1.0) + l * a * a / (a + l));
    return lead * std::exp(expo);
}

double K_constant(double alpha, int d, double lambda) {
    if (d < 3)
        throw DimensionTooSmallError("the lower envelope needs d >= 3");
    const double a = alpha, l = lambda;
    return ((1.0 - l) * a + 1.0) / (a + 1.0) * std::pow(C1_constant(a, l), d) +
           std::pow(C2_constant(a, l), d);
}

EnvelopeConstants envelope_constants(double alpha, double lambda, int d) {
    if (d < 3)
        throw DimensionTooSmallError("envelope constants need d >= 3");
    EnvelopeConstants out;
    out.alpha = require_alpha(alpha);
    out.lambda = require_lambda(lambda);
    out.N = threshold_N(alpha, lambda);
    out.L = threshold_L(alpha, lambda);
    out.M = M_constant(alpha, lambda);
    out.C1 = C1_constant(alpha, lambda);
    out.C2 = C2_constant(alpha, lambda);
    out.K = K_constant(alpha, d, lambda);
    return out;
}

CoeffBounds coeff_bounds_check(long n, double odds_product, int d, double lambda) {
    if (d < 3)
        throw DimensionTooSmallError("coefficient bounds need d >= 3");
    const double alpha = std::pow(odds_product, 1.0 / d);
    const long N = threshold_N(alpha, lambda);
    const long L = threshold_L(alpha, lambda);
    if (n < std::max(N, L))
        throw DomainError("n = " + std::to_string(n) + " is below the validity threshold " +
                          std::to_string(std::max(N, L)));

    const long double common = -0.5L * (d - 1) * std::log(static_cast<long double>(n)) +
                               static_cast<long double>(d) * n *
                                   std::log1p(static_cast<long double>(alpha));
    CoeffBounds out;
    out.value = coefficient_sum(n, odds_product, d);
    out.upper = static_cast<double>(
        (d - 1) * std::log(static_cast<long double>(M_constant(alpha, lambda)) /
                           std::sqrt(static_cast<long double>(kTwoPi))) +
        common);
    out.lower = static_cast<double>(
        d * std::log(std::sqrt(static_cast<long double>(kTwoPi)) / std::exp(2.0L)) +
        std::log(static_cast<long double>(K_constant(alpha, d, lambda))) + common);
    return out;
}

SeriesValue envelope_series(double x, const WalkParams& params, double lambda,
                            EnvelopeKind kind, double eps) {
    if (!(x >= 0.0) || x > 1.0)
        throw DomainError("x must lie in [0,1]");
    require_lambda(lambda);
    const int d = params.d();
    if (d < 3)
        throw DimensionTooSmallError("envelope series need d >= 3");

    const bool upper = kind == EnvelopeKind::UpperPhi || kind == EnvelopeKind::UpperPhiPrime ||
                       kind == EnvelopeKind::UpperSecondMoment;
    const int order = kind == EnvelopeKind::UpperPhi || kind == EnvelopeKind::LowerPhi ? 0
                      : kind == EnvelopeKind::UpperSecondMoment                        ? 2
                                                                                       : 1;
    const int shift = order == 0 ? 0 : 1;

    const DerivedConstants dc = derived_constants(params);
    const double alpha = dc.odds_root;
    const long thr = upper ? threshold_N(alpha, lambda) : threshold_L(alpha, lambda);
    const double constant =
        upper ? std::pow(M_constant(alpha, lambda) / std::sqrt(kTwoPi), d - 1)
              : std::pow(std::sqrt(kTwoPi) / std::exp(2.0), d) * K_constant(alpha, d, lambda);

    SeriesValue out;

    // exact prefix below the validity threshold
    const auto lf = detail::log_factorial_table(thr);
    double prefix = 0.0, comp = 0.0;
    for (long n = 1; n < thr; ++n) {
        double term;
        if (x == 0.0) {
            if (n != shift)
                continue;
            term = std::exp(detail::log_rencontre_windowed(n, d, dc, lf.data()));
            if (order == 2)
                term *= static_cast<double>(n); // n^2 x^{n-1} at x=0: n=1 only
        } else {
            term = std::exp(detail::log_rencontre_windowed(n, d, dc, lf.data()) +
                            order * std::log(static_cast<double>(n)) +
                            static_cast<double>(n - shift) * std::log(x));
        }
        const double y = term - comp;
        const double t = prefix + y;
        comp = (t - prefix) - y;
        prefix = t;
    }

    if (x == 0.0) {
        out.value = prefix;
        out.terms_used = thr - 1;
        return out;
    }

    const double s_eff = 0.5 * (d - 1) - order;
    const double y = dc.decay_base * x;
    TailEnclosure tail;
    if (y >= 1.0) {
        tail = polylog_tail(s_eff, 1.0, thr, eps);
    } else {
        tail = polylog_tail(s_eff, y, thr, eps);
    }
    if (tail.outcome == SeriesOutcome::Divergent) {
        out.outcome = SeriesOutcome::Divergent;
        return out;
    }

    const double x_shift = shift ? 1.0 / x : 1.0;
    out.value = prefix + constant * x_shift * (upper ? tail.upper : tail.lower);
    out.truncation_error =
        constant * x_shift * (tail.upper - tail.lower) + std::abs(out.value) * 1e-12;
    out.terms_used = thr - 1 + tail.terms_used;
    return out;
}

MeanClass cond_exp_classification(const WalkParams& params) {
    if (params.d() < 3)
        throw DimensionTooSmallError("conditional-mean classification needs d >= 3");
    const int d = params.d();
    if (params.symmetric() && d >= 3 && d <= 5)
        return MeanClass::Infinite;
    return MeanClass::Finite;
}

BoundsReport cond_exp_bounds(const WalkParams& params, const LambdaConfig& config) {
    if (params.d() < 3)
        throw DimensionTooSmallError(
            "conditional-mean bounds need d >= 3 (for d = 2 the mean is unconditionally "
            "infinite)");
    require_lambda(config.lambda1);
    require_lambda(config.lambda2);

    const int d = params.d();
    const DerivedConstants dc = derived_constants(params);

    BoundsReport report;
    report.classification = cond_exp_classification(params);
    report.upper_constants = envelope_constants(dc.odds_root, config.lambda1, d);
    report.lower_constants = envelope_constants(dc.odds_root, config.lambda2, d);
    if (report.classification == MeanClass::Infinite)
        return report;

    const SeriesValue ub_phi = envelope_series(1.0, params, config.lambda1, EnvelopeKind::UpperPhi);
    const SeriesValue lb_phi = envelope_series(1.0, params, config.lambda2, EnvelopeKind::LowerPhi);
    const SeriesValue ub_phi1 =
        envelope_series(1.0, params, config.lambda1, EnvelopeKind::UpperPhiPrime);
    const SeriesValue lb_phi1 =
        envelope_series(1.0, params, config.lambda2, EnvelopeKind::LowerPhiPrime);
    for (const SeriesValue* sv : {&ub_phi, &lb_phi, &ub_phi1, &lb_phi1})
        if (sv->outcome == SeriesOutcome::Divergent)
            throw NumericFailure("envelope series diverged under a finite classification");

    const double A_up = ub_phi1.value, B_lo = lb_phi.value;
    const double A_lo = lb_phi1.value, B_up = ub_phi.value;
    report.upper_E = A_up / (B_lo * (1.0 + B_lo));
    report.lower_E = A_lo / (B_up * (1.0 + B_up));

    // First-order propagation of the envelope truncation widths.
    const auto ratio_err = [](double A, double errA, double B, double errB) {
        const double den = B * (1.0 + B);
        return errA / den + errB * A * (1.0 + 2.0 * B) / (den * den);
    };
    report.upper_truncation_error =
        ratio_err(A_up, ub_phi1.truncation_error, B_lo, lb_phi.truncation_error);
    report.lower_truncation_error =
        ratio_err(A_lo, lb_phi1.truncation_error, B_up, ub_phi.truncation_error);
    return report;
}

TailCondExpResult tail_cond_exp_upper(const WalkParams& params, double t,
                                      const LambdaConfig& config, int subtrahend_factor) {
    if (!(t > 1.0))
        throw DomainError("t must exceed 1");
    if (subtrahend_factor != 1 && subtrahend_factor != 2)
        throw DomainError("subtrahend factor must be 1 or 2");
    if (cond_exp_classification(params) == MeanClass::Infinite)
        throw DomainError("tail conditional bound needs a finite classification");

    const SeriesValue second =
        envelope_series(1.0, params, config.lambda1, EnvelopeKind::UpperSecondMoment);
    TailCondExpResult out;
    if (second.outcome == SeriesOutcome::Divergent) {
        // Equal parameters with d in {6,7}: the second-moment envelope (and
        // the true conditional second moment) diverge, so no finite bound.
        out.outcome = SeriesOutcome::Divergent;
        return out;
    }
    const SeriesValue lbp =
        envelope_series(1.0, params, config.lambda2, EnvelopeKind::LowerPhiPrime);
    const SeriesValue ubphi = envelope_series(1.0, params, config.lambda1, EnvelopeKind::UpperPhi);
    if (lbp.outcome == SeriesOutcome::Divergent || ubphi.outcome == SeriesOutcome::Divergent) {
        out.outcome = SeriesOutcome::Divergent;
        return out;
    }

    const double pref = t * t / ((t - 1.0) * (t - 1.0));
    out.value = pref * (second.value / lbp.value -
                        subtrahend_factor * lbp.value / (1.0 + ubphi.value));
    return out;
}

std::vector<Table1Result> run_table1() {
    std::vector<Table1Result> results;
    for (const Table1Row& row : table1_rows()) {
        const WalkParams params(static_cast<int>(row.p.size()), row.p);
        Table1Result res;
        res.fixture = &row;
        res.report = cond_exp_bounds(params, make_lambda_config(row.lambda1, row.lambda2));
        res.abs_diff_lower = std::abs(res.report.lower_E - row.paper_lower);
        res.abs_diff_upper = std::abs(res.report.upper_E - row.paper_upper);
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace rencontre
