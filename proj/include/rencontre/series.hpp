#pragma once

#include <span>
#include <vector>

#include "rencontre/exact.hpp"
#include "rencontre/model.hpp"

namespace rencontre {

enum class SeriesOutcome { Converged, Divergent };

/// A truncated series value with a one-sided tail certificate: whenever the
/// outcome is Converged, the true sum lies in [value, value + truncation_error]
/// up to floating slop already folded into truncation_error.
struct SeriesValue {
    SeriesOutcome outcome = SeriesOutcome::Converged;
    double value = 0.0;
    double truncation_error = 0.0;
    long terms_used = 0;
};

/// Rigorous enclosure of sum_{n >= n0} n^{-s} x^n. For x < 1 the remainder is
/// boxed by a geometric ratio bound; at x = 1 (s > 1) by midpoint/trapezoid
/// integral comparison. Divergent inputs (x = 1, s <= 1) are tagged, never
/// returned as a number.
struct TailEnclosure {
    SeriesOutcome outcome = SeriesOutcome::Converged;
    double lower = 0.0;
    double upper = 0.0;
    long terms_used = 0;
};

TailEnclosure polylog_tail(double s, double x, long n0, double eps = 1e-12,
                           long max_terms = 8'000'000);

/// Truncated evaluation of the occurrence generating function and its
/// derivative combinations at x in [0,1]:
///   order 0: sum r_n x^n          order 1: sum n r_n x^{n-1}
///   order 2: sum n^2 r_n x^{n-1}  (the phi' + x phi'' combination)
/// At x = 1 the series converges iff T < 1, or T = 1 and d >= 2*order + 4.
/// Stops at max_terms with an honest certificate when eps is unreachable
/// (decay base at or near 1: the tail shrinks only polynomially).
SeriesValue varphi_series(const WalkParams& params, double x, int order,
                          double eps = 1e-10, long max_terms = 200'000);

/// d = 2 closed form: phi_2(x) = 1 - sqrt(1 - 2x(p1p2+q1q2) + x^2(p1p2-q1q2)^2).
double phi2_closed_form(const WalkParams& params, double x);

enum class TailMethod { ClosedFormD2, SeriesAtOne, SeriesDivergence };

struct TailProbResult {
    double p_infinity = 0.0;
    TailMethod method = TailMethod::SeriesAtOne;
    double error_bound = 0.0;
};

/// P(no rencontre ever). Total over all parameters:
///   d = 2            -> |p1 - p2| exactly
///   d = 3, equal p   -> 0 (the occurrence series diverges; meeting is a.s.)
///   otherwise        -> 1 / (1 + sum r_n), the Abel limit evaluated at x = 1
TailProbResult no_rencontre_prob(const WalkParams& params, double eps = 1e-10);

struct WitnessPoint {
    double x = 0.0;
    double lower_bound = 0.0;
};

/// Certified lower bounds on the derivative ratio phi' / (1 + phi)^2 for
/// d = 3 with equal parameters, of the form
///   (lower_scale/2) x^{threshold-1} / (1-x) / (prefix - 2 upper_scale log(1-x))^2.
/// The bound grows without limit as x -> 1-, witnessing an infinite mean.
struct WitnessReport {
    long threshold_n = 0;         // joint validity threshold of both coefficient bounds
    double upper_coeff_scale = 0; // squared peak constant of the coefficient sum
    double lower_coeff_scale = 0; // cubed off-peak constant
    double prefix_constant = 0;   // 1 + sum of the occurrence terms below the threshold
    std::vector<WitnessPoint> points;
};

WitnessReport mean_divergence_witness(const WalkParams& params, std::span<const double> x_grid);

} // namespace rencontre
