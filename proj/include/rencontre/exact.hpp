#pragma once

#include <optional>
#include <vector>

#include <gmpxx.h>

#include "rencontre/model.hpp"

namespace rencontre {

enum class NumericMode { FloatLog, ExactRational };

/// Probabilities r_n of a simultaneous meeting of all d walks at time n,
/// irrespective of earlier meetings: r_n = sum_k prod_j C(n,k) p_j^k q_j^{n-k}.
struct RencontreSequence {
    NumericMode mode = NumericMode::FloatLog;
    long n_max = 0;
    std::vector<double> r;       // r[n], n = 1..n_max ([0] unused)
    std::vector<double> log_r;   // log r[n]
    std::vector<mpq_class> r_exact; // exact mode only
};

/// First-meeting distribution f_n = P(J = n) via the renewal identity
/// f_n = r_n - sum_{k<n} f_k r_{n-k}, with running mass and the defect
/// 1 - sum f_n (the probability no meeting happened by n_max).
struct FirstPassageSequence {
    NumericMode mode = NumericMode::FloatLog;
    long n_max = 0;
    std::vector<double> f;          // f[n], n = 1..n_max
    std::vector<double> cumulative; // running sum
    double defect_at_horizon = 1.0;
    std::vector<mpq_class> f_exact;
    std::vector<mpq_class> cumulative_exact;
    mpq_class defect_exact;
};

inline constexpr long kDefaultExactCap = 256;
inline constexpr long kInclusionExclusionCap = 20;

double rencontre_prob(const WalkParams& params, long n);
mpq_class rencontre_prob_exact(const RationalWalkParams& params, long n);

RencontreSequence rencontre_sequence(const WalkParams& params, long n_max);
RencontreSequence rencontre_sequence(const RationalWalkParams& params, long n_max,
                                     long exact_cap = kDefaultExactCap);

FirstPassageSequence first_passage_seq(const WalkParams& params, long n_max);
FirstPassageSequence first_passage_seq(const RationalWalkParams& params, long n_max,
                                       long exact_cap = kDefaultExactCap);

/// First-meeting probability by signed products over integer compositions of
/// n (the first-occurrence decomposition). Exponential in n; capped at 20.
mpq_class first_passage_inclusion_exclusion(const RationalWalkParams& params, long n);

/// Index maximizing C(n,k) alpha^k over k in {0..n}: floor(alpha(n+1)/(alpha+1)).
/// On exact ties both m-1 and m attain the maximum; the floor (m) is returned.
long binomial_weight_argmax(long n, double alpha);

/// log of sum_k C(n,k)^d P^k via the multiplicative term recurrence
/// t_{k+1} = t_k ((n-k)/(k+1))^d P with log-sum-exp accumulation.
double coefficient_sum(long n, double odds_product, int d);

enum class TrendOffset { Center, MinusSqrtN, PlusSqrtN };

/// C(n,k) alpha^k at k = floor(alpha(n+1)/(alpha+1) + offset), divided by its
/// square-root asymptote const * n^{-1/2} (1+alpha)^n. Tends to 1 as n grows.
double stirling_trend(long n, double alpha, TrendOffset offset);

namespace detail {

/// lf[m] = log(m!) for m = 0..n_max, accumulated in long double.
std::vector<double> log_factorial_table(long n_max);

/// log r_n from a window around the dominant k, with geometric flank bounds
/// folded in below 1e-25 relative. lf must be valid through index n.
double log_rencontre_windowed(long n, int d, const DerivedConstants& dc, const double* lf);

/// log r_n for n = 1..n_max ([0] unused).
std::vector<double> log_rencontre_sequence(const WalkParams& params, long n_max);

} // namespace detail

} // namespace rencontre
