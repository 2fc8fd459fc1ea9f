#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>

#include "rencontre/errors.hpp"

namespace rencontre {

/// Parameters of d independent Bernoulli walks: dimension d >= 2 and success
/// probabilities p_1..p_d, each strictly inside (0,1). Immutable after
/// construction; safe to share across threads.
class WalkParams {
public:
    WalkParams(int d, std::vector<double> p);

    int d() const { return d_; }
    const std::vector<double>& p() const { return p_; }
    double p(int j) const { return p_[static_cast<std::size_t>(j)]; }
    double q(int j) const { return 1.0 - p_[static_cast<std::size_t>(j)]; }

    /// True when every p_j compares exactly equal. Deliberately not a
    /// tolerance test: the almost-sure-rencontre and infinite-mean branches
    /// hinge on this exact condition, and inputs are user-given decimals.
    bool symmetric() const { return symmetric_; }

private:
    int d_;
    std::vector<double> p_;
    bool symmetric_;
};

WalkParams new_walk_params(int d, std::vector<double> p);

/// Scalar constants shared by the series and bounds machinery:
///   odds_product   P = prod_j p_j / q_j
///   zero_step_prob Q = prod_j q_j
///   decay_base     T = Q (1 + P^{1/d})^d, the geometric decay base of the
///                  rencontre probabilities; T = 1 exactly for equal p_j
///   odds_root      alpha = P^{1/d}
struct DerivedConstants {
    double odds_product;
    double zero_step_prob;
    double decay_base;
    double odds_root;
    double log_odds_product;
    double log_zero_step_prob;
    bool decay_is_one; // set iff the params are symmetric
};

DerivedConstants derived_constants(const WalkParams& params);

/// 1 - ((prod p)^{1/d} + (prod q)^{1/d}); zero iff all p_j equal.
double amgm_gap(const WalkParams& params);

/// Exact-rational mirror of WalkParams for the oracle path. Probabilities are
/// kept as canonical mpq rationals so downstream identities can be checked
/// with no float contamination.
class RationalWalkParams {
public:
    RationalWalkParams(int d, std::vector<mpq_class> p);

    /// Accepts "a/b" fractions and plain decimal strings ("0.3" -> 3/10).
    static RationalWalkParams parse(int d, const std::vector<std::string>& literals);

    int d() const { return d_; }
    const std::vector<mpq_class>& p() const { return p_; }
    const std::vector<mpq_class>& q() const { return q_; }
    bool symmetric() const { return symmetric_; }

    /// lcm of all p_j/q_j denominators (the "common denominator" whose dn-th
    /// power bounds exact r_n denominators).
    const mpz_class& common_denominator() const { return common_den_; }

    WalkParams to_float() const;

private:
    int d_;
    std::vector<mpq_class> p_;
    std::vector<mpq_class> q_;
    mpz_class common_den_;
    bool symmetric_;
};

mpq_class parse_probability_rational(const std::string& literal);

} // namespace rencontre
