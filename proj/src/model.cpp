#include "rencontre/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

namespace rencontre {

namespace {

bool all_equal(const std::vector<double>& p) {
    return std::all_of(p.begin(), p.end(), [&](double x) { return x == p.front(); });
}

} // namespace

WalkParams::WalkParams(int d, std::vector<double> p) : d_(d), p_(std::move(p)) {
    if (d_ < 2)
        throw DimensionTooSmallError("d must be at least 2, got " + std::to_string(d_));
    if (p_.size() != static_cast<std::size_t>(d_))
        throw DimensionMismatchError("expected " + std::to_string(d_) + " probabilities, got " +
                                     std::to_string(p_.size()));
    for (std::size_t j = 0; j < p_.size(); ++j) {
        if (!(p_[j] > 0.0) || !(p_[j] < 1.0))
            throw ProbabilityRangeError("p[" + std::to_string(j + 1) +
                                        "] must lie strictly in (0,1)");
    }
    symmetric_ = all_equal(p_);
}

WalkParams new_walk_params(int d, std::vector<double> p) {
    return WalkParams(d, std::move(p));
}

DerivedConstants derived_constants(const WalkParams& params) {
    // Products in log domain: d is unbounded by the API, and prod q_j
    // underflows long before the bounds machinery stops being meaningful.
    long double log_p = 0.0L, log_q = 0.0L;
    for (int j = 0; j < params.d(); ++j) {
        log_p += std::log(static_cast<long double>(params.p(j)));
        log_q += std::log(static_cast<long double>(params.q(j)));
    }
    const long double log_odds = log_p - log_q;
    const int d = params.d();

    DerivedConstants out;
    out.log_odds_product = static_cast<double>(log_odds);
    out.log_zero_step_prob = static_cast<double>(log_q);
    out.odds_product = static_cast<double>(std::exp(log_odds));
    out.zero_step_prob = static_cast<double>(std::exp(log_q));
    out.odds_root = static_cast<double>(std::exp(log_odds / d));
    out.decay_is_one = params.symmetric();
    if (out.decay_is_one) {
        out.decay_base = 1.0;
    } else {
        // T = ((prod p)^{1/d} + (prod q)^{1/d})^d, the algebraically identical
        // form of Q (1 + P^{1/d})^d that never leaves [0,1].
        const long double gp = std::exp(log_p / d);
        const long double gq = std::exp(log_q / d);
        out.decay_base = static_cast<double>(std::pow(gp + gq, static_cast<long double>(d)));
    }
    return out;
}

double amgm_gap(const WalkParams& params) {
    if (params.symmetric())
        return 0.0;
    long double log_p = 0.0L, log_q = 0.0L;
    for (int j = 0; j < params.d(); ++j) {
        log_p += std::log(static_cast<long double>(params.p(j)));
        log_q += std::log(static_cast<long double>(params.q(j)));
    }
    const int d = params.d();
    return static_cast<double>(1.0L - (std::exp(log_p / d) + std::exp(log_q / d)));
}

RationalWalkParams::RationalWalkParams(int d, std::vector<mpq_class> p)
    : d_(d), p_(std::move(p)) {
    if (d_ < 2)
        throw DimensionTooSmallError("d must be at least 2, got " + std::to_string(d_));
    if (p_.size() != static_cast<std::size_t>(d_))
        throw DimensionMismatchError("expected " + std::to_string(d_) + " probabilities, got " +
                                     std::to_string(p_.size()));
    common_den_ = 1;
    q_.reserve(p_.size());
    for (std::size_t j = 0; j < p_.size(); ++j) {
        p_[j].canonicalize();
        if (p_[j] <= 0 || p_[j] >= 1)
            throw ProbabilityRangeError("p[" + std::to_string(j + 1) +
                                        "] must lie strictly in (0,1)");
        q_.push_back(1 - p_[j]);
        q_.back().canonicalize();
        mpz_class den = p_[j].get_den();
        mpz_lcm(common_den_.get_mpz_t(), common_den_.get_mpz_t(), den.get_mpz_t());
        den = q_.back().get_den();
        mpz_lcm(common_den_.get_mpz_t(), common_den_.get_mpz_t(), den.get_mpz_t());
    }
    symmetric_ = std::all_of(p_.begin(), p_.end(),
                             [&](const mpq_class& x) { return x == p_.front(); });
}

RationalWalkParams RationalWalkParams::parse(int d, const std::vector<std::string>& literals) {
    std::vector<mpq_class> p;
    p.reserve(literals.size());
    for (const auto& lit : literals)
        p.push_back(parse_probability_rational(lit));
    return RationalWalkParams(d, std::move(p));
}

WalkParams RationalWalkParams::to_float() const {
    std::vector<double> p;
    p.reserve(p_.size());
    for (const auto& x : p_)
        p.push_back(x.get_d());
    return WalkParams(d_, std::move(p));
}

mpq_class parse_probability_rational(const std::string& literal) {
    const auto bad = [&]() {
        return ProbabilityRangeError("cannot parse probability literal '" + literal + "'");
    };
    if (literal.empty())
        throw bad();
    const auto slash = literal.find('/');
    if (slash != std::string::npos) {
        mpq_class q;
        if (q.set_str(literal, 10) != 0)
            throw bad();
        q.canonicalize();
        return q;
    }
    // Decimal string: digits with one optional point. "0.3" -> 3/10 exactly.
    std::string digits;
    long frac_digits = -1;
    for (char c : literal) {
        if (c == '.') {
            if (frac_digits >= 0)
                throw bad();
            frac_digits = 0;
            continue;
        }
        if (c < '0' || c > '9')
            throw bad();
        digits.push_back(c);
        if (frac_digits >= 0)
            ++frac_digits;
    }
    if (digits.empty())
        throw bad();
    mpz_class num(digits, 10);
    mpz_class den = 1;
    for (long i = 0; i < std::max(frac_digits, 0L); ++i)
        den *= 10;
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

} // namespace rencontre
