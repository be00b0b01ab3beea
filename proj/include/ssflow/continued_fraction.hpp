#pragma once

// Continued fraction expansion of a positive real, with exact integer
// convergents. Two input kinds are supported: a binary64 literal (expanded as
// the exact dyadic rational it represents) and a quadratic irrational
// (P + sqrt(d)) / Q expanded symbolically with integer arithmetic.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ssflow/errors.hpp"

namespace ssflow {

/// An irrational (or not) positive number in one of the supported forms.
struct Irrational {
    enum class Kind { literal, quadratic };

    Kind kind = Kind::literal;
    double literal = 0.0;
    // quadratic form (P + sqrt(d)) / Q, d > 0 not a perfect square
    std::int64_t P = 0;
    std::int64_t d = 0;
    std::int64_t Q = 1;

    static Irrational from_double(double x) {
        Irrational r;
        r.kind = Kind::literal;
        r.literal = x;
        return r;
    }

    static Irrational quadratic(std::int64_t P, std::int64_t d, std::int64_t Q) {
        if (Q == 0 || d <= 0) throw ValidationError("alpha", "quadratic irrational needs Q != 0 and d > 0");
        auto s = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(d)));
        while (s * s > d) --s;
        while ((s + 1) * (s + 1) <= d) ++s;
        if (s * s == d) return from_double((static_cast<double>(P) + static_cast<double>(s)) / static_cast<double>(Q));
        Irrational r;
        r.kind = Kind::quadratic;
        r.P = P;
        r.d = d;
        r.Q = Q;
        return r;
    }

    static Irrational golden() { return quadratic(1, 5, 2); }
    static Irrational sqrt_of(std::int64_t d) { return quadratic(0, d, 1); }

    long double value_ld() const {
        if (kind == Kind::literal) return literal;
        return (static_cast<long double>(P) + std::sqrt(static_cast<long double>(d))) / static_cast<long double>(Q);
    }
    double value() const { return static_cast<double>(value_ld()); }

    /// n alpha - m without cancellation for quadratic irrationals:
    /// with A = n P - m Q, A + n sqrt(d) = (n^2 d - A^2) / (n sqrt(d) - A).
    long double offset(std::int64_t n, std::int64_t m) const {
        if (kind == Kind::literal) return static_cast<long double>(n) * literal - static_cast<long double>(m);
        __extension__ typedef __int128 wide;
        const wide A = static_cast<wide>(n) * P - static_cast<wide>(m) * Q;
        const long double root = std::sqrt(static_cast<long double>(d));
        const long double nr = static_cast<long double>(n) * root;
        long double num = static_cast<long double>(A) + nr;
        wide nn = 0, nnd = 0, aa = 0;
        if ((A >= 0) != (n >= 0) && !__builtin_mul_overflow(static_cast<wide>(n), static_cast<wide>(n), &nn) &&
            !__builtin_mul_overflow(nn, static_cast<wide>(d), &nnd) && !__builtin_mul_overflow(A, A, &aa)) {
            num = static_cast<long double>(nnd - aa) / (nr - static_cast<long double>(A));
        }
        return num / static_cast<long double>(Q);
    }

    std::string describe() const {
        if (kind == Kind::literal) return "literal";
        if (P == 1 && d == 5 && Q == 2) return "golden";
        if (P == 0 && Q == 1) return "sqrt(" + std::to_string(d) + ")";
        return "(" + std::to_string(P) + "+sqrt(" + std::to_string(d) + "))/" + std::to_string(Q);
    }
};

enum class CfMode {
    /// Stop once further partial quotients of a literal no longer describe the
    /// real number the literal approximates.
    stop_at_resolution,
    /// Expand the literal as the exact dyadic rational it is.
    exact_rational,
};

enum class CfStop { depth, rational, resolution, overflow };

struct ContinuedFraction {
    double alpha = 0.0;
    std::vector<std::int64_t> partial_quotients;  // a_0 .. a_n
    std::vector<std::int64_t> p;                  // p_0 .. p_n
    std::vector<std::int64_t> q;                  // q_0 .. q_n
    // q'_0 .. q'_{n+1}; q'_0 = 1, q'_k = alpha_1 * ... * alpha_k. The last entry
    // is +inf when the expansion terminated (rational input).
    std::vector<double> q_primes;
    CfStop stop = CfStop::depth;

    std::size_t size() const { return partial_quotients.size(); }
    bool early_stop() const { return stop == CfStop::resolution || stop == CfStop::overflow; }
    bool rational() const { return stop == CfStop::rational; }

    /// a_k for k in [0, n].
    std::int64_t a(std::size_t k) const { return partial_quotients.at(k); }

    // k = -1, -2 give the seeds p_{-2} = q_{-1} = 0, p_{-1} = q_{-2} = 1.
    std::int64_t p_at(long k) const {
        if (k == -2) return 0;
        if (k == -1) return 1;
        return p.at(static_cast<std::size_t>(k));
    }
    std::int64_t q_at(long k) const {
        if (k == -2) return 1;
        if (k == -1) return 0;
        return q.at(static_cast<std::size_t>(k));
    }
    double q_prime(std::size_t k) const { return q_primes.at(k); }
};

namespace detail {

__extension__ typedef __int128 i128;

inline std::int64_t floor_div(i128 a, i128 b) {
    i128 quot = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --quot;
    return static_cast<std::int64_t>(quot);
}

inline std::int64_t isqrt(std::int64_t d) {
    auto s = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(d)));
    while (s * s > d) --s;
    while ((s + 1) * (s + 1) <= d) ++s;
    return s;
}

// Appends a_k and the convergent p_k/q_k; false on int64 overflow.
inline bool push_convergent(ContinuedFraction& cf, std::int64_t a_k) {
    const long k = static_cast<long>(cf.size());
    std::int64_t pk = 0, qk = 0, tp = 0, tq = 0;
    if (__builtin_mul_overflow(a_k, cf.p_at(k - 1), &tp) || __builtin_add_overflow(tp, cf.p_at(k - 2), &pk) ||
        __builtin_mul_overflow(a_k, cf.q_at(k - 1), &tq) || __builtin_add_overflow(tq, cf.q_at(k - 2), &qk))
        return false;
    cf.partial_quotients.push_back(a_k);
    cf.p.push_back(pk);
    cf.q.push_back(qk);
    return true;
}

inline double unit_in_last_place(double x) {
    return std::nextafter(x, std::numeric_limits<double>::infinity()) - x;
}

}  // namespace detail

/// Expands alpha into at most `depth` partial quotients a_0 .. a_{depth-1}.
inline ContinuedFraction expand_cf(const Irrational& alpha, std::size_t depth,
                                   CfMode mode = CfMode::stop_at_resolution) {
    using detail::i128;
    if (depth < 1) throw PreconditionError("expand_cf: depth must be >= 1");
    const double value = alpha.value();
    if (!(value > 0.0) || !std::isfinite(value)) throw PreconditionError("expand_cf: alpha must be positive and finite");

    ContinuedFraction cf;
    cf.alpha = value;
    cf.q_primes.push_back(1.0);
    long double q_prime = 1.0L;

    if (alpha.kind == Irrational::Kind::quadratic) {
        // Normalize to Q | d - P^2.
        i128 P = alpha.P, d = alpha.d, Q = alpha.Q;
        if ((d - P * P) % Q != 0) {
            const i128 absQ = Q < 0 ? -Q : Q;
            P *= absQ;
            d *= absQ * absQ;
            Q *= absQ;
        }
        if (d > std::numeric_limits<std::int64_t>::max()) throw PreconditionError("expand_cf: quadratic form too large");
        const std::int64_t s = detail::isqrt(static_cast<std::int64_t>(d));
        const long double root = std::sqrt(static_cast<long double>(d));
        for (std::size_t k = 0; k < depth; ++k) {
            // floor((P + sqrt d)/Q) without rounding: sqrt d is irrational.
            std::int64_t a_k = Q > 0 ? detail::floor_div(P + s, Q) : -(detail::floor_div(P + s, -Q) + 1);
            if (k > 0) {
                q_prime *= (static_cast<long double>(P) + root) / static_cast<long double>(Q);
                cf.q_primes.push_back(static_cast<double>(q_prime));
            }
            if (!detail::push_convergent(cf, a_k)) {
                // q'_k just pushed is q'_{n+1} for the last stored index n = k - 1
                cf.stop = CfStop::overflow;
                return cf;
            }
            const i128 P_next = static_cast<i128>(a_k) * Q - P;
            const i128 Q_next = (d - P_next * P_next) / Q;
            P = P_next;
            Q = Q_next;
        }
        q_prime *= (static_cast<long double>(P) + root) / static_cast<long double>(Q);
        cf.q_primes.push_back(static_cast<double>(q_prime));
        return cf;
    }

    // Literal: alpha = mant * 2^exp exactly; run Euclid on (num, den).
    int exponent = 0;
    const double mant = std::frexp(value, &exponent);
    i128 num = static_cast<i128>(std::ldexp(mant, 53));
    int shift = 53 - exponent;
    i128 den = 1;
    if (shift < 0) {
        num <<= -shift;
        shift = 0;
    }
    if (shift > 120) throw PreconditionError("expand_cf: alpha too small for exact expansion");
    den <<= shift;
    while (num % 2 == 0 && den % 2 == 0) {
        num /= 2;
        den /= 2;
    }

    const double ulp = detail::unit_in_last_place(value);
    const i128 r0 = den;
    i128 r_prev = num, r_cur = den;  // alpha_k = r_prev / r_cur
    for (std::size_t k = 0; k < depth; ++k) {
        if (k > 0) {
            // q'_k = alpha_1 ... alpha_k = r_0 / r_k (telescoping)
            const long double qp = static_cast<long double>(r0) / static_cast<long double>(r_cur);
            if (mode == CfMode::stop_at_resolution && qp * qp * ulp >= 1.0L) {
                cf.stop = CfStop::resolution;
                cf.q_primes.push_back(static_cast<double>(qp));
                return cf;
            }
            cf.q_primes.push_back(static_cast<double>(qp));
        }
        const i128 a_big = r_prev / r_cur;
        if (a_big > std::numeric_limits<std::int64_t>::max() ||
            !detail::push_convergent(cf, static_cast<std::int64_t>(a_big))) {
            cf.stop = CfStop::overflow;
            return cf;
        }
        const i128 rem = r_prev % r_cur;
        if (rem == 0) {
            cf.stop = CfStop::rational;
            cf.q_primes.push_back(std::numeric_limits<double>::infinity());
            return cf;
        }
        r_prev = r_cur;
        r_cur = rem;
    }
    cf.q_primes.push_back(static_cast<double>(static_cast<long double>(r0) / static_cast<long double>(r_cur)));
    return cf;
}

inline ContinuedFraction expand_cf(double alpha, std::size_t depth, CfMode mode = CfMode::stop_at_resolution) {
    return expand_cf(Irrational::from_double(alpha), depth, mode);
}

}  // namespace ssflow
