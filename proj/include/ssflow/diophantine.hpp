#pragma once

// Ostrowski (alpha-adic) numeration on continued-fraction denominators, the
// two-sided bracket on n*alpha - m, and simultaneous rational approximation
// of the weight ratios w_j / w_1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <vector>

#include "ssflow/continued_fraction.hpp"
#include "ssflow/errors.hpp"
#include "ssflow/flow.hpp"

namespace ssflow {

/// n = sum_nu d_nu q_nu with 0 <= d_nu <= a_{nu+1}, d_0 < a_1 and
/// d_nu = a_{nu+1} => d_{nu-1} = 0.
struct OstrowskiExpansion {
    std::int64_t n = 0;
    std::vector<std::int64_t> digits;  // d_0 .. d_l

    /// Index of the lowest nonzero digit.
    std::size_t lowest_index() const {
        for (std::size_t i = 0; i < digits.size(); ++i)
            if (digits[i] != 0) return i;
        throw PreconditionError("Ostrowski expansion of zero has no nonzero digit");
    }
};

inline OstrowskiExpansion ostrowski(std::int64_t n, const ContinuedFraction& cf) {
    if (n < 1) throw PreconditionError("ostrowski: n must be positive");
    std::size_t l = 0;
    while (l + 1 < cf.size() && cf.q[l + 1] <= n) ++l;
    if (l + 1 >= cf.size() && !cf.rational()) {
        std::ostringstream os;
        os << "ostrowski: continued fraction too shallow for n = " << n << " (need q_{l+1} > n, have "
           << cf.size() << " convergents)";
        throw PreconditionError(os.str());
    }
    OstrowskiExpansion out;
    out.n = n;
    out.digits.assign(l + 1, 0);
    std::int64_t rem = n;
    for (std::size_t nu = l + 1; nu-- > 0;) {
        out.digits[nu] = rem / cf.q[nu];
        rem %= cf.q[nu];
    }
    if (rem != 0) throw IntegrityError("ostrowski: nonzero remainder after q_0");
    return out;
}

/// The three digit constraints; used by tests and by callers that build
/// expansions by hand.
inline bool ostrowski_digits_admissible(const std::vector<std::int64_t>& digits, const ContinuedFraction& cf) {
    for (std::size_t nu = 0; nu < digits.size(); ++nu) {
        if (digits[nu] < 0) return false;
        if (nu + 1 >= cf.size()) {
            if (digits[nu] != 0) return false;
            continue;
        }
        const std::int64_t cap = cf.a(nu + 1);
        if (digits[nu] > cap) return false;
        if (nu == 0 && digits[0] >= cap) return false;
        if (nu > 0 && digits[nu] == cap && digits[nu - 1] != 0) return false;
    }
    return true;
}

/// n alpha - m lies strictly between (-1)^k / q'_{k+2} and (-1)^k / q'_k,
/// where k is the lowest nonzero Ostrowski digit and m = sum d_nu p_nu.
struct ApproximationBracket {
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::size_t k = 0;
    long double value = 0;  ///< n alpha - m
    double lower = 0;
    double upper = 0;
    bool strict = false;  ///< containment held with no slack
};

inline ApproximationBracket orbit_of_approximation(std::int64_t n, const ContinuedFraction& cf,
                                                   const Irrational& alpha) {
    const OstrowskiExpansion ex = ostrowski(n, cf);
    ApproximationBracket br;
    br.n = n;
    br.k = ex.lowest_index();
    for (std::size_t nu = br.k; nu < ex.digits.size(); ++nu) br.m += ex.digits[nu] * cf.p[nu];
    if (br.k + 2 >= cf.q_primes.size()) throw PreconditionError("orbit_of_approximation: need q'_{k+2}");
    br.value = alpha.offset(n, br.m);
    const double sign = (br.k % 2 == 0) ? 1.0 : -1.0;
    const double a = sign / cf.q_prime(br.k + 2);
    const double b = sign / cf.q_prime(br.k);
    br.lower = std::min(a, b);
    br.upper = std::max(a, b);
    const auto v = static_cast<double>(br.value);
    br.strict = v > br.lower && v < br.upper;
    const double slack = 1e-9 * std::max(std::abs(br.lower), std::abs(br.upper));
    if (!(v > br.lower - slack && v < br.upper + slack)) {
        std::ostringstream os;
        os.precision(17);
        os << "orbit_of_approximation: n*alpha - m = " << v << " outside (" << br.lower << ", " << br.upper
           << ") for n = " << n;
        throw IntegrityError(os.str());
    }
    return br;
}

inline ApproximationBracket orbit_of_approximation(std::int64_t n, const ContinuedFraction& cf) {
    return orbit_of_approximation(n, cf, Irrational::from_double(cf.alpha));
}

/// |q w_j - p_j w_1| <= w_1 / Q for all j, with q < Q^{N-1}.
struct SimultaneousApproximation {
    std::int64_t q = 0;
    std::vector<std::int64_t> p;     ///< p_1 = q
    std::vector<double> errors;      ///< |x_j| = 2 pi |q w_j / w_1 - p_j|
    double Q = 0.0;

    double max_scaled_error() const {
        double m = 0.0;
        for (double e : errors) m = std::max(m, e / (2.0 * std::numbers::pi));
        return m;
    }
};

inline constexpr double kSimultaneousScanCap = 1e8;

namespace detail {

inline std::vector<long double> weight_ratios(const FlowSpec& flow) {
    std::vector<long double> r;
    const auto w1 = static_cast<long double>(flow.min_weight());
    for (double w : flow.weights()) r.push_back(static_cast<long double>(w) / w1);
    if (flow.size() == 2) r[1] = flow.alpha().value_ld();
    return r;
}

inline SimultaneousApproximation make_approximation(std::int64_t q, const std::vector<long double>& ratios, double Q) {
    SimultaneousApproximation out;
    out.q = q;
    out.Q = Q;
    for (long double r : ratios) {
        const long double x = static_cast<long double>(q) * r;
        const auto pj = static_cast<std::int64_t>(std::llround(x));  // half away from zero
        out.p.push_back(pj);
        out.errors.push_back(static_cast<double>(2.0L * std::numbers::pi_v<long double> * std::abs(x - pj)));
    }
    out.p[0] = q;
    out.errors[0] = 0.0;
    return out;
}

}  // namespace detail

inline SimultaneousApproximation simultaneous_approx(const FlowSpec& flow, double Q) {
    const std::size_t N = flow.size();
    if (N < 2) throw PreconditionError("simultaneous_approx: requires N >= 2");
    if (!(Q > 1.0) || !std::isfinite(Q)) throw ValidationError("Q", "approximation quality must exceed 1");
    const double limit = std::pow(Q, static_cast<double>(N - 1));
    if (limit > kSimultaneousScanCap) {
        std::ostringstream os;
        os << "simultaneous_approx: search range Q^(N-1) = " << limit << " exceeds cap " << kSimultaneousScanCap
           << "; use a smaller Q";
        throw ResourceError(os.str());
    }
    const auto ratios = detail::weight_ratios(flow);
    const long double tol = 1.0L / Q * (1.0L + 1e-12L);
    auto fits = [&](std::int64_t q) {
        for (std::size_t j = 1; j < N; ++j) {
            const long double x = static_cast<long double>(q) * ratios[j];
            if (std::abs(x - std::round(x)) > tol) return false;
        }
        return true;
    };

    std::int64_t found = 0;
    if (N == 2) {
        // Record setters of ||q alpha|| are convergent denominators, so the
        // first convergent under the threshold is the smallest admissible q.
        const ContinuedFraction cf = expand_cf(flow.alpha(), 90);
        for (std::size_t k = 0; k < cf.size(); ++k) {
            if (static_cast<double>(cf.q[k]) >= limit) break;
            if (fits(cf.q[k])) {
                found = cf.q[k];
                break;
            }
        }
    } else {
        const auto last = static_cast<std::int64_t>(std::ceil(limit)) - 1;
        for (std::int64_t q = 1; q <= last; ++q) {
            if (fits(q)) {
                found = q;
                break;
            }
        }
    }
    if (found == 0) throw SolverError("simultaneous_approx: no q < Q^(N-1) found (input resolution exhausted)");

    SimultaneousApproximation out = detail::make_approximation(found, ratios, Q);
    const double w1 = flow.min_weight();
    for (std::size_t j = 0; j < N; ++j) {
        const double lhs = std::abs(static_cast<double>(found) * flow.weight(j) - static_cast<double>(out.p[j]) * w1);
        if (lhs > w1 / Q * (1.0 + 1e-9) + 1e-15 * static_cast<double>(found) * flow.weight(j))
            throw IntegrityError("simultaneous_approx: |q w_j - p_j w_1| <= w_1/Q violated");
    }
    return out;
}

struct ApproximabilityPoint {
    std::int64_t q = 0;
    double max_error = 0.0;  ///< max_j |q w_j - p_j w_1|
    double ratio = 0.0;      ///< max_error * q^{1/(N-1)} / w_1
};

inline std::vector<ApproximabilityPoint> approximability_profile(const FlowSpec& flow, std::int64_t q_max) {
    const std::size_t N = flow.size();
    if (N < 2) throw PreconditionError("approximability_profile: requires N >= 2");
    if (q_max < 1) throw ValidationError("q_max", "must be >= 1");
    const auto ratios = detail::weight_ratios(flow);
    const double w1 = flow.min_weight();
    const double expo = 1.0 / static_cast<double>(N - 1);
    std::vector<ApproximabilityPoint> out;
    out.reserve(static_cast<std::size_t>(q_max));
    for (std::int64_t q = 1; q <= q_max; ++q) {
        long double worst = 0.0L;
        for (std::size_t j = 1; j < N; ++j) {
            const long double x = static_cast<long double>(q) * ratios[j];
            worst = std::max(worst, std::abs(x - std::round(x)));
        }
        ApproximabilityPoint pt;
        pt.q = q;
        pt.max_error = static_cast<double>(worst) * w1;
        pt.ratio = static_cast<double>(worst) * std::pow(static_cast<double>(q), expo);
        out.push_back(pt);
    }
    return out;
}

/// Growth exponent l of a(q) ~ q^l estimated from a profile: least-squares
/// slope of log(1 / running-min ratio) against log q over q >= 10. Returns 0
/// for profiles too short to fit. Lattice profiles (ratio 0) give +inf.
inline double estimate_approximability_exponent(const std::vector<ApproximabilityPoint>& profile) {
    double running = std::numeric_limits<double>::infinity();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& pt : profile) {
        running = std::min(running, pt.ratio);
        if (pt.q < 10) continue;
        if (running <= 0.0) return std::numeric_limits<double>::infinity();
        const double x = std::log(static_cast<double>(pt.q));
        const double y = -std::log(running);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom <= 0.0) return 0.0;
    return std::max(0.0, (static_cast<double>(n) * sxy - sx * sy) / denom);
}

}  // namespace ssflow
