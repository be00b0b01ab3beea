#pragma once

// All complex roots of a polynomial with real coefficients by Aberth-Ehrlich
// simultaneous iteration, with multiplicity detection by clustering.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "ssflow/errors.hpp"

namespace ssflow {

struct PolynomialRoot {
    std::complex<double> z;
    int multiplicity = 1;
};

struct RootSolveOptions {
    int max_iterations = 2000;
    double cluster_radius = 1e-7;
};

namespace detail {

using cld = std::complex<long double>;

// Horner for p and p' with coefficients c[0] + c[1] z + ... + c[d] z^d.
inline void horner(const std::vector<double>& c, cld z, cld& p, cld& dp) {
    p = static_cast<long double>(c.back());
    dp = 0.0L;
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        dp = dp * z + p;
        p = p * z + static_cast<long double>(c[i]);
    }
}

inline std::string describe_coefficients(const std::vector<double>& c) {
    std::ostringstream os;
    os << "coefficients (ascending):";
    std::size_t shown = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0.0) continue;
        if (++shown > 12) {
            os << " ...";
            break;
        }
        os << ' ' << c[i] << "*z^" << i;
    }
    return os.str();
}

}  // namespace detail

/// Roots of c[0] + c[1] z + ... + c[d] z^d (c[d] != 0, real coefficients).
/// Clustered roots are merged; each cluster reports its size as multiplicity.
/// Non-real roots are returned as exact conjugate pairs.
inline std::vector<PolynomialRoot> polynomial_roots(std::vector<double> c, const RootSolveOptions& opt = {}) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.size() < 2) throw PreconditionError("polynomial_roots: degree must be >= 1");
    std::size_t zeros_at_origin = 0;
    while (c.front() == 0.0) {
        c.erase(c.begin());
        ++zeros_at_origin;
    }
    const std::size_t d = c.size() - 1;
    std::vector<detail::cld> z(d);

    if (d > 0) {
        // Initial points on a circle of radius between the Fujiwara-type
        // lower and Cauchy upper bounds, rotated off the real axis.
        long double upper = 0.0L;
        for (std::size_t i = 0; i < d; ++i) upper = std::max(upper, std::abs(static_cast<long double>(c[i] / c[d])));
        upper += 1.0L;
        const long double radius =
            std::min(upper, std::pow(std::abs(static_cast<long double>(c[0] / c[d])), 1.0L / static_cast<long double>(d)));
        for (std::size_t i = 0; i < d; ++i) {
            const long double ang = 2.0L * std::numbers::pi_v<long double> * (static_cast<long double>(i) + 0.25L) /
                                        static_cast<long double>(d) +
                                    0.4L;
            z[i] = std::polar(radius, ang);
        }

        std::vector<bool> done(d, false);
        std::size_t remaining = d;
        int it = 0;
        for (; it < opt.max_iterations && remaining > 0; ++it) {
            for (std::size_t i = 0; i < d; ++i) {
                if (done[i]) continue;
                detail::cld p, dp;
                detail::horner(c, z[i], p, dp);
                if (p == detail::cld(0.0L)) {
                    done[i] = true;
                    --remaining;
                    continue;
                }
                const detail::cld ratio = p / dp;
                detail::cld sum = 0.0L;
                for (std::size_t j = 0; j < d; ++j)
                    if (j != i) sum += 1.0L / (z[i] - z[j]);
                const detail::cld step = ratio / (1.0L - ratio * sum);
                z[i] -= step;
                if (std::abs(step) <= 1e-17L * std::max(1.0L, std::abs(z[i]))) {
                    done[i] = true;
                    --remaining;
                }
            }
        }
        if (remaining > 0) {
            // Accept stragglers that nevertheless have a tiny residual.
            for (std::size_t i = 0; i < d; ++i) {
                if (done[i]) continue;
                detail::cld p, dp;
                detail::horner(c, z[i], p, dp);
                long double scale = 0.0L;
                const long double r = std::abs(z[i]);
                long double pw = 1.0L;
                for (double ci : c) {
                    scale += std::abs(static_cast<long double>(ci)) * pw;
                    pw *= r;
                }
                if (std::abs(p) > 1e-12L * scale) {
                    throw SolverError("polynomial_roots: Aberth iteration did not converge after " +
                                      std::to_string(opt.max_iterations) + " sweeps; " +
                                      detail::describe_coefficients(c));
                }
            }
        }
    }

    // Cluster.
    std::vector<PolynomialRoot> clusters;
    std::vector<bool> used(d, false);
    for (std::size_t i = 0; i < d; ++i) {
        if (used[i]) continue;
        detail::cld sum = z[i];
        int count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < d; ++j) {
            if (!used[j] && std::abs(z[j] - z[i]) < opt.cluster_radius * std::max(1.0L, std::abs(z[i]))) {
                used[j] = true;
                sum += z[j];
                ++count;
            }
        }
        const detail::cld mean = sum / static_cast<long double>(count);
        if (count > 1) {
            // A genuine multiple root has p^{(m-1)} ~ 0 there; a near-miss
            // pair does not. Only p' is checked, which suffices for m = 2.
            detail::cld p, dp;
            detail::horner(c, mean, p, dp);
            long double scale = 0.0L;
            for (std::size_t k = 1; k < c.size(); ++k)
                scale += static_cast<long double>(k) * std::abs(static_cast<long double>(c[k])) *
                         std::pow(std::abs(mean), static_cast<long double>(k - 1));
            if (std::abs(dp) > 1e-5L * scale) {
                throw SolverError("polynomial_roots: clustered roots without vanishing derivative; " +
                                  detail::describe_coefficients(c));
            }
        }
        clusters.push_back({std::complex<double>(static_cast<double>(mean.real()), static_cast<double>(mean.imag())), count});
    }

    // Enforce exact conjugate symmetry.
    std::vector<PolynomialRoot> out;
    std::vector<PolynomialRoot> upper_half;
    int real_mult = 0, upper_mult = 0;
    for (const auto& r : clusters) {
        const double tol = 1e-10 * std::max(1.0, std::abs(r.z));
        if (std::abs(r.z.imag()) <= tol) {
            out.push_back({{r.z.real(), 0.0}, r.multiplicity});
            real_mult += r.multiplicity;
        } else if (r.z.imag() > 0) {
            upper_half.push_back(r);
            upper_mult += r.multiplicity;
        }
    }
    if (real_mult + 2 * upper_mult == static_cast<int>(d)) {
        for (const auto& r : upper_half) {
            out.push_back(r);
            out.push_back({std::conj(r.z), r.multiplicity});
        }
    } else {
        out = clusters;
    }
    if (zeros_at_origin > 0) out.push_back({{0.0, 0.0}, static_cast<int>(zeros_at_origin)});
    std::sort(out.begin(), out.end(), [](const PolynomialRoot& a, const PolynomialRoot& b) {
        if (a.z.imag() != b.z.imag()) return a.z.imag() < b.z.imag();
        return a.z.real() < b.z.real();
    });
    return out;
}

}  // namespace ssflow
