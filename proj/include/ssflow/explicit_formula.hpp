#pragma once

// Explicit formulas for the weighted orbit count psi(x): exact lattice closed
// forms built from periodic profiles, truncated sums over a window of complex
// dimensions, and the level-2 (integrated) formula.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "ssflow/diophantine.hpp"
#include "ssflow/dimensions.hpp"
#include "ssflow/errors.hpp"
#include "ssflow/flow.hpp"
#include "ssflow/orbits.hpp"
#include "ssflow/polynomial.hpp"
#include "ssflow/zeta.hpp"

namespace ssflow {

/// -zeta'/zeta(-1) = sum_j w_j e^{w_j} / (1 - sum_j e^{w_j}).
inline double log_deriv_at_minus_one(const FlowSpec& flow) {
    double num = 0.0, den = 1.0;
    for (double w : flow.weights()) {
        num += w * std::exp(w);
        den -= std::exp(w);
    }
    return num / den;
}

namespace detail {

// Fractional part of y / w; snaps to 0 within 1e-12 of an integer and reports it.
inline double frac_part(double y, double w, bool& at_jump) {
    const double t = y / w;
    const double n = std::round(t);
    at_jump = std::abs(t - n) <= 1e-12 * std::max(1.0, std::abs(t));
    if (at_jump) return 0.0;
    return t - std::floor(t);
}

}  // namespace detail

/// g(y) = (b w / (b - 1)) b^{-{y/w}}, b = e^{w omega}: the sum over one
/// vertical line of dimensions omega + 2 pi i n / w of e^{2 pi i n y/w} / (omega + 2 pi i n / w).
struct PeriodicProfile {
    cplx omega;
    double period = 0.0;
    int residue = 1;

    cplx b() const { return std::exp(period * omega); }

    cplx evaluate(double y, JumpConvention jump = JumpConvention::full) const {
        bool at_jump = false;
        const double fr = detail::frac_part(y, period, at_jump);
        const cplx bb = b();
        const cplx scale = bb * period / (bb - 1.0);
        if (at_jump && jump == JumpConvention::half) return scale * 0.5 * (1.0 + 1.0 / bb);
        return scale * std::exp(-omega * (period * fr));
    }

    /// Symmetric partial sum over |n| <= n_max.
    cplx fourier_partial(double y, int n_max) const {
        cplx acc = 0.0;
        for (int n = -n_max; n <= n_max; ++n) {
            const double k = 2.0 * std::numbers::pi * n / period;
            acc += std::exp(cplx(0.0, k * y)) / (omega + cplx(0.0, k));
        }
        return acc;
    }
};

/// Exact formula for a lattice flow:
/// psi(x) = sum_u res_u g_u(log x) x^{omega_u} - (1/(N-1)) sum_j w_j.
class LatticeExplicitFormula {
public:
    LatticeExplicitFormula(const FlowSpec& flow, const LatticeStructure& lat)
        : flow_(flow), lat_(lat), constant_(log_deriv_at_zero(flow)), at_minus_one_(log_deriv_at_minus_one(flow)) {
        const auto roots = polynomial_roots(detail::lattice_polynomial(lat));
        for (const auto& r : roots) {
            if (r.z == cplx(0.0)) throw IntegrityError("lattice explicit formula: zero root");
            const cplx omega(-std::log(std::abs(r.z)) / lat.generator, -std::arg(r.z) / lat.generator);
            profiles_.push_back({omega, lat.generator, r.multiplicity});
        }
    }

    const std::vector<PeriodicProfile>& profiles() const noexcept { return profiles_; }
    double constant_term() const noexcept { return constant_; }

    /// Complex value before taking the real part; the imaginary part measures
    /// how well conjugate lines cancel.
    cplx evaluate_complex(double x, JumpConvention jump = JumpConvention::full) const {
        if (!(x > 0.0)) throw PreconditionError("lattice_psi: x must be positive");
        const double y = std::log(x);
        cplx acc = 0.0;
        for (const auto& pr : profiles_)
            acc += static_cast<double>(pr.residue) * pr.evaluate(y, jump) * std::exp(pr.omega * y);
        return acc + constant_;
    }

    double psi(double x, JumpConvention jump = JumpConvention::full) const { return evaluate_complex(x, jump).real(); }

    /// Level 2: int_0^x psi = sum_u res_u x^{omega_u+1} [g_{omega_u} - g_{omega_u+1}](log x)
    ///          + c_0 x - (-zeta'/zeta)(-1).
    double psi_level2(double x) const {
        if (!(x > 0.0)) throw PreconditionError("psi_level2: x must be positive");
        const double y = std::log(x);
        cplx acc = 0.0;
        for (const auto& pr : profiles_) {
            PeriodicProfile shifted = pr;
            shifted.omega += 1.0;
            acc += static_cast<double>(pr.residue) * std::exp((pr.omega + 1.0) * y) *
                   (pr.evaluate(y) - shifted.evaluate(y));
        }
        return acc.real() + constant_ * x - at_minus_one_;
    }

private:
    FlowSpec flow_;
    LatticeStructure lat_;
    double constant_;
    double at_minus_one_;
    std::vector<PeriodicProfile> profiles_;
};

inline double lattice_psi(const FlowSpec& flow, const LatticeStructure& lat, double x,
                          JumpConvention jump = JumpConvention::full) {
    return LatticeExplicitFormula(flow, lat).psi(x, jump);
}

/// Truncated explicit expansion over a window of dimensions.
struct ExplicitTerm {
    cplx omega;
    double coefficient = 1.0;  ///< residue
};

struct ExplicitExpansion {
    int level = 1;
    double D = 0.0;
    double constant_term = 0.0;  ///< -(1/(N-1)) sum_j w_j
    double at_minus_one = 0.0;   ///< level 2 only
    double T = 0.0;
    std::vector<ExplicitTerm> terms;  ///< Im omega >= 0, ascending Im; D first

    /// Conjugate pairs are combined as 2 Re.
    double evaluate(double x) const {
        if (!(x > 0.0)) throw PreconditionError("explicit expansion: x must be positive");
        const double y = std::log(x);
        double acc = 0.0;
        for (const auto& t : terms) {
            const cplx denom = level == 1 ? t.omega : t.omega * (t.omega + 1.0);
            const cplx val = t.coefficient * std::exp((t.omega + static_cast<double>(level - 1)) * y) / denom;
            acc += t.omega.imag() == 0.0 ? val.real() : 2.0 * val.real();
        }
        if (level == 1) return acc + constant_term;
        return acc + constant_term * x - at_minus_one;
    }
};

inline ExplicitExpansion make_expansion(const DimensionWindow& win, int level) {
    if (level != 1 && level != 2) throw ValidationError("level", "must be 1 or 2");
    if (win.flow.size() < 2) throw PreconditionError("explicit expansion: requires N >= 2");
    ExplicitExpansion ex;
    ex.level = level;
    ex.D = win.real_dims.D;
    ex.constant_term = log_deriv_at_zero(win.flow);
    ex.at_minus_one = log_deriv_at_minus_one(win.flow);
    ex.T = win.T;
    for (const auto& d : win.dims) {
        if (d.omega.imag() < 0.0) continue;
        if (d.omega == cplx(0.0)) throw IntegrityError("explicit expansion: 0 is a complex dimension");
        ex.terms.push_back({d.omega, static_cast<double>(d.residue)});
    }
    std::stable_sort(ex.terms.begin(), ex.terms.end(),
                     [](const ExplicitTerm& a, const ExplicitTerm& b) { return a.omega.imag() < b.omega.imag(); });
    if (ex.terms.empty() || ex.terms.front().omega.imag() != 0.0)
        throw IntegrityError("explicit expansion: window lacks the real dimension D");
    return ex;
}

struct PsiEstimate {
    double value = 0.0;
    double tail_bound = 0.0;  ///< heuristic: (w_N / pi) x^D / (T log x)
    bool tail_heuristic = true;
};

inline PsiEstimate nonlattice_psi(const DimensionWindow& win, double x) {
    const ExplicitExpansion ex = make_expansion(win, 1);
    PsiEstimate out;
    out.value = ex.evaluate(x);
    const double lx = std::log(x);
    out.tail_bound = win.flow.max_weight() / std::numbers::pi * std::pow(x, ex.D) / (win.T * std::max(lx, 1e-300));
    return out;
}

inline double psi_level2(const DimensionWindow& win, double x) { return make_expansion(win, 2).evaluate(x); }

/// Error envelope exponent e = (N-1) / (4 l (N-1) + 4) for approximability
/// growth exponent l (l = 0: badly approximable).
inline double envelope_exponent(std::size_t N, double l) {
    const double n1 = static_cast<double>(N - 1);
    return n1 / (4.0 * l * n1 + 4.0);
}

/// Tauberian smoothing width h = x (log log x / log x)^{1/(2 rho)},
/// rho = 2/(N-1) + 2l.
inline double tauberian_width(double x, std::size_t N, double l) {
    const double rho = 2.0 / static_cast<double>(N - 1) + 2.0 * l;
    const double lx = std::log(x);
    if (!(lx > std::numbers::e)) throw PreconditionError("tauberian_width: need log x > e");
    return x * std::pow(std::log(lx) / lx, 1.0 / (2.0 * rho));
}

struct ErrorScalingRow {
    double x = 0.0;
    double psi_census = 0.0;
    double psi_formula = 0.0;
    double main_term = 0.0;
    double normalized_error = 0.0;  ///< (psi_census - x^D/D) / x^D
    double envelope = 0.0;          ///< (log log x / log x)^e
};

struct ErrorScalingReport {
    double exponent = 0.0;
    double l = 0.0;
    bool l_estimated = true;
    double fitted_c = 0.0;      ///< least squares c * envelope against the local peaks of |normalized_error|
    double fitted_c_all = 0.0;  ///< same fit against every sample
    std::vector<ErrorScalingRow> rows;
};

/// Descriptive comparison of census psi with the main term and envelope.
/// When `l` is not given it is estimated from an approximability profile up
/// to q_max; estimates below 0.1 are treated as 0.
inline ErrorScalingReport error_scaling_report(const DimensionWindow& win, const OrbitCensus& census,
                                               const std::vector<double>& x_grid, std::optional<double> l = std::nullopt,
                                               std::int64_t q_max = 2000, JumpConvention jump = JumpConvention::half) {
    ErrorScalingReport rep;
    const FlowSpec& flow = win.flow;
    if (l) {
        rep.l = *l;
        rep.l_estimated = false;
    } else if (win.meta.method == "lattice" || flow.size() < 2) {
        rep.l = 0.0;
    } else {
        const double est = estimate_approximability_exponent(approximability_profile(flow, q_max));
        rep.l = est < 0.1 ? 0.0 : est;
    }
    rep.exponent = flow.size() >= 2 ? envelope_exponent(flow.size(), rep.l) : 0.0;
    const double D = win.real_dims.D;
    std::optional<ExplicitExpansion> ex;
    if (flow.size() >= 2) ex = make_expansion(win, 1);
    for (double x : x_grid) {
        ErrorScalingRow row;
        row.x = x;
        row.psi_census = psi(census, x, jump);
        row.psi_formula = ex ? ex->evaluate(x) : std::numeric_limits<double>::quiet_NaN();
        row.main_term = D > 0.0 ? std::pow(x, D) / D : 0.0;
        row.normalized_error = (row.psi_census - row.main_term) / std::pow(x, D);
        const double lx = std::log(x);
        row.envelope = lx > 1.0 ? std::pow(std::log(lx) / lx, rep.exponent) : std::numeric_limits<double>::quiet_NaN();
        rep.rows.push_back(row);
    }
    const auto& R = rep.rows;
    double num = 0.0, den = 0.0, num_all = 0.0, den_all = 0.0;
    for (std::size_t i = 0; i < R.size(); ++i) {
        if (!std::isfinite(R[i].envelope)) continue;
        const double a = std::abs(R[i].normalized_error);
        const double e2 = R[i].envelope * R[i].envelope;
        num_all += a * R[i].envelope;
        den_all += e2;
        const bool peak = (i == 0 || a >= std::abs(R[i - 1].normalized_error)) &&
                          (i + 1 == R.size() || a >= std::abs(R[i + 1].normalized_error));
        if (peak) {
            num += a * R[i].envelope;
            den += e2;
        }
    }
    rep.fitted_c = den > 0.0 ? num / den : 0.0;
    rep.fitted_c_all = den_all > 0.0 ? num_all / den_all : 0.0;
    return rep;
}

}  // namespace ssflow
