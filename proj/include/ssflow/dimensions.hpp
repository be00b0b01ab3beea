#pragma once

// Complex dimensions of a self-similar flow: the roots of
// f(s) = 1 - sum_j e^{-w_j s} in a window |Im s| <= T.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ssflow/continued_fraction.hpp"
#include "ssflow/diophantine.hpp"
#include "ssflow/errors.hpp"
#include "ssflow/flow.hpp"
#include "ssflow/polynomial.hpp"
#include "ssflow/zeta.hpp"

namespace ssflow {

enum class DimensionSource { lattice_exact, refined, predicted };

inline const char* to_string(DimensionSource s) {
    switch (s) {
        case DimensionSource::lattice_exact: return "lattice-exact";
        case DimensionSource::refined: return "refined";
        case DimensionSource::predicted: return "predicted";
    }
    return "?";
}

struct ComplexDimension {
    cplx omega;
    int residue = 1;
    DimensionSource source = DimensionSource::refined;
    double residual = 0.0;  ///< |f(omega)|
    int series_order = 0;   ///< truncation order of a prediction
};

/// Residual acceptance bound 1e-9 (1 + sum_j w_j e^{-w_j Re omega}).
inline double residual_bound(const FlowSpec& flow, cplx omega) { return 1e-9 * f_scale(flow, omega.real()); }

struct WindowMetadata {
    std::string method;  ///< "lattice" or "nonlattice"
    double generator = 0.0;
    std::vector<std::int64_t> multipliers;
    // nonlattice surrogate
    std::int64_t surrogate_q = 0;
    double surrogate_Q = 0.0;
    int surrogate_attempts = 0;
    double pre_refinement_residual = 0.0;
    std::size_t candidates = 0;
    std::size_t accepted = 0;
    std::size_t merged = 0;
    std::size_t failed = 0;
    std::string note;
};

struct DimensionWindow {
    FlowSpec flow;
    double T = 0.0;
    DimensionPair real_dims;
    std::vector<ComplexDimension> dims;  ///< sorted by Im, then Re
    WindowMetadata meta;

    /// Closest dimension to `target`; nullopt if the window is empty.
    std::optional<ComplexDimension> nearest(cplx target) const {
        std::optional<ComplexDimension> best;
        double bd = 0.0;
        for (const auto& d : dims) {
            const double dist = std::abs(d.omega - target);
            if (!best || dist < bd) {
                best = d;
                bd = dist;
            }
        }
        return best;
    }

    /// Sum of residues over dimensions with |Im| <= height.
    std::int64_t count_up_to(double height) const {
        std::int64_t n = 0;
        for (const auto& d : dims)
            if (std::abs(d.omega.imag()) <= height) n += d.residue;
        return n;
    }
};

namespace detail {

inline void sort_dims(std::vector<ComplexDimension>& dims) {
    std::sort(dims.begin(), dims.end(), [](const ComplexDimension& a, const ComplexDimension& b) {
        if (a.omega.imag() != b.omega.imag()) return a.omega.imag() < b.omega.imag();
        return a.omega.real() < b.omega.real();
    });
}

inline std::vector<double> lattice_polynomial(const LatticeStructure& lat) {
    std::vector<double> c(static_cast<std::size_t>(lat.degree()) + 1, 0.0);
    c[0] = -1.0;
    for (auto k : lat.multipliers) c[static_cast<std::size_t>(k)] += 1.0;
    return c;
}

}  // namespace detail

/// Exact dimensions of a lattice flow: roots z of sum_j z^{k_j} = 1, mapped to
/// the vertical lines omega_u + 2 pi i n / w.
inline DimensionWindow lattice_dimensions(const FlowSpec& flow, const LatticeStructure& lat, double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T", "window half-height must be positive and finite");
    if (lat.multipliers.size() != flow.size()) throw PreconditionError("lattice_dimensions: lattice does not match flow");
    for (std::size_t j = 0; j < flow.size(); ++j) {
        const double expect = static_cast<double>(lat.multipliers[j]) * lat.generator;
        if (std::abs(flow.weight(j) - expect) > 1e-9 * flow.weight(j))
            throw PreconditionError("lattice_dimensions: w_j != k_j w for j = " + std::to_string(j));
    }

    DimensionWindow win;
    win.flow = flow;
    win.T = T;
    win.real_dims = solve_dimension(flow);
    win.meta.method = "lattice";
    win.meta.generator = lat.generator;
    win.meta.multipliers = lat.multipliers;

    const auto coeffs = detail::lattice_polynomial(lat);
    const auto roots = polynomial_roots(coeffs);
    const double w = lat.generator;
    const double period = 2.0 * std::numbers::pi / w;
    int total = 0;
    for (const auto& r : roots) {
        total += r.multiplicity;
        // Principal branch: arg in (-pi, pi].
        double ang = std::arg(r.z);
        if (ang == -std::numbers::pi) ang = std::numbers::pi;
        const cplx base(-std::log(std::abs(r.z)) / w, -ang / w);
        const auto n_lo = static_cast<long>(std::ceil((-T - base.imag()) / period));
        const auto n_hi = static_cast<long>(std::floor((T - base.imag()) / period));
        for (long n = n_lo; n <= n_hi; ++n) {
            ComplexDimension cd;
            cd.omega = {base.real(), base.imag() + static_cast<double>(n) * period};
            if (base.imag() == 0.0) cd.omega = {cd.omega.real(), static_cast<double>(n) * period};
            if (ang == std::numbers::pi) cd.omega = {cd.omega.real(), static_cast<double>(2 * n - 1) * std::numbers::pi / w};
            cd.residue = r.multiplicity;
            cd.source = DimensionSource::lattice_exact;
            cd.residual = std::abs(eval_f(flow, cd.omega).f);
            if (!(cd.residual < residual_bound(flow, cd.omega))) {
                std::ostringstream os;
                os.precision(17);
                os << "lattice_dimensions: residual " << cd.residual << " at " << cd.omega << " exceeds bound; "
                   << detail::describe_coefficients(coeffs);
                throw SolverError(os.str());
            }
            win.dims.push_back(cd);
        }
    }
    if (total != lat.degree()) throw IntegrityError("lattice_dimensions: residue total differs from polynomial degree");
    // Snap the real root to the solver's D.
    for (auto& d : win.dims) {
        if (d.omega.imag() == 0.0 && std::abs(d.omega.real() - win.real_dims.D) < 1e-9) {
            d.omega = {win.real_dims.D, 0.0};
            d.residual = std::abs(eval_f(flow, d.omega).f);
        }
    }
    detail::sort_dims(win.dims);
    return win;
}

inline constexpr std::int64_t kMaxSurrogateDegree = 6000;

struct NonlatticeOptions {
    double approx_Q = 0.0;  ///< starting quality; 0 chooses automatically
    int max_attempts = 40;
    double pre_refinement_limit = 0.1;
    int newton_iterations = 50;
    double merge_radius = 1e-8;
};

namespace detail {

struct NewtonResult {
    cplx s;
    double residual;
    bool converged;
};

inline NewtonResult newton_refine(const FlowSpec& flow, cplx s, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        const FValue fv = eval_f(flow, s);
        if (std::abs(fv.f) < 1e-12 * f_scale(flow, s.real())) break;
        if (fv.f1 == cplx(0.0)) break;
        s -= fv.f / fv.f1;
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return {s, std::numeric_limits<double>::infinity(), false};
    }
    const double res = std::abs(eval_f(flow, s).f);
    return {s, res, res < residual_bound(flow, s)};
}

}  // namespace detail

/// Dimensions of a nonlattice flow, found by refining the exact dimensions of
/// a nearby lattice flow against the true equation.
inline DimensionWindow nonlattice_dimensions(const FlowSpec& flow, double T, const NonlatticeOptions& opt = {}) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T", "window half-height must be positive and finite");
    if (flow.size() < 2) throw PreconditionError("nonlattice_dimensions: requires N >= 2");

    DimensionWindow win;
    win.flow = flow;
    win.T = T;
    win.real_dims = solve_dimension(flow);
    win.meta.method = "nonlattice";
    const double w1 = flow.min_weight();
    const double margin = std::max(1.0, 0.02 * T);
    const double needed_q = 2.0 * T * w1 / std::numbers::pi;

    double Q = opt.approx_Q > 1.0 ? opt.approx_Q : std::max(2.0, needed_q);
    std::vector<ComplexDimension> candidates;
    for (int attempt = 1;; ++attempt) {
        if (attempt > opt.max_attempts)
            throw SolverError("nonlattice_dimensions: no adequate lattice surrogate after " +
                              std::to_string(opt.max_attempts) + " attempts; pass a larger approx_Q");
        const SimultaneousApproximation sim = simultaneous_approx(flow, Q);
        std::int64_t g = 0;
        for (auto p : sim.p) g = std::gcd(g, p);
        LatticeStructure lat;
        lat.generator = w1 * static_cast<double>(g) / static_cast<double>(sim.q);
        for (auto p : sim.p) lat.multipliers.push_back(p / g);
        win.meta.surrogate_attempts = attempt;
        if (2.0 * std::numbers::pi / lat.generator <= 4.0 * T) {
            Q *= 2.0;
            continue;
        }
        if (lat.degree() > kMaxSurrogateDegree) {
            std::ostringstream os;
            os << "nonlattice_dimensions: surrogate polynomial degree " << lat.degree() << " exceeds cap "
               << kMaxSurrogateDegree << "; lower T";
            throw ResourceError(os.str());
        }
        const FlowSpec surrogate = flow_from_lattice(lat, flow.name() + "-surrogate");
        const DimensionWindow sw = lattice_dimensions(surrogate, lat, T + margin);
        candidates.clear();
        double worst = 0.0;
        for (const auto& d : sw.dims) {
            if (d.omega.imag() < 0.0) continue;
            candidates.push_back(d);
            worst = std::max(worst, std::abs(eval_f(flow, d.omega).f) / f_scale(flow, d.omega.real()));
        }
        win.meta.generator = lat.generator;
        win.meta.multipliers = lat.multipliers;
        win.meta.surrogate_q = sim.q;
        win.meta.surrogate_Q = Q;
        win.meta.pre_refinement_residual = worst;
        if (worst < opt.pre_refinement_limit) break;
        Q *= 2.0;
    }

    win.meta.candidates = candidates.size();
    std::vector<ComplexDimension> refined;
    for (const auto& c : candidates) {
        const auto r = detail::newton_refine(flow, c.omega, opt.newton_iterations);
        if (!r.converged) {
            ++win.meta.failed;
            continue;
        }
        cplx s = r.s;
        if (std::abs(s.imag()) < 1e-9) {
            s = {s.real(), 0.0};
            s = detail::newton_refine(flow, s, opt.newton_iterations).s;
        }
        if (s.imag() < 0.0 || s.imag() > T) continue;
        ComplexDimension cd;
        cd.omega = s;
        cd.residue = 1;
        cd.source = DimensionSource::refined;
        cd.residual = std::abs(eval_f(flow, s).f);
        refined.push_back(cd);
    }
    if (static_cast<double>(win.meta.failed) > 0.01 * static_cast<double>(std::max<std::size_t>(1, candidates.size()))) {
        std::ostringstream os;
        os << "nonlattice_dimensions: Newton failed on " << win.meta.failed << " of " << candidates.size()
           << " candidates; use a larger approx_Q";
        throw SolverError(os.str());
    }

    detail::sort_dims(refined);
    std::vector<ComplexDimension> unique;
    for (const auto& d : refined) {
        bool dup = false;
        for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
            if (d.omega.imag() - it->omega.imag() > opt.merge_radius) break;
            if (std::abs(d.omega - it->omega) < opt.merge_radius) {
                dup = true;
                break;
            }
        }
        if (dup)
            ++win.meta.merged;
        else
            unique.push_back(d);
    }
    win.meta.accepted = unique.size();
    if (win.meta.merged > 0 || win.meta.failed > 0) {
        std::ostringstream os;
        os << win.meta.merged << " candidates merged and " << win.meta.failed
           << " failed; surrogate root count in window differs from refined count";
        win.meta.note = os.str();
    }

    for (const auto& d : unique) {
        ComplexDimension cd = d;
        if (cd.omega.imag() == 0.0 && std::abs(cd.omega.real() - win.real_dims.D) < 1e-8) {
            cd.omega = {win.real_dims.D, 0.0};
            cd.residual = std::abs(eval_f(flow, cd.omega).f);
        }
        win.dims.push_back(cd);
        if (cd.omega.imag() != 0.0) {
            ComplexDimension c2 = cd;
            c2.omega = std::conj(cd.omega);
            win.dims.push_back(c2);
        }
    }
    detail::sort_dims(win.dims);
    return win;
}

/// Classifies the flow and dispatches to the lattice or nonlattice solver.
inline DimensionWindow dimensions_window(const FlowSpec& flow, double T, std::int64_t max_denominator = 1'000'000,
                                         const NonlatticeOptions& opt = {}) {
    if (flow.size() == 2 && flow.alpha_hint()) return nonlattice_dimensions(flow, T, opt);
    if (const auto lat = classify_lattice(flow, max_denominator)) return lattice_dimensions(flow, *lat, T);
    return nonlattice_dimensions(flow, T, opt);
}

/// Delta(x) = sum_n c_n x^n solving a_1 e^{-w_1 Delta} + a_2 e^{-x} e^{-w_2 Delta} = 1,
/// a_j = e^{-w_j D}. For N > 2 only the gradient and Hessian of Delta(x_1, ..., x_N),
/// defined by sum_j a_j e^{-x_j} e^{-w_j Delta} = 1, are computed.
/// Delta(x_1, ..., x_N) at 0 are available.
struct PerturbationSeries {
    std::vector<double> coefficients;  ///< c_1 .. c_order (N = 2)
    double radius_lower_bound = 0.0;
    double D = 0.0;
    double f_prime = 0.0;
    double f_double_prime = 0.0;
    std::vector<double> gradient;             ///< dDelta/dx_j
    std::vector<std::vector<double>> hessian;  ///< d^2 Delta/dx_j dx_k

    /// Delta(x) for N = 2.
    cplx evaluate(cplx x) const {
        cplx acc = 0.0, pw = x;
        for (double c : coefficients) {
            acc += c * pw;
            pw *= x;
        }
        return acc;
    }

    /// Degree-2 truncation grad . x + (1/2) x^T H x.
    cplx evaluate_quadratic(const std::vector<cplx>& x) const {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < gradient.size(); ++j) {
            acc += gradient[j] * x[j];
            for (std::size_t k = 0; k < gradient.size(); ++k) acc += 0.5 * hessian[j][k] * x[j] * x[k];
        }
        return acc;
    }
};

inline constexpr int kMaxSeriesOrder = 8;

inline PerturbationSeries perturbation_series(const FlowSpec& flow, int order = 6) {
    const std::size_t N = flow.size();
    if (N < 2) throw PreconditionError("perturbation_series: requires N >= 2");
    if (order < 1) throw ValidationError("order", "must be >= 1");
    if (N == 2 && order > kMaxSeriesOrder)
        throw PreconditionError("perturbation_series: order " + std::to_string(order) + " not supported (max " +
                                std::to_string(kMaxSeriesOrder) + ")");
    if (N > 2 && order > 2)
        throw PreconditionError("perturbation_series: only degree 2 is supported for N > 2");

    PerturbationSeries ps;
    ps.D = solve_dimension(flow).D;
    std::vector<double> a(N);
    for (std::size_t j = 0; j < N; ++j) {
        a[j] = std::exp(-flow.weight(j) * ps.D);
        ps.f_prime += flow.weight(j) * a[j];
        ps.f_double_prime -= flow.weight(j) * flow.weight(j) * a[j];
    }
    const double fp = ps.f_prime, fpp = ps.f_double_prime;
    ps.gradient.assign(N, 0.0);
    ps.hessian.assign(N, std::vector<double>(N, 0.0));
    for (std::size_t j = 0; j < N; ++j) {
        ps.gradient[j] = -a[j] / fp;
        for (std::size_t k = 0; k < N; ++k) {
            const double wjk = flow.weight(j) + flow.weight(k);
            ps.hessian[j][k] = -(wjk / (fp * fp) + fpp / (fp * fp * fp)) * a[j] * a[k];
        }
        ps.hessian[j][j] += a[j] / fp;
    }
    if (N > 2) return ps;

    const double w1 = flow.weight(0), w2 = flow.weight(1);
    const double alpha = w2 / w1;
    ps.radius_lower_bound =
        std::abs(cplx(-alpha * std::log(alpha) + (alpha > 1.0 ? (alpha - 1.0) * std::log(alpha - 1.0) : 0.0),
                      std::numbers::pi));

    // Order-by-order: with Delta known through x^{n-1}, the x^n coefficient of
    // G = a1 exp(-w1 Delta) + a2 exp(-x - w2 Delta) - 1 is G_n - c_n f'(D).
    const auto n_max = static_cast<std::size_t>(order);
    std::vector<double> delta(n_max + 1, 0.0);
    auto exp_series = [&](const std::vector<double>& g) {
        std::vector<double> e(n_max + 1, 0.0);
        e[0] = std::exp(g[0]);
        for (std::size_t n = 1; n <= n_max; ++n) {
            double acc = 0.0;
            for (std::size_t k = 1; k <= n; ++k) acc += static_cast<double>(k) * g[k] * e[n - k];
            e[n] = acc / static_cast<double>(n);
        }
        return e;
    };
    for (std::size_t n = 1; n <= n_max; ++n) {
        std::vector<double> g1(n_max + 1, 0.0), g2(n_max + 1, 0.0);
        for (std::size_t i = 0; i <= n_max; ++i) {
            g1[i] = -w1 * delta[i];
            g2[i] = -w2 * delta[i];
        }
        g2[1] -= 1.0;
        const auto e1 = exp_series(g1);
        const auto e2 = exp_series(g2);
        delta[n] = (a[0] * e1[n] + a[1] * e2[n]) / fp;
    }
    ps.coefficients.assign(delta.begin() + 1, delta.end());
    return ps;
}

/// Does the Ostrowski expansion of q satisfy the prediction hypothesis?
/// Single convergent denominators always do; otherwise the lowest digit index
/// k must be >= 2, or k = 1 with a_1 >= 2.
inline bool prediction_hypothesis_holds(const OstrowskiExpansion& ex, const ContinuedFraction& cf) {
    const std::size_t k = ex.lowest_index();
    std::int64_t nonzero = 0;
    for (auto d : ex.digits) nonzero += d != 0 ? 1 : 0;
    if (nonzero == 1 && ex.digits[k] == 1) return true;
    return k >= 2 || (k == 1 && cf.size() > 1 && cf.a(1) >= 2);
}

/// omega = D + 2 pi i q / w_1 + Delta(x), x = 2 pi i (q alpha - p), N = 2.
inline ComplexDimension predict_dimension(const FlowSpec& flow, std::int64_t q, const ContinuedFraction& cf,
                                          int order = kMaxSeriesOrder) {
    if (flow.size() != 2) throw PreconditionError("predict_dimension: continued-fraction form requires N = 2");
    const OstrowskiExpansion ex = ostrowski(q, cf);
    if (!prediction_hypothesis_holds(ex, cf)) {
        throw PreconditionError("predict_dimension: lowest Ostrowski digit index k = " + std::to_string(ex.lowest_index()) +
                                " violates k >= 2 (or k = 1 with a_1 >= 2)");
    }
    std::int64_t p = 0;
    for (std::size_t nu = ex.lowest_index(); nu < ex.digits.size(); ++nu) p += ex.digits[nu] * cf.p[nu];
    const long double frac = flow.alpha().offset(q, p);
    const cplx x(0.0, static_cast<double>(2.0L * std::numbers::pi_v<long double> * frac));
    if (!(std::abs(x) < std::numbers::pi)) throw PreconditionError("predict_dimension: |x| >= pi");
    const PerturbationSeries ps = perturbation_series(flow, order);
    ComplexDimension cd;
    cd.omega = cplx(ps.D, 2.0 * std::numbers::pi * static_cast<double>(q) / flow.min_weight()) + ps.evaluate(x);
    cd.residue = 1;
    cd.source = DimensionSource::predicted;
    cd.residual = std::abs(eval_f(flow, cd.omega).f);
    cd.series_order = order;
    return cd;
}

/// Degree-2 prediction from a simultaneous approximation (any N >= 2).
inline ComplexDimension predict_dimension(const FlowSpec& flow, const SimultaneousApproximation& sim) {
    const PerturbationSeries ps = perturbation_series(flow, 2);
    const long double w1 = flow.min_weight();
    std::vector<cplx> x(flow.size());
    for (std::size_t j = 0; j < flow.size(); ++j) {
        const long double frac =
            (flow.size() == 2 && j == 1)
                ? flow.alpha().offset(sim.q, sim.p[j])
                : static_cast<long double>(sim.q) * (static_cast<long double>(flow.weight(j)) / w1) -
                      static_cast<long double>(sim.p[j]);
        x[j] = {0.0, static_cast<double>(2.0L * std::numbers::pi_v<long double> * frac)};
    }
    x[0] = 0.0;
    ComplexDimension cd;
    cd.omega = cplx(ps.D, 2.0 * std::numbers::pi * static_cast<double>(sim.q) / flow.min_weight()) +
               ps.evaluate_quadratic(x);
    cd.residue = 1;
    cd.source = DimensionSource::predicted;
    cd.residual = std::abs(eval_f(flow, cd.omega).f);
    cd.series_order = 2;
    return cd;
}

struct RegionBand {
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t count = 0;
    double max_re = 0.0;      ///< over dimensions in the band (excluding D's own line)
    double gap = 0.0;         ///< D - max_re; +inf when the band is empty
    double theory_gap = 0.0;  ///< B / (M^2 t_hi^2); 0 when unavailable
};

struct RegionProfile {
    std::vector<RegionBand> bands;
    double B = 0.0;        ///< pi^4 e^{-(w1+w2) D} / (2 f'(D)^3), N = 2
    std::int64_t M = 0;    ///< max partial quotient in range, N = 2 nonlattice
    double fitted_B = 0.0; ///< min over dimensions of (D - Re omega) t^2
    double t_min = 0.0;    ///< heights below this are not checked against theory
    bool theory_checked = false;
};

/// Empirical dimension-free region per height band, checked against
/// D - B/(M^2 t^2) with 10% slack for N = 2 nonlattice windows.
inline RegionProfile dimension_free_region(const DimensionWindow& win, std::size_t band_count = 10) {
    if (band_count < 1) throw ValidationError("bands", "must be >= 1");
    RegionProfile prof;
    const FlowSpec& flow = win.flow;
    const double D = win.real_dims.D;
    const bool lattice = win.meta.method == "lattice";
    auto excluded = [&](const ComplexDimension& d) {
        if (lattice) return std::abs(d.omega.real() - D) < 1e-9;
        return d.omega.imag() == 0.0 && std::abs(d.omega.real() - D) < 1e-9;
    };

    const bool theory = !lattice && flow.size() == 2;
    if (theory) {
        const double w1 = flow.weight(0), w2 = flow.weight(1);
        double fp = 0.0;
        for (double w : flow.weights()) fp += w * std::exp(-w * D);
        prof.B = std::pow(std::numbers::pi, 4) * std::exp(-(w1 + w2) * D) / (2.0 * fp * fp * fp);
        const ContinuedFraction cf = expand_cf(flow.alpha(), 60);
        const double q_top = win.T * w1 / (2.0 * std::numbers::pi) + 1.0;
        prof.M = 1;
        for (std::size_t k = 1; k < cf.size(); ++k) {
            prof.M = std::max(prof.M, cf.a(k));
            if (static_cast<double>(cf.q[k - 1]) > q_top) break;
        }
        // Theory is checked from t_min = pi q_2 / w_1 upward.
        const std::size_t k0 = std::min<std::size_t>(2, cf.size() - 1);
        prof.t_min = 2.0 * std::numbers::pi * static_cast<double>(cf.q[k0]) / w1 * 0.5;
        prof.theory_checked = true;
    }

    const double step = win.T / static_cast<double>(band_count);
    for (std::size_t b = 0; b < band_count; ++b) {
        RegionBand band;
        band.t_lo = step * static_cast<double>(b);
        band.t_hi = step * static_cast<double>(b + 1);
        band.max_re = -std::numeric_limits<double>::infinity();
        for (const auto& d : win.dims) {
            const double t = std::abs(d.omega.imag());
            if (excluded(d) || t < band.t_lo || t >= band.t_hi || d.omega.imag() < 0.0) continue;
            ++band.count;
            band.max_re = std::max(band.max_re, d.omega.real());
        }
        band.gap = band.count ? D - band.max_re : std::numeric_limits<double>::infinity();
        if (theory) band.theory_gap = prof.B / (static_cast<double>(prof.M * prof.M) * band.t_hi * band.t_hi);
        prof.bands.push_back(band);
    }

    prof.fitted_B = std::numeric_limits<double>::infinity();
    for (const auto& d : win.dims) {
        const double t = std::abs(d.omega.imag());
        if (excluded(d) || t == 0.0) continue;
        if (theory && t < prof.t_min) continue;
        const double gap = D - d.omega.real();
        prof.fitted_B = std::min(prof.fitted_B, gap * t * t);
        if (theory) {
            const double bound = prof.B / (static_cast<double>(prof.M * prof.M) * t * t);
            if (gap < 0.9 * bound) {
                std::ostringstream os;
                os.precision(10);
                os << "dimension_free_region: omega = " << d.omega << " has D - Re omega = " << gap
                   << " below 0.9 * B/(M^2 t^2) = " << 0.9 * bound;
                throw IntegrityError(os.str());
            }
        }
    }
    return prof;
}

struct DensityRow {
    double height = 0.0;
    std::int64_t count = 0;
    double linear_term = 0.0;  ///< (w_N / pi) height
};

struct DensityReport {
    std::vector<DensityRow> rows;
    double C = 0.0;  ///< smallest C with count(T') <= (w_N/pi) T' + C for all T' <= T
};

inline DensityReport density_check(const DimensionWindow& win, std::size_t rows = 20) {
    if (win.dims.empty()) throw PreconditionError("density_check: window is empty");
    const double slope = win.flow.max_weight() / std::numbers::pi;
    DensityReport rep;
    rep.C = -std::numeric_limits<double>::infinity();
    std::vector<double> heights;
    for (const auto& d : win.dims) heights.push_back(std::abs(d.omega.imag()));
    std::sort(heights.begin(), heights.end());
    heights.erase(std::unique(heights.begin(), heights.end()), heights.end());
    for (double h : heights) rep.C = std::max(rep.C, static_cast<double>(win.count_up_to(h)) - slope * h);
    for (std::size_t r = 1; r <= rows; ++r) {
        DensityRow row;
        row.height = win.T * static_cast<double>(r) / static_cast<double>(rows);
        row.count = win.count_up_to(row.height);
        row.linear_term = slope * row.height;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace ssflow
