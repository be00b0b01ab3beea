#pragma once

// Closed forms for a self-similar flow:
//   f(s)   = 1 - sum_j e^{-w_j s}
//   zeta   = 1 / f(s)
//   -zeta'/zeta = sum_j w_j e^{-w_j s} / f(s)

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "ssflow/errors.hpp"
#include "ssflow/flow.hpp"

namespace ssflow {

using cplx = std::complex<double>;

/// e^{-w s} as e^{-w Re s} (cos, sin)(-w Im s).
inline cplx exp_neg(double w, cplx s) {
    const double mag = std::exp(-w * s.real());
    const double ang = -w * s.imag();
    return {mag * std::cos(ang), mag * std::sin(ang)};
}

/// Value and first two derivatives of f(s) = 1 - sum_j e^{-w_j s}.
struct FValue {
    cplx f;
    cplx f1;
    cplx f2;
};

inline FValue eval_f(const FlowSpec& flow, cplx s) {
    FValue out{1.0, 0.0, 0.0};
    for (double w : flow.weights()) {
        const cplx e = exp_neg(w, s);
        out.f -= e;
        out.f1 += w * e;
        out.f2 -= w * w * e;
    }
    return out;
}

/// Natural size of f' near Re s; used to scale pole and residual tolerances.
inline double f_scale(const FlowSpec& flow, double re_s) {
    double acc = 1.0;
    for (double w : flow.weights()) acc += w * std::exp(-w * re_s);
    return acc;
}

inline constexpr double kPoleTolerance = 1e-10;

struct ZetaEvaluation {
    cplx s;
    bool at_pole = false;  ///< zeta and neg_log_deriv are infinite
    cplx zeta;
    cplx neg_log_deriv;
    cplx f_value;
    cplx f_prime;
    cplx f_double_prime;
};

inline ZetaEvaluation eval_zeta(const FlowSpec& flow, cplx s) {
    const FValue fv = eval_f(flow, s);
    ZetaEvaluation out;
    out.s = s;
    out.f_value = fv.f;
    out.f_prime = fv.f1;
    out.f_double_prime = fv.f2;
    if (std::abs(fv.f) < kPoleTolerance * f_scale(flow, s.real())) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        out.at_pole = true;
        out.zeta = {inf, inf};
        out.neg_log_deriv = {inf, inf};
        return out;
    }
    out.zeta = 1.0 / fv.f;
    // f' = sum_j w_j e^{-w_j s} is exactly the numerator of -zeta'/zeta.
    out.neg_log_deriv = fv.f1 / fv.f;
    return out;
}

/// -zeta'/zeta(0) = -(1/(N-1)) sum_j w_j.
inline double log_deriv_at_zero(const FlowSpec& flow) {
    if (flow.size() < 2) throw PreconditionError("log_deriv_at_zero: requires N >= 2");
    return -flow.weight_sum() / static_cast<double>(flow.size() - 1);
}

struct ZeroFreeReport {
    bool zero_free = true;        ///< every sample meets the lower bound
    double min_modulus = std::numeric_limits<double>::infinity();
    cplx argmin;
    std::size_t samples = 0;
    std::size_t poles_skipped = 0;
};

/// Checks |zeta(s)| >= 1 / (1 + sum_j r_j^{Re s}) > 0 on every sample.
inline ZeroFreeReport zeta_zero_free(const FlowSpec& flow, const std::vector<cplx>& samples) {
    ZeroFreeReport rep;
    for (const cplx& s : samples) {
        ++rep.samples;
        const ZetaEvaluation ev = eval_zeta(flow, s);
        if (ev.at_pole) {
            ++rep.poles_skipped;
            continue;
        }
        double bound = 1.0;
        for (double w : flow.weights()) bound += std::exp(-w * s.real());
        const double mod = std::abs(ev.zeta);
        if (!(mod >= (1.0 / bound) * (1.0 - 1e-12)) || !(mod > 0.0)) rep.zero_free = false;
        if (mod < rep.min_modulus) {
            rep.min_modulus = mod;
            rep.argmin = s;
        }
    }
    return rep;
}

/// Rectangular grid Re in [re0, re1], Im in [im0, im1], nr x ni points.
inline std::vector<cplx> complex_grid(double re0, double re1, std::size_t nr, double im0, double im1, std::size_t ni) {
    std::vector<cplx> g;
    g.reserve(nr * ni);
    for (std::size_t a = 0; a < nr; ++a) {
        const double re = nr == 1 ? re0 : re0 + (re1 - re0) * static_cast<double>(a) / static_cast<double>(nr - 1);
        for (std::size_t b = 0; b < ni; ++b) {
            const double im = ni == 1 ? im0 : im0 + (im1 - im0) * static_cast<double>(b) / static_cast<double>(ni - 1);
            g.emplace_back(re, im);
        }
    }
    return g;
}

}  // namespace ssflow
