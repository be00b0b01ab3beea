#pragma once

// Self-similar flow specification, lattice/nonlattice classification, and the
// real dimension D together with the left edge D0 of the critical strip.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ssflow/continued_fraction.hpp"
#include "ssflow/errors.hpp"

namespace ssflow {

/// Weights w_1 <= ... <= w_N (natural log units) of a self-similar flow.
/// Scaling ratios are r_j = exp(-w_j).
class FlowSpec {
public:
    FlowSpec() = default;

    explicit FlowSpec(std::vector<double> weights, std::string name = {},
                      std::optional<Irrational> alpha_hint = std::nullopt)
        : weights_(std::move(weights)), name_(std::move(name)), alpha_hint_(alpha_hint) {
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j]))
                throw ValidationError("weights[" + std::to_string(j) + "]", "weight must be positive and finite");
        }
        std::sort(weights_.begin(), weights_.end());
        if (alpha_hint_ && weights_.size() != 2) alpha_hint_.reset();
    }

    static FlowSpec from_ratios(const std::vector<double>& ratios, std::string name = {}) {
        std::vector<double> w;
        w.reserve(ratios.size());
        for (std::size_t j = 0; j < ratios.size(); ++j) {
            const double r = ratios[j];
            if (!(r > 0.0 && r < 1.0))
                throw ValidationError("ratios[" + std::to_string(j) + "]", "scaling ratio must lie in (0, 1)");
            w.push_back(-std::log(r));
        }
        return FlowSpec(std::move(w), std::move(name));
    }

    std::size_t size() const noexcept { return weights_.size(); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double weight(std::size_t j) const { return weights_.at(j); }
    double ratio(std::size_t j) const { return std::exp(-weights_.at(j)); }
    double min_weight() const { return weights_.front(); }
    double max_weight() const { return weights_.back(); }
    double weight_sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }
    const std::string& name() const noexcept { return name_; }

    /// Exact form of alpha = w_2 / w_1 for two-weight flows built from
    /// symbolic constants.
    const std::optional<Irrational>& alpha_hint() const noexcept { return alpha_hint_; }

    /// alpha = w_2 / w_1 for N = 2 in the best available form.
    Irrational alpha() const {
        if (size() != 2) throw PreconditionError("alpha is defined for two-weight flows only");
        if (alpha_hint_) return *alpha_hint_;
        return Irrational::from_double(weights_[1] / weights_[0]);
    }

    /// Returns the flow with every weight multiplied by c > 0.
    FlowSpec scaled(double c) const {
        std::vector<double> w = weights_;
        for (double& x : w) x *= c;
        return FlowSpec(std::move(w), name_, alpha_hint_);
    }

private:
    std::vector<double> weights_;
    std::string name_;
    std::optional<Irrational> alpha_hint_;
};

namespace flows {

/// Two equal weights log 3.
inline FlowSpec cantor() { return FlowSpec({std::log(3.0), std::log(3.0)}, "cantor"); }

/// Weights log 2 and 2 log 2.
inline FlowSpec fibonacci() { return FlowSpec({std::log(2.0), 2.0 * std::log(2.0)}, "fibonacci"); }

/// Weights log 2 and phi log 2 (nonlattice).
inline FlowSpec golden() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    return FlowSpec({std::log(2.0), phi * std::log(2.0)}, "golden", Irrational::golden());
}

inline std::optional<FlowSpec> builtin(const std::string& name) {
    if (name == "cantor") return cantor();
    if (name == "fibonacci") return fibonacci();
    if (name == "golden") return golden();
    return std::nullopt;
}

}  // namespace flows

/// Weight group is discrete: w_j = k_j * generator with gcd(k) = 1.
struct LatticeStructure {
    double generator = 0.0;
    std::vector<std::int64_t> multipliers;

    std::int64_t degree() const { return multipliers.back(); }
};

/// Relative tolerance for declaring w_j / w_1 rational.
inline constexpr double kLatticeTolerance = 1e-14;

/// Lattice verdict at resolution max_denominator; nullopt means nonlattice
/// at this resolution.
inline std::optional<LatticeStructure> classify_lattice(const FlowSpec& flow, std::int64_t max_denominator = 1'000'000) {
    if (max_denominator < 1) throw PreconditionError("classify_lattice: max_denominator must be >= 1");
    if (flow.size() == 0) return std::nullopt;
    const double w1 = flow.min_weight();

    std::vector<std::int64_t> nums, dens;
    for (double w : flow.weights()) {
        const double ratio = w / w1;
        const ContinuedFraction cf = expand_cf(ratio, 64, CfMode::exact_rational);
        bool found = false;
        for (std::size_t k = 0; k < cf.size(); ++k) {
            if (cf.q[k] > max_denominator) break;
            const double approx = static_cast<double>(cf.p[k]) / static_cast<double>(cf.q[k]);
            if (std::abs(ratio - approx) < kLatticeTolerance * ratio) {
                nums.push_back(cf.p[k]);
                dens.push_back(cf.q[k]);
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }

    // w_j / w_1 = n_j / d_j  =>  k_j = n_j * (L / d_j) with L = lcm(d_j), k_1 = L.
    std::int64_t L = 1;
    for (std::int64_t d : dens) {
        L = std::lcm(L, d);
        if (L > max_denominator) return std::nullopt;
    }
    LatticeStructure lat;
    std::int64_t g = 0;
    for (std::size_t j = 0; j < nums.size(); ++j) {
        std::int64_t k = 0;
        if (__builtin_mul_overflow(nums[j], L / dens[j], &k)) return std::nullopt;
        lat.multipliers.push_back(k);
        g = std::gcd(g, k);
    }
    for (auto& k : lat.multipliers) k /= g;
    lat.generator = w1 / static_cast<double>(lat.multipliers.front());
    return lat;
}

inline FlowSpec flow_from_lattice(const LatticeStructure& lat, std::string name = {}) {
    std::vector<double> w;
    for (auto k : lat.multipliers) w.push_back(static_cast<double>(k) * lat.generator);
    return FlowSpec(std::move(w), std::move(name));
}

/// D solves sum_j r_j^D = 1; D0 solves 1 + sum_{j <= N-m} r_j^D0 = m r_N^D0
/// where m counts the weights equal to w_N.
struct DimensionPair {
    double D = 0.0;
    double D0 = 0.0;
    int m = 0;
    /// N < 2: the equation has no positive solution; D = D0 = 0.
    bool degenerate = false;
};

namespace detail {

// Bisection on a monotone function with a sign change on [lo, hi], then a
// Newton polish that is only accepted while it stays inside the bracket.
template <class F, class DF>
double bracketed_root(F&& fn, DF&& dfn, double lo, double hi, double tol, const char* what) {
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) {
        std::ostringstream os;
        os << what << ": no sign change on [" << lo << ", " << hi << "]";
        throw SolverError(os.str());
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        const double step = fn(s) / dfn(s);
        const double next = s - step;
        if (!(next >= lo && next <= hi)) break;
        s = next;
        if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(s))) break;
    }
    if (!(std::abs(fn(s)) < tol)) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": residual " << fn(s) << " above " << tol << " with bracket [" << lo << ", " << hi << "]";
        throw SolverError(os.str());
    }
    return s;
}

}  // namespace detail

inline DimensionPair solve_dimension(const FlowSpec& flow) {
    DimensionPair out;
    const auto& w = flow.weights();
    const std::size_t N = w.size();
    if (N < 2) {
        out.degenerate = true;
        out.m = static_cast<int>(N);
        return out;
    }

    auto f = [&](double s) {
        double acc = 1.0;
        for (double wj : w) acc -= std::exp(-wj * s);
        return acc;
    };
    auto df = [&](double s) {
        double acc = 0.0;
        for (double wj : w) acc += wj * std::exp(-wj * s);
        return acc;
    };
    out.D = detail::bracketed_root(f, df, 0.0, std::log(static_cast<double>(N)) / w.front(), 1e-13, "solve_dimension(D)");

    const double wN = w.back();
    int m = 0;
    for (double wj : w) m += (wj == wN) ? 1 : 0;
    out.m = m;
    // Multiply the defining equation by r_N^{-s}:
    // h(s) = m - e^{w_N s} - sum_{j <= N-m} e^{(w_N - w_j) s}, strictly decreasing.
    auto h = [&](double s) {
        double acc = static_cast<double>(m) - std::exp(wN * s);
        for (std::size_t j = 0; j + m < N; ++j) acc -= std::exp((wN - w[j]) * s);
        return acc;
    };
    auto dh = [&](double s) {
        double acc = -wN * std::exp(wN * s);
        for (std::size_t j = 0; j + m < N; ++j) acc -= (wN - w[j]) * std::exp((wN - w[j]) * s);
        return acc;
    };
    const double hi = std::log(static_cast<double>(m)) / wN;
    if (static_cast<std::size_t>(m) == N) {
        out.D0 = hi;
    } else {
        double lo = hi - 1.0;
        for (int it = 0; h(lo) <= 0.0; ++it) {
            if (it > 200) throw SolverError("solve_dimension(D0): could not bracket root");
            lo = hi - 2.0 * (hi - lo);
        }
        out.D0 = detail::bracketed_root(h, dh, lo, hi, 1e-13 * static_cast<double>(m), "solve_dimension(D0)");
    }
    return out;
}

}  // namespace ssflow
