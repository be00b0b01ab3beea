#pragma once

// Brute-force census of primitive periodic orbits of the full shift on N
// letters, weighted by a self-similar weight function, and the counting
// functions psi, theta, pi built on it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ssflow/errors.hpp"
#include "ssflow/flow.hpp"

namespace ssflow {

/// How a counting function is valued exactly at one of its jumps.
enum class JumpConvention {
    full,  ///< right-continuous: the whole jump is counted
    half,  ///< average of the left and right limits
};

/// One primitive periodic orbit, represented by its Lyndon word (the
/// lexicographically least rotation). Letters are 0-based internally.
struct OrbitRecord {
    std::vector<std::uint8_t> representative;
    double total_weight = 0.0;

    std::size_t length() const noexcept { return representative.size(); }

    /// Letters rendered 1-based; separated by '.' when N > 9.
    std::string word(std::size_t alphabet) const {
        std::string out;
        for (std::size_t i = 0; i < representative.size(); ++i) {
            if (alphabet > 9 && i > 0) out += '.';
            out += std::to_string(representative[i] + 1);
        }
        return out;
    }
};

inline constexpr std::size_t kDefaultCensusCap = 100'000'000;

class OrbitCensus {
public:
    OrbitCensus(FlowSpec flow, double cutoff, std::vector<OrbitRecord> records)
        : flow_(std::move(flow)), cutoff_(cutoff), records_(std::move(records)) {}

    const FlowSpec& flow() const noexcept { return flow_; }
    double cutoff() const noexcept { return cutoff_; }
    const std::vector<OrbitRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

private:
    FlowSpec flow_;
    double cutoff_;
    std::vector<OrbitRecord> records_;  // ascending weight, then lexicographic
};

namespace detail {

inline double jump_epsilon(double level) { return 1e-12 * std::max(1.0, std::abs(level)); }

// Recursive prenecklace generation: a[1..t-1] is a prenecklace whose longest
// Lyndon prefix has length p. It is a Lyndon word iff p == t-1. Letters are
// tried in ascending order; weights are sorted ascending too, so a weight
// overflow ends the loop.
struct LyndonEnumerator {
    const std::vector<double>& w;
    double cutoff;
    std::size_t max_len;
    std::size_t cap;
    std::vector<std::uint8_t> a;  // a[0] is a sentinel
    std::vector<double> prefix_weight;
    std::vector<OrbitRecord>& out;

    void run(std::size_t t, std::size_t p) {
        if (t >= 2 && p == t - 1) {
            if (out.size() >= cap) {
                std::ostringstream os;
                os << "orbit census exceeds cap of " << cap << " records";
                throw ResourceError(os.str());
            }
            OrbitRecord rec;
            rec.representative.assign(a.begin() + 1, a.begin() + static_cast<long>(t));
            rec.total_weight = prefix_weight[t - 1];
            out.push_back(std::move(rec));
        }
        if (t > max_len) return;
        const std::uint8_t start = a[t - p];
        for (std::size_t c = start; c < w.size(); ++c) {
            const double next = prefix_weight[t - 1] + w[c];
            if (next > cutoff + jump_epsilon(cutoff)) break;
            a[t] = static_cast<std::uint8_t>(c);
            prefix_weight[t] = next;
            run(t + 1, c == start ? p : t);
        }
    }
};

}  // namespace detail

/// All primitive periodic orbits with total weight <= cutoff.
inline OrbitCensus enumerate_orbits(const FlowSpec& flow, double weight_cutoff, std::size_t cap = kDefaultCensusCap) {
    if (!(weight_cutoff > 0.0) || !std::isfinite(weight_cutoff))
        throw ValidationError("cutoff", "weight cutoff must be positive and finite");
    if (flow.size() > 255) throw PreconditionError("enumerate_orbits: alphabet larger than 255 letters");
    std::vector<OrbitRecord> records;
    if (flow.size() == 0 || weight_cutoff < flow.min_weight() - detail::jump_epsilon(weight_cutoff))
        return OrbitCensus(flow, weight_cutoff, std::move(records));

    const auto max_len = static_cast<std::size_t>(std::floor(weight_cutoff / flow.min_weight() + 1e-9));
    detail::LyndonEnumerator gen{flow.weights(), weight_cutoff, max_len, cap, {}, {}, records};
    gen.a.assign(max_len + 2, 0);
    gen.prefix_weight.assign(max_len + 2, 0.0);
    try {
        gen.run(1, 1);
    } catch (const ResourceError&) {
        const DimensionPair dims = solve_dimension(flow);
        std::ostringstream os;
        os << "orbit census exceeds cap of " << cap << " records; count bound ~ "
           << static_cast<double>(max_len) * std::exp(dims.D * weight_cutoff) << " (lower the cutoff)";
        throw ResourceError(os.str());
    }
    std::sort(records.begin(), records.end(), [](const OrbitRecord& x, const OrbitRecord& y) {
        if (x.total_weight != y.total_weight) return x.total_weight < y.total_weight;
        return x.representative < y.representative;
    });
    return OrbitCensus(flow, weight_cutoff, std::move(records));
}

namespace detail {

inline double census_level(const OrbitCensus& census, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw PreconditionError("counting function argument must be positive and finite");
    const double level = std::log(x);
    if (level > census.cutoff() + jump_epsilon(census.cutoff())) {
        std::ostringstream os;
        os.precision(17);
        os << "log x = " << level << " exceeds census cutoff " << census.cutoff();
        throw PreconditionError(os.str());
    }
    return level;
}

// Contribution factor of a jump at `at` seen from level L: 1, 1/2 or 0.
inline double jump_factor(double at, double level, JumpConvention jump) {
    const double eps = jump_epsilon(level);
    if (at < level - eps) return 1.0;
    if (at <= level + eps) return jump == JumpConvention::full ? 1.0 : 0.5;
    return 0.0;
}

}  // namespace detail

/// psi(x) = sum over (orbit p, k >= 1) with k w(p) <= log x of w(p).
inline double psi(const OrbitCensus& census, double x, JumpConvention jump = JumpConvention::full) {
    const double level = detail::census_level(census, x);
    double acc = 0.0;
    for (const auto& rec : census.records()) {
        const double w = rec.total_weight;
        if (w > level + detail::jump_epsilon(level)) break;
        for (int k = 1;; ++k) {
            const double f = detail::jump_factor(k * w, level, jump);
            if (f == 0.0) break;
            acc += f * w;
        }
    }
    return acc;
}

/// theta(x) = sum over primitive orbits with w(p) <= log x of w(p).
inline double theta(const OrbitCensus& census, double x, JumpConvention jump = JumpConvention::full) {
    const double level = detail::census_level(census, x);
    double acc = 0.0;
    for (const auto& rec : census.records()) {
        const double f = detail::jump_factor(rec.total_weight, level, jump);
        if (f == 0.0) break;
        acc += f * rec.total_weight;
    }
    return acc;
}

/// Number of primitive orbits with w(p) <= log x.
inline std::uint64_t pi_count(const OrbitCensus& census, double x) {
    const double level = detail::census_level(census, x);
    std::uint64_t n = 0;
    for (const auto& rec : census.records()) {
        if (detail::jump_factor(rec.total_weight, level, JumpConvention::full) == 0.0) break;
        ++n;
    }
    return n;
}

/// Exact integral of the census step function: int_0^x psi(t) dt.
inline double psi_integral(const OrbitCensus& census, double x) {
    const double level = detail::census_level(census, x);
    double acc = 0.0;
    for (const auto& rec : census.records()) {
        const double w = rec.total_weight;
        if (w > level) break;
        for (int k = 1; k * w <= level; ++k) acc += w * (x - std::exp(k * w));
    }
    return acc;
}

/// Number of periodic sequences (words, not orbits) whose total weight equals
/// `weight`: every k-th power of an orbit p contributes its #p rotations.
inline std::uint64_t periodic_sequence_count(const OrbitCensus& census, double weight) {
    const double eps = detail::jump_epsilon(weight);
    std::uint64_t n = 0;
    for (const auto& rec : census.records()) {
        if (rec.total_weight > weight + eps) break;
        const double k = std::round(weight / rec.total_weight);
        if (k >= 1.0 && std::abs(k * rec.total_weight - weight) <= eps) n += rec.length();
    }
    return n;
}

/// Truncated Euler sum for -zeta'/zeta:
/// sum_p sum_{k : k w(p) <= cutoff} w(p) e^{-s k w(p)}.
inline std::complex<double> euler_sum(const OrbitCensus& census, std::complex<double> s) {
    const double cutoff = census.cutoff() + detail::jump_epsilon(census.cutoff());
    std::complex<double> acc = 0.0;
    for (const auto& rec : census.records()) {
        const double w = rec.total_weight;
        for (int k = 1; k * w <= cutoff; ++k) acc += w * std::exp(-s * (k * w));
    }
    return acc;
}

/// log of the truncated Euler product: sum_p -log(1 - e^{-s w(p)}).
inline std::complex<double> log_euler_product(const OrbitCensus& census, std::complex<double> s) {
    std::complex<double> acc = 0.0;
    for (const auto& rec : census.records()) acc -= std::log(1.0 - std::exp(-s * rec.total_weight));
    return acc;
}

/// Same truncation as euler_sum for log zeta: sum_p sum_{k w(p) <= cutoff} e^{-s k w(p)} / k,
/// i.e. the sum over periodic sequences x of e^{-s w(x)} / l(x).
inline std::complex<double> log_zeta_sum(const OrbitCensus& census, std::complex<double> s) {
    const double cutoff = census.cutoff() + detail::jump_epsilon(census.cutoff());
    std::complex<double> acc = 0.0;
    for (const auto& rec : census.records()) {
        const double w = rec.total_weight;
        for (int k = 1; k * w <= cutoff; ++k) acc += std::exp(-s * (k * w)) / static_cast<double>(k);
    }
    return acc;
}

}  // namespace ssflow
