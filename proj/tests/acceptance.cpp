// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ssflow/ssflow.hpp"

using namespace ssflow;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string summary;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("miss: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Irrational> quadratic_fixtures() {
    std::vector<Irrational> out{Irrational::golden()};
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::int64_t> dd(2, 1000), pp(0, 10), qq(1, 5);
    while (out.size() < 4) {
        const Irrational a = Irrational::quadratic(pp(rng), dd(rng), qq(rng));
        if (a.kind == Irrational::Kind::quadratic && a.value() > 0.0) out.push_back(a);
    }
    return out;
}

FlowSpec log_primes(std::size_t n) {
    const double p[] = {2.0, 3.0, 5.0};
    std::vector<double> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(std::log(p[i]));
    return FlowSpec(w, n == 2 ? "log2-log3" : "log2-log3-log5");
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Outcome out;
    const FlowSpec g = flows::golden();
    const int reps = 1000;
    const auto t0 = std::chrono::steady_clock::now();
    double D = 0.0;
    for (int i = 0; i < reps; ++i) D = solve_dimension(g).D;
    const double per_call = seconds_since(t0) / reps;
    out.check(std::abs(D - 0.7792119034) <= 1e-7, fmt("D = %.12f", D));
    out.check(per_call < 1e-3, fmt("runtime %.3g s per call", per_call));
    out.summary = fmt("D = %.10f (|D - 0.7792119034| = %.2e), %.2g us per call", D, std::abs(D - 0.7792119034),
                      per_call * 1e6);
    return out;
}

Outcome criterion2() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto ps = perturbation_series(flows::golden(), 6);
    const double t = seconds_since(t0);
    const double printed[] = {-0.47862, 0.08812, 0.00450, -0.00205, -0.00039, 0.00004};
    double worst = 0.0;
    std::string coeffs;
    for (int i = 0; i < 6; ++i) {
        const double d = std::abs(ps.coefficients[static_cast<std::size_t>(i)] - printed[i]);
        worst = std::max(worst, d);
        coeffs += fmt("%s%.6f", i ? ", " : "", ps.coefficients[static_cast<std::size_t>(i)]);
        out.check(d <= 1e-4, fmt("c%d = %.6f vs %.5f", i + 1, ps.coefficients[static_cast<std::size_t>(i)], printed[i]));
    }
    out.check(t < 1.0, fmt("runtime %.3g s", t));
    out.summary = fmt("c1..c6 = (%s), max deviation %.2e", coeffs.c_str(), worst);
    return out;
}

Outcome criterion3() {
    Outcome out;
    const FlowSpec g = flows::golden();
    const auto t0 = std::chrono::steady_clock::now();
    const auto win = nonlattice_dimensions(g, 560.0);
    const double t = seconds_since(t0);
    const double D = win.real_dims.D;
    const double re[] = {-0.028499, -0.00023, -0.023561, -0.033919};
    const double im[] = {45.05, 498.58, 543.63, 453.53};
    double worst_re = 0.0, worst_im = 0.0;
    for (int i = 0; i < 4; ++i) {
        const auto hit = win.nearest({D + re[i], im[i]});
        const double dre = std::abs(hit->omega.real() - (D + re[i]));
        const double dim = std::abs(hit->omega.imag() - im[i]);
        worst_re = std::max(worst_re, dre);
        worst_im = std::max(worst_im, dim);
        out.note(fmt("target D%+.6f%+.2fi: found D%+.6f%+.4fi (|dRe| = %.1e, |dIm| = %.1e)", re[i], im[i],
                     hit->omega.real() - D, hit->omega.imag(), dre, dim));
        out.check(dre <= 2e-3 && dim <= 2e-3, fmt("root near Im %.2f", im[i]));
    }
    out.check(t < 30.0, fmt("runtime %.3g s", t));
    out.summary = fmt("%zu dims, surrogate q = %lld; worst |dRe| = %.1e, worst |dIm| = %.1e (targets printed to 2 "
                      "decimals in Im)",
                      win.dims.size(), static_cast<long long>(win.meta.surrogate_q), worst_re, worst_im);
    return out;
}

Outcome criterion4() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const double top = 15.0 * std::log(3.0);
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (const FlowSpec& f : {flows::cantor(), flows::fibonacci()}) {
        const auto lat = *classify_lattice(f);
        const auto census = enumerate_orbits(f, top);
        const LatticeExplicitFormula lf(f, lat);
        std::uniform_real_distribution<double> u(f.min_weight(), top);
        int taken = 0;
        while (taken < 200) {
            const double y = u(rng);
            const double n = y / lat.generator;
            if (std::abs(n - std::round(n)) < 1e-6) continue;
            ++taken;
            const double x = std::exp(y);
            const double c = psi(census, x, JumpConvention::half);
            const double v = lf.psi(x, JumpConvention::half);
            const double rel = std::abs(v - c) / std::abs(c);
            worst = std::max(worst, rel);
            out.check(rel <= 1e-9, fmt("%s at x = %.6g: %.12g vs %.12g", f.name().c_str(), x, v, c));
        }
    }
    const FlowSpec fib = flows::fibonacci();
    const auto census = enumerate_orbits(fib, 25.0 * std::log(2.0));
    std::uint64_t a = 1, b = 1;
    int fib_ok = 0;
    for (int n = 1; n <= 25; ++n) {
        const auto m = periodic_sequence_count(census, n * std::log(2.0));
        out.check(m == b, fmt("multiplicity at n = %d is %llu, expected %llu", n, static_cast<unsigned long long>(m),
                              static_cast<unsigned long long>(b)));
        fib_ok += m == b;
        const std::uint64_t c = a + b;
        a = b;
        b = c;
    }
    const double t = seconds_since(t0);
    out.check(t < 10.0, fmt("runtime %.3g s", t));
    out.summary = fmt("400 points, worst relative error %.2e; F_{n+1} multiplicities exact for %d/25 n", worst, fib_ok);
    return out;
}

Outcome criterion5() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(5);
    double worst_sum = 0.0, worst_prod = 0.0;
    std::size_t fails = 0, total = 0;
    for (const FlowSpec& f : {flows::golden()}) {
        const double D = solve_dimension(f).D;
        const double cutoff = 25.0 * f.min_weight();
        const auto census = enumerate_orbits(f, cutoff);
        std::uniform_real_distribution<double> re(D + 0.2, D + 1.2), im(-30.0, 30.0);
        std::vector<cplx> samples;
        for (int i = 0; i < 20; ++i) samples.emplace_back(re(rng), im(rng));
        samples.front() = {D + 0.2, 0.0};
        std::map<int, double> by_offset;
        for (const cplx s : samples) {
            const auto ev = eval_zeta(f, s);
            const cplx sum = euler_sum(census, s);
            const double e_sum = std::abs(sum - ev.neg_log_deriv) / std::abs(ev.neg_log_deriv);
            const cplx log_zeta = -std::log(ev.f_value);
            cplx d = log_euler_product(census, s) - log_zeta;
            d.imag(std::remainder(d.imag(), 2.0 * kPi));
            const double e_prod = std::abs(d) / std::abs(log_zeta);
            worst_sum = std::max(worst_sum, e_sum);
            worst_prod = std::max(worst_prod, e_prod);
            ++total;
            if (e_sum >= 1e-6 || e_prod >= 1e-6) ++fails;
            const int bucket = static_cast<int>(std::floor((s.real() - D) * 5.0 + 1e-9));
            by_offset[bucket] = std::max(by_offset[bucket], std::max(e_sum, e_prod));
        }
        std::string rows;
        for (const auto& [k, e] : by_offset) rows += fmt(" [D%+.1f, D%+.1f): %.1e;", k / 5.0, (k + 1) / 5.0, e);
        out.note(fmt("%s, cutoff %.2f (%zu orbits), worst error by Re s:%s", f.name().c_str(), cutoff, census.size(),
                     rows.c_str()));
        // word tail ~ r^L, r = sum_j e^{-(D+0.2) w_j}
        double r = 0.0;
        for (double w : f.weights()) r += std::exp(-(D + 0.2) * w);
        const double L_needed = std::log(1e-6 * (1.0 - r)) / std::log(r);
        out.note(fmt("%s: at Re s = D+0.2 the word tail r^L (r = %.4f) needs L >= %.0f letters for 1e-6, i.e. "
                     "cutoff >= %.0f, census ~ %.1e orbits",
                     f.name().c_str(), r, L_needed, L_needed * f.max_weight(),
                     std::exp(D * L_needed * f.max_weight()) / (L_needed * f.max_weight())));
    }
    out.check(fails == 0, fmt("%zu of %zu samples above 1e-6", fails, total));
    const double t = seconds_since(t0);
    out.check(t < 10.0, fmt("runtime %.3g s", t));
    out.summary = fmt("%zu samples, worst rel err euler_sum %.1e, log Euler product %.1e (cutoff 25 w1)", total,
                      worst_sum, worst_prod);
    return out;
}

Outcome criterion6() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t roundtrip = 0, unique_checked = 0, brackets = 0, residuals = 0, sims = 0;
    double worst_residual = 0.0;
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::int64_t> nn(1, 1'000'000);
    for (const Irrational& a : quadratic_fixtures()) {
        const auto cf = expand_cf(a, 60);
        for (std::int64_t n = 1; n <= 100000; ++n) {
            const auto ex = ostrowski(n, cf);
            std::int64_t back = 0;
            for (std::size_t nu = 0; nu < ex.digits.size(); ++nu) back += ex.digits[nu] * cf.q[nu];
            if (back != n || !ostrowski_digits_admissible(ex.digits, cf)) {
                out.check(false, fmt("roundtrip %s n = %lld", a.describe().c_str(), static_cast<long long>(n)));
                break;
            }
            ++roundtrip;
        }
        // exhaustive enumeration of admissible strings with value <= 2000
        const std::int64_t limit = 2000;
        std::size_t top = 0;
        while (cf.q[top + 1] <= limit) ++top;
        std::vector<int> hits(static_cast<std::size_t>(limit) + 1, 0);
        std::vector<std::int64_t> digits(top + 1, 0);
        std::function<void(long, std::int64_t)> rec = [&](long nu, std::int64_t sum) {
            if (nu < 0) {
                if (sum > 0 && ostrowski_digits_admissible(digits, cf)) ++hits[static_cast<std::size_t>(sum)];
                return;
            }
            const auto i = static_cast<std::size_t>(nu);
            const std::int64_t cap = i == 0 ? cf.a(1) - 1 : cf.a(i + 1);
            for (std::int64_t d = 0; d <= cap && sum + d * cf.q[i] <= limit; ++d) {
                digits[i] = d;
                rec(nu - 1, sum + d * cf.q[i]);
            }
            digits[i] = 0;
        };
        rec(static_cast<long>(top), 0);
        for (std::int64_t n = 1; n <= limit; ++n) {
            out.check(hits[static_cast<std::size_t>(n)] == 1,
                      fmt("uniqueness %s n = %lld (%d strings)", a.describe().c_str(), static_cast<long long>(n),
                          hits[static_cast<std::size_t>(n)]));
            ++unique_checked;
        }
        for (int i = 0; i < 2500; ++i) {
            const auto br = orbit_of_approximation(nn(rng), cf, a);
            out.check(br.strict, fmt("bracket %s n = %lld", a.describe().c_str(), static_cast<long long>(br.n)));
            ++brackets;
        }
        for (std::size_t k = 0; k + 1 < cf.size(); ++k) {
            const long double err = a.offset(cf.q[k], cf.p[k]);
            const long double expected = (k % 2 ? -1.0L : 1.0L) / cf.q_prime(k + 1);
            if (static_cast<double>(cf.q[k]) > 1e9) break;
            const double rel = static_cast<double>(std::abs(err / expected - 1.0L));
            worst_residual = std::max(worst_residual, rel);
            out.check(rel < 1e-9, fmt("convergent residual %s k = %zu: %.2e", a.describe().c_str(), k, rel));
            ++residuals;
        }
    }
    const FlowSpec p3 = log_primes(3);
    for (int Qi = 2; Qi <= 50; ++Qi) {
        const double Q = Qi;
        const auto sim = simultaneous_approx(p3, Q);
        for (std::size_t j = 0; j < 3; ++j)
            out.check(std::abs(sim.q * p3.weight(j) - sim.p[j] * p3.min_weight()) <= p3.min_weight() / Q * (1 + 1e-9),
                      fmt("simultaneous Q = %d, j = %zu", Qi, j));
        out.check(static_cast<double>(sim.q) < Q * Q, fmt("simultaneous Q = %d: q = %lld", Qi, static_cast<long long>(sim.q)));
        ++sims;
    }
    const double t = seconds_since(t0);
    out.check(t < 60.0, fmt("runtime %.3g s", t));
    out.summary = fmt("%zu roundtrips, %zu uniqueness checks, %zu brackets, %zu residuals (worst %.1e), %zu "
                      "simultaneous approximations",
                      roundtrip, unique_checked, brackets, residuals, worst_residual, sims);
    return out;
}

Outcome criterion7() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    struct Fixture {
        FlowSpec flow;
        double T;
    };
    const double l2 = std::log(2.0);
    const std::vector<Fixture> fixtures{
        {flows::cantor(), 100.0},
        {flows::fibonacci(), 100.0},
        {FlowSpec({1.0, 1.0, 1.0}, "three-equal"), 100.0},
        {FlowSpec({1.0, 1.5}, "one-three-halves"), 100.0},
        {FlowSpec({l2, 2.0 * l2, 3.0 * l2}, "log2-multiples"), 100.0},
        {flows::golden(), 560.0},
        {log_primes(2), 300.0},
        {log_primes(3), 60.0},
    };
    std::size_t windows = 0, dims_checked = 0;
    double worst_C = -1e300;
    for (const auto& fx : fixtures) {
        const auto win = dimensions_window(fx.flow, fx.T);
        const bool lattice = win.meta.method == "lattice";
        const double D = win.real_dims.D, D0 = win.real_dims.D0;
        const std::string name = fx.flow.name();
        std::size_t closure = 0, strip = 0, resid = 0, period = 0;
        for (const auto& d : win.dims) {
            bool conj = false;
            for (const auto& e : win.dims) conj = conj || (e.omega == std::conj(d.omega) && e.residue == d.residue);
            closure += !conj;
            strip += !(d.omega.real() >= D0 - 1e-9 && d.omega.real() <= D + 1e-12);
            resid += !(d.residual < residual_bound(fx.flow, d.omega));
            if (lattice) {
                const double p = 2.0 * kPi / win.meta.generator;
                if (d.omega.imag() + p <= fx.T) {
                    const auto shifted = win.nearest(d.omega + cplx(0.0, p));
                    period += !(shifted && std::abs(shifted->omega - (d.omega + cplx(0.0, p))) < 1e-9 &&
                                shifted->residue == d.residue);
                }
            }
            ++dims_checked;
        }
        const double C = density_check(win).C;
        worst_C = std::max(worst_C, C);
        out.check(closure == 0, fmt("%s: %zu dims without conjugate", name.c_str(), closure));
        out.check(strip == 0, fmt("%s: %zu dims outside [D0, D]", name.c_str(), strip));
        out.check(resid == 0, fmt("%s: %zu residuals above bound", name.c_str(), resid));
        out.check(period == 0, fmt("%s: %zu dims break 2 pi i / w periodicity", name.c_str(), period));
        out.check(C <= 3.0, fmt("%s: density excess C = %.3f", name.c_str(), C));
        out.note(fmt("%s (%s, T = %g): %zu dims, C = %.3f", name.c_str(), win.meta.method.c_str(), fx.T,
                     win.dims.size(), C));
        ++windows;
    }
    const double t = seconds_since(t0);
    out.check(t < 60.0, fmt("runtime %.3g s", t));
    out.summary = fmt("%zu windows, %zu dimensions checked, max density excess C = %.3f", windows, dims_checked, worst_C);
    return out;
}

Outcome criterion8() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const FlowSpec g = flows::golden();
    const auto census = enumerate_orbits(g, 14.0);
    std::vector<double> grid;
    for (double lx = 5.0; lx <= 14.0 + 1e-9; lx += 0.01) grid.push_back(std::exp(lx));
    std::vector<double> means;
    ErrorScalingReport rep;
    for (double T : {50.0, 150.0, 500.0}) {
        const auto win = nonlattice_dimensions(g, T);
        if (T == 500.0) rep = error_scaling_report(win, census, grid);
        const auto ex = make_expansion(win, 1);
        double acc = 0.0;
        for (double x : grid) acc += std::abs(ex.evaluate(x) - psi(census, x, JumpConvention::half));
        means.push_back(acc / static_cast<double>(grid.size()));
    }
    double worst_ratio = 0.0, worst_at = 0.0;
    for (const auto& r : rep.rows) {
        const double ratio = std::abs(r.normalized_error) / (rep.fitted_c * r.envelope);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_at = std::log(r.x);
        }
    }
    out.check(worst_ratio < 3.0, fmt("normalized error reaches %.2f x envelope at log x = %.2f", worst_ratio, worst_at));
    out.check(means[0] > means[1] && means[1] > means[2],
              fmt("mean |formula - census| not decreasing: %.3f, %.3f, %.3f", means[0], means[1], means[2]));
    out.note(fmt("envelope exponent %.3f (l = %g, estimated), peak-fit c = %.4f, all-sample fit c = %.4f", rep.exponent,
                 rep.l, rep.fitted_c, rep.fitted_c_all));
    const double t = seconds_since(t0);
    out.check(t < 300.0, fmt("runtime %.3g s", t));
    out.summary = fmt("max |err|/(c env) = %.2f at log x = %.2f; mean |formula - census| at T = 50, 150, 500: %.3f, "
                      "%.3f, %.3f",
                      worst_ratio, worst_at, means[0], means[1], means[2]);
    return out;
}

Outcome criterion9() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(9);
    double worst_lat = 0.0, worst_gold = 0.0;
    std::size_t bracket = 0;
    auto tauberian = [&](const OrbitCensus& census, double x, double h, const std::string& name) {
        const double avg = (psi_integral(census, x + h) - psi_integral(census, x)) / h;
        const double p = psi(census, x);
        out.check(avg >= p * (1.0 - 1e-12), fmt("%s Tauberian bracket at x = %.6g: %.17g < %.17g", name.c_str(), x, avg, p));
        ++bracket;
    };
    for (const FlowSpec& f : {flows::cantor(), flows::fibonacci()}) {
        const auto census = enumerate_orbits(f, 13.0);
        const LatticeExplicitFormula lf(f, *classify_lattice(f));
        std::uniform_real_distribution<double> u(1.0, 12.0);
        for (int i = 0; i < 20; ++i) {
            const double x = std::exp(u(rng));
            const double c = psi_integral(census, x);
            const double rel = std::abs(lf.psi_level2(x) - c) / std::abs(c);
            worst_lat = std::max(worst_lat, rel);
            out.check(rel <= 1e-6, fmt("%s level 2 at x = %.6g: rel %.2e", f.name().c_str(), x, rel));
            if (std::log(x) > std::numbers::e) {
                const double h = tauberian_width(x, 2, 0.0);
                if (std::log(x + h) <= 13.0) tauberian(census, x, h, f.name());
            }
        }
    }
    const FlowSpec g = flows::golden();
    const auto census = enumerate_orbits(g, 12.5);
    const auto win = nonlattice_dimensions(g, 500.0);
    const auto ex = make_expansion(win, 2);
    std::uniform_real_distribution<double> u(5.0, 12.0);
    for (int i = 0; i < 20; ++i) {
        const double x = std::exp(u(rng));
        const double c = psi_integral(census, x);
        const double rel = std::abs(ex.evaluate(x) - c) / std::abs(c);
        worst_gold = std::max(worst_gold, rel);
        out.check(rel <= 1e-3, fmt("golden level 2 at x = %.6g: rel %.2e", x, rel));
        const double h = tauberian_width(x, 2, 0.0);
        if (std::log(x + h) <= 12.5) tauberian(census, x, h, "golden");
    }
    const double t = seconds_since(t0);
    out.check(t < 60.0, fmt("runtime %.3g s", t));
    out.summary = fmt("worst relative error lattice %.1e, golden (T = 500) %.1e; %zu Tauberian brackets", worst_lat,
                      worst_gold, bracket);
    return out;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
    static const std::vector<std::pair<std::string, std::function<Outcome()>>> list{
        {"golden flow dimension", criterion1},
        {"golden flow perturbation series", criterion2},
        {"golden flow complex dimensions", criterion3},
        {"lattice exactness", criterion4},
        {"Euler identities", criterion5},
        {"Diophantine suite", criterion6},
        {"structure invariants", criterion7},
        {"nonlattice error behavior", criterion8},
        {"level-2 consistency", criterion9},
    };
    return list;
}

bool run(std::size_t n) {
    const auto& [title, fn] = criteria()[n - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.pass = false;
        o.summary = std::string("exception: ") + e.what();
    }
    const double t = seconds_since(t0);
    std::printf("criterion %zu: %s  %s: %s [%.2f s]\n", n, o.pass ? "PASS" : "FAIL", title.c_str(), o.summary.c_str(), t);
    for (const auto& note : o.notes) std::printf("    %s\n", note.c_str());
    std::fflush(stdout);
    return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> which;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            const long n = std::strtol(argv[++i], nullptr, 10);
            if (n < 1 || n > static_cast<long>(criteria().size())) {
                std::fprintf(stderr, "criterion must be 1..%zu\n", criteria().size());
                return 2;
            }
            which.push_back(static_cast<std::size_t>(n));
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (which.empty())
        for (std::size_t n = 1; n <= criteria().size(); ++n) which.push_back(n);
    bool all = true;
    for (std::size_t n : which) all = run(n) && all;
    return all ? 0 : 1;
}
