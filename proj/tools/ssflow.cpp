// ssflow: command-line front end for the self-similar flow library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssflow/ssflow.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssflow;

namespace {

struct Globals {
    std::string out_dir = "ssflow-out";
    bool digits17 = false;
    int workers = 1;
    std::size_t census_cap = kDefaultCensusCap;
    std::int64_t max_den = 1'000'000;
};

JumpConvention parse_jump(const std::string& s) {
    if (s == "full") return JumpConvention::full;
    if (s == "half") return JumpConvention::half;
    throw ValidationError("jump", "expected full or half");
}

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be positive and finite");
}

std::vector<double> log_grid(double x_min, double x_max, std::size_t points) {
    require_positive(x_min, "x-min");
    require_positive(x_max, "x-max");
    if (x_max < x_min) throw ValidationError("x-max", "must be >= x-min");
    if (points < 1) throw ValidationError("points", "must be >= 1");
    std::vector<double> xs;
    const double a = std::log(x_min), b = std::log(x_max);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        xs.push_back(std::exp(a + (b - a) * t));
    }
    return xs;
}

json flow_json(const FlowSpec& flow) {
    json j;
    j["name"] = flow.name();
    j["weights"] = flow.weights();
    if (flow.alpha_hint()) j["alpha"] = flow.alpha_hint()->describe();
    return j;
}

json lattice_json(const std::optional<LatticeStructure>& lat, std::int64_t max_den) {
    json j;
    j["max_denominator"] = max_den;
    if (lat) {
        j["verdict"] = "lattice";
        j["generator"] = lat->generator;
        j["multipliers"] = lat->multipliers;
    } else {
        j["verdict"] = "nonlattice";
    }
    return j;
}

std::optional<LatticeStructure> classify(const FlowSpec& flow, std::int64_t max_den) {
    if (flow.size() == 2 && flow.alpha_hint()) return std::nullopt;
    return classify_lattice(flow, max_den);
}

void write_window_csv(const DimensionWindow& win, const fs::path& path, bool digits17) {
    CsvWriter csv(path, {"re", "im", "residue", "source", "residual"}, digits17);
    for (const auto& d : win.dims)
        csv.row({csv.num(d.omega.real()), csv.num(d.omega.imag()), std::to_string(d.residue), to_string(d.source),
                 csv.num(d.residual)});
}

int cmd_dimension(const Globals& g, const std::string& ref) {
    const FlowSpec flow = resolve_flow(ref);
    ensure_writable_dir(g.out_dir);
    const DimensionPair dp = solve_dimension(flow);
    const auto lat = classify(flow, g.max_den);
    json res;
    res["flow"] = flow_json(flow);
    res["D"] = dp.D;
    res["D0"] = dp.D0;
    res["m"] = dp.m;
    res["degenerate"] = dp.degenerate;
    res["lattice"] = lattice_json(lat, g.max_den);

    std::printf("flow %s  N = %zu\n", flow.name().c_str(), flow.size());
    if (dp.degenerate)
        std::printf("degenerate flow (N < 2): D = 0\n");
    else
        std::printf("D  = %.15g\nD0 = %.15g (m = %d)\n", dp.D, dp.D0, dp.m);
    if (lat) {
        std::printf("lattice with w = %.15g, k = (", lat->generator);
        for (std::size_t i = 0; i < lat->multipliers.size(); ++i)
            std::printf("%s%lld", i ? "," : "", static_cast<long long>(lat->multipliers[i]));
        std::printf(")\n");
    } else {
        std::printf("nonlattice at max denominator %lld\n", static_cast<long long>(g.max_den));
    }

    const fs::path dir(g.out_dir);
    {
        std::ofstream out(dir / "dimension.json");
        out << res.dump(2) << '\n';
    }
    Manifest man("dimension", {{"flow", ref}, {"max_denominator", g.max_den}});
    man.add_file(dir / "dimension.json", "D, D0 and lattice verdict");
    man.extra() = res;
    man.write(dir);
    return 0;
}

int cmd_dims_window(const Globals& g, const std::string& ref, double T, double Q) {
    require_positive(T, "T");
    const FlowSpec flow = resolve_flow(ref);
    ensure_writable_dir(g.out_dir);
    NonlatticeOptions opt;
    opt.approx_Q = Q;
    const auto lat = classify(flow, g.max_den);
    const DimensionWindow win = lat ? lattice_dimensions(flow, *lat, T) : nonlattice_dimensions(flow, T, opt);
    const fs::path dir(g.out_dir);
    write_window_csv(win, dir / "dims.csv", g.digits17);

    const DensityReport dens = density_check(win);
    json res;
    res["flow"] = flow_json(flow);
    res["T"] = T;
    res["D"] = win.real_dims.D;
    res["D0"] = win.real_dims.D0;
    res["count"] = win.dims.size();
    res["method"] = win.meta.method;
    res["generator"] = win.meta.generator;
    res["surrogate_q"] = win.meta.surrogate_q;
    res["surrogate_Q"] = win.meta.surrogate_Q;
    res["candidates"] = win.meta.candidates;
    res["merged"] = win.meta.merged;
    res["failed"] = win.meta.failed;
    if (!win.meta.note.empty()) res["note"] = win.meta.note;
    res["density_C"] = dens.C;
    if (flow.size() >= 2) {
        const RegionProfile reg = dimension_free_region(win);
        res["region"] = {{"B", reg.B}, {"M", reg.M}, {"fitted_B", reg.fitted_B}, {"theory_checked", reg.theory_checked}};
        CsvWriter csv(dir / "region.csv", {"t_lo", "t_hi", "count", "max_re", "gap", "theory_gap"}, g.digits17);
        for (const auto& b : reg.bands)
            csv.row({csv.num(b.t_lo), csv.num(b.t_hi), std::to_string(b.count), csv.num(b.max_re), csv.num(b.gap),
                     csv.num(b.theory_gap)});
    }
    std::printf("%zu complex dimensions with |Im| <= %g (%s); density constant C = %.6g\n", win.dims.size(), T,
                win.meta.method.c_str(), dens.C);
    if (!win.meta.note.empty()) std::fprintf(stderr, "warning: %s\n", win.meta.note.c_str());

    Manifest man("dims-window", {{"flow", ref}, {"T", T}, {"Q", Q}, {"max_denominator", g.max_den}});
    man.add_file(dir / "dims.csv", "complex dimensions: re,im,residue,source,residual");
    if (flow.size() >= 2) man.add_file(dir / "region.csv", "dimension-free region per height band");
    man.extra() = res;
    man.write(dir);
    return 0;
}

int cmd_orbits(const Globals& g, const std::string& ref, double cutoff) {
    require_positive(cutoff, "cutoff");
    const FlowSpec flow = resolve_flow(ref);
    ensure_writable_dir(g.out_dir);
    const OrbitCensus census = enumerate_orbits(flow, cutoff, g.census_cap);
    const fs::path dir(g.out_dir);
    {
        CsvWriter csv(dir / "census.csv", {"length", "total_weight", "representative"}, g.digits17);
        for (const auto& r : census.records())
            csv.row({std::to_string(r.length()), csv.num(r.total_weight), r.word(flow.size())});
    }
    if (census.empty())
        std::fprintf(stderr, "warning: cutoff %g is below the smallest weight %g; census is empty\n", cutoff,
                     flow.size() ? flow.min_weight() : 0.0);
    std::printf("%zu primitive orbits with total weight <= %g\n", census.size(), cutoff);
    Manifest man("orbits", {{"flow", ref}, {"cutoff", cutoff}, {"census_cap", g.census_cap}});
    man.add_file(dir / "census.csv", "primitive orbits: length,total_weight,representative");
    man.extra() = {{"orbits", census.size()}};
    man.write(dir);
    return 0;
}

int cmd_psi(const Globals& g, const std::string& ref, double cutoff, double x_min, double x_max, std::size_t points,
            const std::string& jump_s) {
    const JumpConvention jump = parse_jump(jump_s);
    const FlowSpec flow = resolve_flow(ref);
    const double c = cutoff > 0.0 ? cutoff : std::log(x_max);
    require_positive(c, "cutoff");
    const auto xs = log_grid(x_min, x_max, points);
    ensure_writable_dir(g.out_dir);
    const OrbitCensus census = enumerate_orbits(flow, c, g.census_cap);
    const fs::path dir(g.out_dir);
    {
        CsvWriter csv(dir / "counting.csv", {"x", "psi", "theta", "pi"}, g.digits17);
        for (double x : xs)
            csv.row({csv.num(x), csv.num(psi(census, x, jump)), csv.num(theta(census, x, jump)),
                     std::to_string(pi_count(census, x))});
    }
    std::printf("wrote %zu rows of psi, theta, pi (census of %zu orbits)\n", xs.size(), census.size());
    Manifest man("psi", {{"flow", ref}, {"cutoff", c}, {"x_min", x_min}, {"x_max", x_max}, {"points", points},
                         {"jump", jump_s}});
    man.add_file(dir / "counting.csv", "counting functions: x,psi,theta,pi");
    man.write(dir);
    return 0;
}

int cmd_explicit(const Globals& g, const std::string& ref, double T, double x_min, double x_max, std::size_t points,
                 const std::string& jump_s, double l_override) {
    require_positive(T, "T");
    const JumpConvention jump = parse_jump(jump_s);
    const FlowSpec flow = resolve_flow(ref);
    if (flow.size() < 2) throw PreconditionError("explicit compare: requires N >= 2");
    const auto xs = log_grid(x_min, x_max, points);
    ensure_writable_dir(g.out_dir);
    const OrbitCensus census = enumerate_orbits(flow, std::log(x_max), g.census_cap);
    const auto lat = classify(flow, g.max_den);
    const DimensionWindow win = lat ? lattice_dimensions(flow, *lat, T) : nonlattice_dimensions(flow, T);
    std::optional<double> l;
    if (l_override >= 0.0) l = l_override;
    const ErrorScalingReport rep = error_scaling_report(win, census, xs, l, 2000, jump);
    const fs::path dir(g.out_dir);
    {
        CsvWriter csv(dir / "explicit.csv",
                      {"x", "psi_census", "psi_formula", "main_term", "normalized_error", "envelope"}, g.digits17);
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            const auto& r = rep.rows[i];
            const double formula = lat ? LatticeExplicitFormula(flow, *lat).psi(r.x, jump) : r.psi_formula;
            csv.row({csv.num(r.x), csv.num(r.psi_census), csv.num(formula), csv.num(r.main_term),
                     csv.num(r.normalized_error), csv.num(r.envelope)});
        }
    }
    std::printf("envelope exponent %.6g (l = %.4g%s); fitted c = %.6g\n", rep.exponent, rep.l,
                rep.l_estimated ? ", estimated" : "", rep.fitted_c);
    Manifest man("explicit compare", {{"flow", ref}, {"T", T}, {"x_min", x_min}, {"x_max", x_max},
                                      {"points", points}, {"jump", jump_s}});
    man.add_file(dir / "explicit.csv", "x,psi_census,psi_formula,main_term,normalized_error,envelope");
    man.extra() = {{"exponent", rep.exponent}, {"l", rep.l}, {"fitted_c", rep.fitted_c},
                   {"tail_bound", "heuristic"}, {"method", win.meta.method}};
    man.write(dir);
    return 0;
}

int cmd_dioph_profile(const Globals& g, const std::string& ref, std::int64_t q_max) {
    const FlowSpec flow = resolve_flow(ref);
    ensure_writable_dir(g.out_dir);
    const auto prof = approximability_profile(flow, q_max);
    const fs::path dir(g.out_dir);
    {
        CsvWriter csv(dir / "profile.csv", {"q", "max_error", "ratio"}, g.digits17);
        for (const auto& p : prof) csv.row({std::to_string(p.q), csv.num(p.max_error), csv.num(p.ratio)});
    }
    const double l = estimate_approximability_exponent(prof);
    std::printf("approximability profile to q = %lld; growth exponent estimate l = %.4g\n",
                static_cast<long long>(q_max), l);
    Manifest man("dioph profile", {{"flow", ref}, {"q_max", q_max}});
    man.add_file(dir / "profile.csv", "q,max_error,ratio");
    man.extra() = {{"l_estimate", l}};
    man.write(dir);
    return 0;
}

int cmd_zeta_eval(const Globals& g, const std::string& ref, double re, double im) {
    const FlowSpec flow = resolve_flow(ref);
    const ZetaEvaluation ev = eval_zeta(flow, {re, im});
    auto c = [](cplx z) { return json::array({z.real(), z.imag()}); };
    json j;
    j["s"] = c(ev.s);
    j["at_pole"] = ev.at_pole;
    j["zeta"] = ev.at_pole ? json("inf") : c(ev.zeta);
    j["neg_log_deriv"] = ev.at_pole ? json("inf") : c(ev.neg_log_deriv);
    j["f_value"] = c(ev.f_value);
    j["f_prime"] = c(ev.f_prime);
    j["f_double_prime"] = c(ev.f_double_prime);
    std::cout << j.dump(2) << '\n';
    if (!g.out_dir.empty()) {
        ensure_writable_dir(g.out_dir);
        const fs::path dir(g.out_dir);
        {
            std::ofstream out(dir / "zeta.json");
            out << j.dump(2) << '\n';
        }
        Manifest man("zeta eval", {{"flow", ref}, {"re", re}, {"im", im}});
        man.add_file(dir / "zeta.json", "zeta, -zeta'/zeta and f with derivatives");
        man.write(dir);
    }
    return 0;
}

struct Check {
    std::string what;
    double value;
    double expected;
    double tolerance;
    bool ok() const { return std::abs(value - expected) <= tolerance; }
};

int cmd_reproduce(const Globals& g, const std::string& target) {
    if (target != "golden-flow") throw ValidationError("target", "unknown reproduction target '" + target + "'");
    ensure_writable_dir(g.out_dir);
    const fs::path dir(g.out_dir);
    const FlowSpec flow = flows::golden();
    std::vector<Check> checks;

    const DimensionPair dp = solve_dimension(flow);
    checks.push_back({"D", dp.D, 0.7792119034, 1e-7});

    const PerturbationSeries ps = perturbation_series(flow, 6);
    const double series_ref[] = {-0.47862, 0.08812, 0.00450, -0.00205, -0.00039, 0.00004};
    for (int i = 0; i < 6; ++i)
        checks.push_back({"c" + std::to_string(i + 1), ps.coefficients[static_cast<std::size_t>(i)], series_ref[i], 1e-4});

    const DimensionWindow win = nonlattice_dimensions(flow, 560.0);
    write_window_csv(win, dir / "dims.csv", g.digits17);
    struct Target {
        double re_offset, im;
    };
    const Target targets[] = {{-0.028499, 45.05}, {-0.00023, 498.58}, {-0.023561, 543.63}, {-0.033919, 453.53}};
    {
        CsvWriter csv(dir / "target_dims.csv", {"target_re", "target_im", "found_re", "found_im", "d_re", "d_im"},
                      g.digits17);
        for (const auto& t : targets) {
            const cplx want(dp.D + t.re_offset, t.im);
            const auto got = win.nearest(want);
            if (!got) throw SolverError("reproduce: window is empty");
            csv.row({csv.num(want.real()), csv.num(want.imag()), csv.num(got->omega.real()), csv.num(got->omega.imag()),
                     csv.num(got->omega.real() - want.real()), csv.num(got->omega.imag() - want.imag())});
            const std::string tag = "omega near " + format_double(t.im);
            checks.push_back({tag + " (Re)", got->omega.real(), want.real(), 2e-3});
            checks.push_back({tag + " (Im)", got->omega.imag(), want.imag(), 2e-3});
        }
    }
    {
        CsvWriter csv(dir / "series.csv", {"order", "coefficient"}, g.digits17);
        for (std::size_t i = 0; i < ps.coefficients.size(); ++i)
            csv.row({std::to_string(i + 1), csv.num(ps.coefficients[i])});
    }

    bool all = true;
    json jc = json::array();
    for (const auto& c : checks) {
        std::printf("%-26s %s  value %.8g  expected %.8g  tol %.1e\n", c.what.c_str(), c.ok() ? "ok  " : "MISS",
                    c.value, c.expected, c.tolerance);
        all = all && c.ok();
        jc.push_back({{"check", c.what}, {"value", c.value}, {"expected", c.expected}, {"tolerance", c.tolerance},
                      {"ok", c.ok()}});
    }
    Manifest man("reproduce golden-flow", {{"T", 560.0}, {"series_order", 6}});
    man.add_file(dir / "dims.csv", "complex dimensions of the golden flow, |Im| <= 560");
    man.add_file(dir / "target_dims.csv", "reference dimensions and nearest computed roots");
    man.add_file(dir / "series.csv", "perturbation series coefficients");
    man.extra() = {{"D", dp.D}, {"checks", jc}, {"all_within_tolerance", all}};
    man.write(dir);
    if (!all) {
        std::fprintf(stderr, "reproduce: some values fall outside tolerance (see manifest.json)\n");
        return 4;
    }
    return 0;
}

int exit_code(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::validation: return 2;
        case ErrorCategory::solver:
        case ErrorCategory::resource: return 3;
        case ErrorCategory::integrity: return 4;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex dimensions, orbit counts and explicit formulas for self-similar flows"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Globals g;
    app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
    app.add_flag("--digits17", g.digits17, "Write floats with 17 significant digits instead of shortest round-trip");
    app.add_option("--workers", g.workers, "Worker count (computation is single-threaded)")->check(CLI::PositiveNumber);
    app.add_option("--census-cap", g.census_cap, "Maximum number of orbit records")->check(CLI::PositiveNumber);
    app.add_option("--max-den", g.max_den, "Largest denominator for lattice detection")->check(CLI::PositiveNumber);

    std::string flow_ref;
    double T = 50.0, Q = 0.0, cutoff = 0.0, x_min = 3.0, x_max = 1000.0, re = 0.0, im = 0.0, l_override = -1.0;
    std::size_t points = 100;
    std::int64_t q_max = 1000;
    std::string jump = "full", target;

    auto* dim = app.add_subcommand("dimension", "Solve for D and D0; classify lattice/nonlattice");
    dim->add_option("flow", flow_ref, "Built-in flow name or flow file")->required();

    auto* win = app.add_subcommand("dims-window", "Complex dimensions with |Im| <= T");
    win->add_option("flow", flow_ref, "Built-in flow name or flow file")->required();
    win->add_option("--T", T, "Window half-height")->capture_default_str();
    win->add_option("--Q", Q, "Starting approximation quality for nonlattice flows (0: automatic)");

    auto* orb = app.add_subcommand("orbits", "Enumerate primitive periodic orbits");
    orb->add_option("flow", flow_ref, "Built-in flow name or flow file")->required();
    orb->add_option("--cutoff", cutoff, "Maximum total weight")->required();

    auto* ps = app.add_subcommand("psi", "Counting functions psi, theta, pi from the orbit census");
    ps->add_option("flow", flow_ref, "Built-in flow name or flow file")->required();
    ps->add_option("--cutoff", cutoff, "Census cutoff (default log x-max)");
    ps->add_option("--x-min", x_min)->capture_default_str();
    ps->add_option("--x-max", x_max)->capture_default_str();
    ps->add_option("--points", points)->capture_default_str();
    ps->add_option("--jump", jump, "Value at jumps: full or half")->capture_default_str();

    auto* ex = app.add_subcommand("explicit", "Explicit formula tools");
    ex->require_subcommand(1);
    auto* cmp = ex->add_subcommand("compare", "Compare explicit formula and census psi on an x grid");
    cmp->add_option("flow", flow_ref, "Built-in flow name or flow file")->required();
    cmp->add_option("--T", T, "Window half-height")->capture_default_str();
    cmp->add_option("--x-min", x_min)->capture_default_str();
    cmp->add_option("--x-max", x_max)->capture_default_str();
    cmp->add_option("--points", points)->capture_default_str();
    cmp->add_option("--jump", jump, "Census value at jumps: full or half")->default_val("half");
    cmp->add_option("--l", l_override, "Approximability growth exponent (default: estimated)");

    auto* dio = app.add_subcommand("dioph", "Diophantine approximation tools");
    dio->require_subcommand(1);
    auto* prof = dio->add_subcommand("profile", "Approximability profile q,max_error,ratio");
    prof->add_option("flow", flow_ref, "Built-in flow name or flow file")->required();
    prof->add_option("--q-max", q_max)->capture_default_str()->check(CLI::PositiveNumber);

    auto* rep = app.add_subcommand("reproduce", "Recompute golden-flow reference values");
    rep->add_option("target", target, "Reproduction target (golden-flow)")->required();

    auto* zeta = app.add_subcommand("zeta", "Zeta function tools");
    zeta->require_subcommand(1);
    auto* zev = zeta->add_subcommand("eval", "Evaluate zeta and its logarithmic derivative at s");
    zev->add_option("flow", flow_ref, "Built-in flow name or flow file")->required();
    zev->add_option("--re", re, "Re s")->capture_default_str();
    zev->add_option("--im", im, "Im s")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const auto start = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        if (*dim) rc = cmd_dimension(g, flow_ref);
        else if (*win) rc = cmd_dims_window(g, flow_ref, T, Q);
        else if (*orb) rc = cmd_orbits(g, flow_ref, cutoff);
        else if (*ps) rc = cmd_psi(g, flow_ref, cutoff, x_min, x_max, points, jump);
        else if (*cmp) rc = cmd_explicit(g, flow_ref, T, x_min, x_max, points, jump, l_override);
        else if (*prof) rc = cmd_dioph_profile(g, flow_ref, q_max);
        else if (*rep) rc = cmd_reproduce(g, target);
        else if (*zev) rc = cmd_zeta_eval(g, flow_ref, re, im);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "done in %.3f s\n", secs);
    return rc;
}
