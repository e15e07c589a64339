#include "selrec/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "selrec/errors.hpp"
#include "selrec/io.hpp"
#include "selrec/moran.hpp"
#include "selrec/parallel.hpp"
#include "selrec/stats.hpp"

namespace selrec::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json meta(const ExperimentConfig& cfg, const char* command) {
    return {{"command", command}, {"config_hash", cfg.hash}, {"version", io::library_version()}};
}

fs::path prepare(const RunOptions& opts) {
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# selrec " << io::library_version() << " config " << cfg.hash << '\n';
    return out;
}

void write_timing(const fs::path& dir, const ExperimentConfig& cfg, const char* command, const RunOptions& opts,
                  const json& seconds) {
    json j = meta(cfg, command);
    j["threads"] = resolve_threads(opts.threads);
    j["seconds"] = seconds;
    write_json(dir / (std::string("timing_") + command + ".json"), j);
}

std::size_t grid_index_of(const SolverSettings& st, double t) {
    if (st.t_max == 0.0) return 0;
    return static_cast<std::size_t>(std::llround(t / st.t_max * st.grid_steps));
}

Measure ode_at(const SiteConfig& site, const Measure& omega0, double t, const SolverSettings& base) {
    if (t == 0.0) return omega0;
    SolverSettings st = base;
    st.t_max = t;
    return integrate_ode(site, omega0, st).final();
}

struct MethodRun {
    std::string name;
    std::vector<Measure> states;
    json info;
};

MethodRun solve_ode(const ExperimentConfig& cfg) {
    const Trajectory traj = integrate_ode(cfg.site, cfg.initial, cfg.solver);
    MethodRun run{"ode", {}, {{"rk_steps_per_interval", traj.rk_steps_per_interval}, {"max_mass_drift", traj.max_mass_drift}}};
    for (double t : cfg.output_times) run.states.push_back(traj.states[grid_index_of(cfg.solver, t)]);
    return run;
}

MethodRun solve_recursion(const ExperimentConfig& cfg) {
    const TruncatedFamily fam = recursive_solve(cfg.site, cfg.initial, cfg.solver);
    MethodRun run{"recursion", {}, {{"richardson_error", fam.richardson_error}}};
    for (double t : cfg.output_times) run.states.push_back(fam.solution(grid_index_of(cfg.solver, t)));
    return run;
}

MethodRun solve_semigroup(const ExperimentConfig& cfg) {
    if (cfg.site.s() == 0.0) {
        MethodRun run = solve_recursion(cfg);
        run.name = "semigroup";
        run.info["fallback"] = "recursion (closed form needs s > 0)";
        return run;
    }
    const double tol = std::min(cfg.solver.quad_tol, 1e-11);
    MethodRun run{"semigroup", {}, {{"quad_tol", tol}}};
    for (double t : cfg.output_times) run.states.push_back(semigroup_solve(cfg.site, cfg.initial, t, tol));
    return run;
}

json solver_settings_json(const SolverSettings& st) {
    return {{"t_max", st.t_max}, {"grid_steps", st.grid_steps}, {"ode_step", st.ode_step}, {"quad_tol", st.quad_tol}};
}

double max_l1(const std::vector<Measure>& a, const std::vector<Measure>& b) {
    double out = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) out = std::max(out, l1_distance(a[k], b[k]));
    return out;
}

// Fixed, deterministic dual start states used by the verification suite.
IntVector verify_vector(const SiteConfig& cfg) {
    IntVector m{std::vector<long>(static_cast<std::size_t>(cfg.n()), 1)};
    m.at(cfg.i_star()) = 2;
    return m;
}

InitiationState verify_theta(const SiteConfig& cfg) {
    InitiationState theta{std::vector<std::optional<double>>(static_cast<std::size_t>(cfg.n()))};
    for (Site i = 1; i <= cfg.n(); ++i)
        if (i == cfg.i_star() || i % 2 == 0) theta.theta[static_cast<std::size_t>(i - 1)] = 0.25 * i;
    return theta;
}

class CheckList {
public:
    void tolerance(const std::string& name, double value, double threshold, json details = json::object()) {
        json entry = {{"name", name}, {"kind", "tolerance"}, {"value", value}, {"threshold", threshold}};
        entry["passed"] = value <= threshold;
        if (!details.empty()) entry["details"] = std::move(details);
        push(std::move(entry));
    }

    void z(const DualityReport& report, double threshold) {
        json entry = {{"name", report.name}, {"kind", "z"}, {"threshold", threshold}};
        entry["passed"] = report.passed(threshold);
        entry["report"] = io::to_json(report);
        push(std::move(entry));
    }

    void chi_square(const std::string& name, const ChiSquareResult& r, double alpha, json details) {
        json entry = {{"name", name}, {"kind", "chi_square"}, {"p_value", r.p_value}, {"alpha", alpha},
                      {"statistic", r.statistic}, {"dof", r.dof}, {"details", std::move(details)}};
        entry["passed"] = r.p_value > alpha;
        push(std::move(entry));
    }

    void skipped(const std::string& name, const std::string& reason) {
        checks_.push_back({{"name", name}, {"kind", "skipped"}, {"reason", reason}, {"passed", true}});
    }

    bool all_passed() const { return failures_ == 0; }
    int failures() const { return failures_; }
    const json& entries() const { return checks_; }

private:
    void push(json entry) {
        if (!entry["passed"].get<bool>()) ++failures_;
        checks_.push_back(std::move(entry));
    }

    json checks_ = json::array();
    int failures_ = 0;
};

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& opts) {
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.source["seed"] = *opts.seed;
    }
    if (opts.replicates) {
        if (*opts.replicates < 2) throw ConfigError("--replicates must be >= 2");
        cfg.replicates = *opts.replicates;
        cfg.source["replicates"] = *opts.replicates;
    }
    cfg.hash = io::fnv1a_hex(cfg.source.dump());
    return cfg;
}

int cmd_solve(const ExperimentConfig& cfg, const RunOptions& opts) {
    const std::string method = opts.method.value_or("all");
    if (method != "ode" && method != "recursion" && method != "semigroup" && method != "all")
        throw ConfigError("--method must be one of ode, recursion, semigroup, all");
    const fs::path dir = prepare(opts);
    json seconds = json::object();

    std::vector<MethodRun> runs;
    auto timed = [&](const std::string& name, MethodRun (*fn)(const ExperimentConfig&)) {
        if (method != "all" && method != name) return;
        Stopwatch sw;
        runs.push_back(fn(cfg));
        seconds[name] = sw.seconds();
    };
    timed("ode", solve_ode);
    timed("recursion", solve_recursion);
    timed("semigroup", solve_semigroup);

    json report = meta(cfg, "solve");
    report["solver"] = solver_settings_json(cfg.solver);
    report["output_times"] = cfg.output_times;
    report["methods"] = json::array();
    for (const MethodRun& run : runs) {
        std::ofstream csv = open_csv(dir / ("trajectory_" + run.name + ".csv"), cfg);
        io::write_trajectory_csv(csv, cfg.output_times, run.states, cfg.site.n());
        json entry = {{"method", run.name}, {"final_state", io::to_json(run.states.back())}};
        entry.update(run.info);
        report["methods"].push_back(entry);
    }
    if (runs.size() > 1) {
        json table = json::array();
        std::ofstream csv = open_csv(dir / "deviations.csv", cfg);
        csv << "method_a,method_b,max_l1\n";
        for (std::size_t a = 0; a < runs.size(); ++a)
            for (std::size_t b = a + 1; b < runs.size(); ++b) {
                const double dev = max_l1(runs[a].states, runs[b].states);
                table.push_back({{"a", runs[a].name}, {"b", runs[b].name}, {"max_l1", dev}});
                csv << runs[a].name << ',' << runs[b].name << ',' << io::format_double(dev) << '\n';
            }
        report["deviations"] = table;
    }
    write_json(dir / "solve.json", report);
    write_timing(dir, cfg, "solve", opts, seconds);
    return kOk;
}

int cmd_dual(const ExperimentConfig& cfg, const RunOptions& opts) {
    const fs::path dir = prepare(opts);
    json seconds = json::object();
    const double t = cfg.dual.t;
    Stopwatch sw;
    const Measure exact = ode_at(cfg.site, cfg.initial, t, cfg.solver);
    seconds["ode"] = sw.seconds();

    json report = meta(cfg, "dual");
    report["t"] = t;
    report["replicates"] = cfg.replicates;
    report["seed"] = cfg.seed;
    report["ode"] = io::to_json(exact);
    report["estimates"] = json::array();
    std::ofstream csv = open_csv(dir / "dual_estimates.csv", cfg);
    csv << "flavor,type,ode,mean,std_error,z\n";
    for (DualFlavor flavor : cfg.dual.flavors) {
        Stopwatch run_sw;
        McOptions mc{cfg.replicates, derive_seed(cfg.seed, static_cast<std::uint64_t>(flavor) + 1), opts.threads};
        McEstimate est = mc_solution_estimate(cfg.site, cfg.initial, t, mc, flavor);
        seconds[flavor_name(flavor)] = run_sw.seconds();
        const DualityReport r = make_report(flavor_name(flavor), t, exact, est.mean, est.std_error, est.replicates);
        report["estimates"].push_back(io::to_json(r));
        for (std::size_t k = 0; k < exact.size(); ++k)
            csv << flavor_name(flavor) << ",x" << io::type_label(static_cast<std::uint32_t>(k), cfg.site.n()) << ','
                << io::format_double(exact[k]) << ',' << io::format_double(est.mean[k]) << ','
                << io::format_double(est.std_error[k]) << ',' << io::format_double(r.z[k]) << '\n';
    }
    write_json(dir / "dual.json", report);
    write_timing(dir, cfg, "dual", opts, seconds);
    return kOk;
}

int cmd_moran(const ExperimentConfig& cfg, const RunOptions& opts) {
    const fs::path dir = prepare(opts);
    json seconds = json::object();
    Stopwatch sw;
    const LlnTable table = lln_convergence(cfg.site, cfg.initial, cfg.moran.t, cfg.moran.populations,
                                           cfg.moran.replicates, cfg.seed, opts.threads, cfg.solver);
    seconds["lln"] = sw.seconds();

    // one documented run at the largest population size
    Stopwatch run_sw;
    std::size_t largest = 0;
    for (std::size_t p : cfg.moran.populations) largest = std::max(largest, p);
    RngStream rng(derive_seed(cfg.seed, 0x6d6f72616eULL), 0);
    std::vector<MoranEvent> log;
    MoranState state = sample_population(cfg.site, cfg.initial, largest, rng);
    state = moran_simulate(cfg.site, state, cfg.moran.t, rng, cfg.moran.event_log ? &log : nullptr);
    seconds["single_run"] = run_sw.seconds();

    json report = meta(cfg, "moran");
    report["t"] = cfg.moran.t;
    report["replicates"] = cfg.moran.replicates;
    report["seed"] = cfg.seed;
    report["lln"] = io::to_json(table);
    report["single_run"] = io::to_json(state, cfg.site);
    write_json(dir / "moran.json", report);

    std::ofstream csv = open_csv(dir / "moran_lln.csv", cfg);
    csv << "population,mean_l1,std_error\n";
    for (const LlnRow& row : table.rows)
        csv << row.population << ',' << io::format_double(row.mean_distance) << ','
            << io::format_double(row.std_error) << '\n';
    if (cfg.moran.event_log) {
        std::ofstream events = open_csv(dir / "moran_events.csv", cfg);
        io::write_event_log_csv(events, log);
    }
    write_timing(dir, cfg, "moran", opts, seconds);
    return kOk;
}

int cmd_asymptotics(const ExperimentConfig& cfg, const RunOptions& opts) {
    const fs::path dir = prepare(opts);
    json seconds = json::object();
    const Measure limit = asymptotic_limit(cfg.site, cfg.initial);

    double slowest = cfg.site.s();
    for (Site i : cfg.site.neutral_sites().sites()) slowest = std::min(slowest, cfg.site.rho(i));
    const double horizon = cfg.asymptotics.t_max > 0.0 ? cfg.asymptotics.t_max : 40.0 / slowest;

    SolverSettings st = cfg.solver;
    st.t_max = horizon;
    st.grid_steps = cfg.asymptotics.points;
    st.ode_step = std::min(cfg.solver.ode_step, horizon / cfg.asymptotics.points);
    Stopwatch sw;
    const Trajectory traj = integrate_ode(cfg.site, cfg.initial, st);
    seconds["ode"] = sw.seconds();

    json report = meta(cfg, "asymptotics");
    report["horizon"] = horizon;
    report["omega_inf"] = io::to_json(limit);
    report["omega_horizon"] = io::to_json(traj.final());
    report["final_l1"] = l1_distance(traj.final(), limit);
    json sites = json::array();
    for (Site i : cfg.site.neutral_sites().sites()) {
        const YpirParams par = YpirParams::for_site(cfg.site, i);
        const double alpha = par.r / par.s;
        const IntDistribution law = ypir_stationary(par);
        sites.push_back({{"site", i}, {"alpha", alpha}, {"p_inf_1", law.at(1)}, {"alpha_over_1_plus_alpha", alpha / (1.0 + alpha)},
                         {"truncation", law.truncation()}, {"tail_mass", law.tail_mass}});
    }
    report["stationary"] = sites;
    write_json(dir / "asymptotics.json", report);

    std::ofstream csv = open_csv(dir / "asymptotics_curve.csv", cfg);
    csv << "t,l1_to_limit\n";
    for (std::size_t g = 0; g < traj.times.size(); ++g)
        csv << io::format_double(traj.times[g]) << ',' << io::format_double(l1_distance(traj.states[g], limit)) << '\n';
    write_timing(dir, cfg, "asymptotics", opts, seconds);
    return kOk;
}

int cmd_ld(const ExperimentConfig& cfg, const RunOptions& opts) {
    const fs::path dir = prepare(opts);
    Stopwatch sw;
    const TruncatedFamily fam = recursive_solve(cfg.site, cfg.initial, cfg.solver);
    const double solve_seconds = sw.seconds();

    json report = meta(cfg, "ld");
    report["permutation"] = fam.permutation;
    report["levels"] = json::array();
    std::ofstream csv = open_csv(dir / "ld.csv", cfg);
    csv << "t,level,site,ld_l1,predicted_l1,unscaled_l1,relative_error\n";
    for (int k = 1; k < fam.level_count(); ++k) {
        const Site site = fam.permutation[static_cast<std::size_t>(k)];
        double max_rel = 0.0;
        // least squares of log(|LD_k| / |LD of level k-1 at the same site|) against t
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int points = 0;
        for (double t : cfg.output_times) {
            const LinkageDisequilibrium ld = linkage_disequilibrium(cfg.site, fam, k, t);
            const Measure zero(ld.lhs.sites());
            const double lhs = l1_distance(ld.lhs, zero);
            const double rhs = l1_distance(ld.rhs, zero);
            const double unscaled = rhs / ld.decay_factor;
            const double rel = l1_distance(ld.lhs, ld.rhs) / std::max(rhs, 1e-12);
            max_rel = std::max(max_rel, rel);
            csv << io::format_double(t) << ',' << k << ',' << site << ',' << io::format_double(lhs) << ','
                << io::format_double(rhs) << ',' << io::format_double(unscaled) << ',' << io::format_double(rel)
                << '\n';
            if (lhs > 1e-12 && unscaled > 1e-12) {
                const double y = std::log(lhs / unscaled);
                sx += t;
                sy += y;
                sxx += t * t;
                sxy += t * y;
                ++points;
            }
        }
        json level = {{"level", k}, {"site", site}, {"rho", cfg.site.rho(site)}, {"max_relative_error", max_rel}};
        if (points >= 2 && points * sxx - sx * sx > 0.0)
            level["fitted_rate"] = -(points * sxy - sx * sy) / (points * sxx - sx * sx);
        else
            level["fitted_rate"] = nullptr;
        report["levels"].push_back(level);
    }
    write_json(dir / "ld.json", report);
    write_timing(dir, cfg, "ld", opts, {{"recursion", solve_seconds}});
    return kOk;
}

int cmd_verify(const ExperimentConfig& cfg, const RunOptions& opts) {
    const fs::path dir = prepare(opts);
    json seconds = json::object();
    const SiteConfig& site = cfg.site;
    const Measure& omega0 = cfg.initial;
    const double z_max = cfg.z_threshold;
    const double t_dual = cfg.dual.t > 0.0 ? cfg.dual.t : 1.0;
    CheckList checks;
    std::uint64_t tag = 0;
    auto mc = [&] { return McOptions{cfg.replicates, derive_seed(cfg.seed, ++tag), opts.threads}; };
    auto timed = [&](const std::string& name, auto&& fn) {
        Stopwatch sw;
        fn();
        seconds[name] = sw.seconds();
    };

    timed("solver_agreement", [&] {
        std::vector<MethodRun> runs{solve_ode(cfg), solve_recursion(cfg)};
        if (site.s() > 0.0) runs.push_back(solve_semigroup(cfg));
        double worst = 0.0;
        json pairs = json::array();
        for (std::size_t a = 0; a < runs.size(); ++a)
            for (std::size_t b = a + 1; b < runs.size(); ++b) {
                const double dev = max_l1(runs[a].states, runs[b].states);
                worst = std::max(worst, dev);
                pairs.push_back({{"a", runs[a].name}, {"b", runs[b].name}, {"max_l1", dev}});
            }
        checks.tolerance("solver_agreement", worst, 1e-5, {{"pairs", pairs}});
    });

    timed("pure_selection_closed_form", [&] {
        const SiteConfig pure = site.with_rho(std::vector<double>(static_cast<std::size_t>(site.n()), 0.0));
        SolverSettings st = cfg.solver;
        st.quad_tol = std::min(st.quad_tol, 1e-10);
        st.t_max = 1.0;
        const double dev = l1_distance(integrate_ode(pure, omega0, st).final(), selection_flow(pure, omega0, 1.0));
        checks.tolerance("pure_selection_closed_form", dev, 1e-8);
    });

    timed("ld_identity", [&] {
        const TruncatedFamily fam = recursive_solve(site, omega0, cfg.solver);
        double worst = 0.0;
        for (int k = 1; k < fam.level_count(); ++k)
            for (double t : cfg.output_times) {
                const LinkageDisequilibrium ld = linkage_disequilibrium(site, fam, k, t);
                const double norm = l1_distance(ld.rhs, Measure(ld.rhs.sites()));
                worst = std::max(worst, l1_distance(ld.lhs, ld.rhs) / std::max(norm, 1e-12));
            }
        checks.tolerance("ld_identity", worst, 1e-4);
    });

    timed("pure_selection_duality", [&] {
        double worst = 0.0;
        for (long k : {1L, 2L, 5L}) worst = std::max(worst, pure_selection_analytic_residual(site, omega0, k, t_dual));
        checks.tolerance("pure_selection_pgf", worst, 1e-12);
        checks.z(pure_selection_check(site, omega0, 2, t_dual, mc()), z_max);
    });

    timed("duality", [&] {
        checks.z(duality_check(site, omega0, verify_vector(site), t_dual, mc(), cfg.solver), z_max);
        checks.z(duality_check(site, omega0, verify_theta(site), t_dual, mc(), cfg.solver), z_max);
        const double f = fit_fraction(omega0, site.i_star());
        if (site.s() > 0.0 && f > 0.0 && f < 1.0)
            checks.z(compare_ypir_initiation(site, omega0, IntVector{std::vector<long>(static_cast<std::size_t>(site.n()), 1)},
                                             t_dual, mc()),
                     z_max);
        else
            checks.skipped("ypir_vs_initiation", "needs s > 0 and a fit fraction in (0, 1)");
    });

    timed("representation", [&] {
        const Measure exact = ode_at(site, omega0, t_dual, cfg.solver);
        for (DualFlavor flavor : {DualFlavor::WPP, DualFlavor::YPIR, DualFlavor::INIT}) {
            McEstimate est = mc_solution_estimate(site, omega0, t_dual, mc(), flavor);
            checks.z(make_report(std::string("representation_") + flavor_name(flavor), t_dual, exact, est.mean,
                                 est.std_error, est.replicates),
                     z_max);
        }
    });

    timed("ypir_semigroup", [&] {
        const std::pair<long, double> points[] = {{0, 0.5 * t_dual}, {1, t_dual}, {3, 1.5 * t_dual}};
        for (Site i = 1; i <= site.n(); ++i) {
            const YpirParams par = YpirParams::for_site(site, i);
            for (auto [m0, t] : points) {
                const long start = (i == site.i_star() && m0 == 0) ? 1 : m0;
                const std::uint64_t seed = derive_seed(cfg.seed, ++tag);
                std::vector<long> samples(cfg.replicates);
                for_each_block((samples.size() + 4095) / 4096, resolve_threads(opts.threads), [&](std::size_t b) {
                    for (std::size_t r = b * 4096; r < std::min(samples.size(), (b + 1) * 4096); ++r) {
                        RngStream rng(seed, r);
                        samples[r] = ypir_simulate(par, start, t, rng);
                    }
                });
                const IntDistribution law = ypir_semigroup(par, static_cast<int>(start), t);
                checks.chi_square("ypir_semigroup_site" + std::to_string(i) + "_m" + std::to_string(start) + "_t" +
                                      io::format_double(t),
                                  chi_square_test(samples, law), 0.01,
                                  {{"site", i}, {"m0", start}, {"t", t}, {"truncation", law.truncation()}});
            }
        }
    });

    timed("asymptotics", [&] {
        bool all_positive = site.s() > 0.0;
        for (Site i : site.neutral_sites().sites()) all_positive = all_positive && site.rho(i) > 0.0;
        if (!all_positive) {
            checks.skipped("asymptotic_limit", "needs s > 0 and rho_i > 0 on every neutral site");
            return;
        }
        double slowest = site.s();
        for (Site i : site.neutral_sites().sites()) slowest = std::min(slowest, site.rho(i));
        SolverSettings st = cfg.solver;
        st.t_max = 40.0 / slowest;
        st.grid_steps = 40;
        st.ode_step = std::min(st.ode_step, 0.05);
        const double dev = l1_distance(integrate_ode(site, omega0, st).final(), asymptotic_limit(site, omega0));
        checks.tolerance("asymptotic_limit", dev, 1e-3, {{"horizon", st.t_max}});
        double worst = 0.0;
        for (Site i : site.neutral_sites().sites()) {
            const YpirParams par = YpirParams::for_site(site, i);
            const double alpha = par.r / par.s;
            worst = std::max(worst, std::abs(ypir_stationary(par).at(1) - alpha / (1.0 + alpha)));
        }
        checks.tolerance("stationary_first_atom", worst, 1e-12);
    });

    timed("marginal_consistency", [&] {
        if (site.n() > 8) {
            checks.skipped("marginal_consistency", "only run for n <= 8");
            return;
        }
        const Trajectory full = integrate_ode(site, omega0, cfg.solver);
        double worst = 0.0;
        const std::uint32_t others = site.neutral_sites().mask();
        // all subsets of S* joined with i*
        for (std::uint32_t sub = others;; sub = (sub - 1) & others) {
            const SiteSet a = SiteSet(sub) | SiteSet::single(site.i_star());
            const Trajectory marg = marginal_sre_solve(site, omega0, a, cfg.solver);
            worst = std::max(worst, l1_distance(project(full.final(), a), marg.final()));
            if (sub == 0) break;
        }
        checks.tolerance("marginal_consistency", worst, 10.0 * cfg.solver.quad_tol);
    });

    json report = meta(cfg, "verify");
    report["seed"] = cfg.seed;
    report["replicates"] = cfg.replicates;
    report["z_threshold"] = z_max;
    report["checks"] = checks.entries();
    report["failures"] = checks.failures();
    report["passed"] = checks.all_passed();
    write_json(dir / "verify.json", report);
    write_timing(dir, cfg, "verify", opts, seconds);
    return checks.all_passed() ? kOk : kVerificationFailed;
}

int run(const std::string& command, const std::string& config_path, const RunOptions& opts) {
    static const std::map<std::string, int (*)(const ExperimentConfig&, const RunOptions&)> commands{
        {"solve", cmd_solve},   {"dual", cmd_dual},         {"moran", cmd_moran},
        {"verify", cmd_verify}, {"asymptotics", cmd_asymptotics}, {"ld", cmd_ld}};
    try {
        auto it = commands.find(command);
        if (it == commands.end()) throw ConfigError("unknown command '" + command + "'");
        const ExperimentConfig cfg = apply_overrides(load_config(config_path), opts);
        const int code = it->second(cfg, opts);
        if (code == kVerificationFailed) std::cerr << "verification failed; see verify.json\n";
        return code;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace selrec::cli
