#include "selrec/forward_solvers.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "selrec/ypir.hpp"

namespace selrec {

namespace {

struct RecombinationTerm {
    SiteSet tail;
    double rate;
};

// Right-hand side of a (possibly marginal) selection-recombination equation
// on X_sites. Selection is active only when i* is among the sites.
struct SreSystem {
    SiteSet sites;
    Site i_star = 0;
    double s = 0.0;
    bool selection = false;
    std::vector<RecombinationTerm> terms;

    Measure rhs(const Measure& nu) const {
        Measure out(sites);
        if (selection && s != 0.0) {
            const double f = fit_fraction(nu, i_star);
            out.add_scaled(select_F(nu, i_star), s);
            out.add_scaled(nu, -s * f);
        }
        for (const RecombinationTerm& term : terms) {
            if (term.rate == 0.0) continue;
            out.add_scaled(tensor(project(nu, sites - term.tail), project(nu, term.tail)), term.rate);
            out.add_scaled(nu, -term.rate);
        }
        return out;
    }
};

SreSystem full_system(const SiteConfig& cfg) {
    SreSystem sys{cfg.all_sites(), cfg.i_star(), cfg.s(), true, {}};
    for (Site i : cfg.neutral_sites().sites()) sys.terms.push_back({cfg.tail(i), cfg.rho(i)});
    return sys;
}

Trajectory run_rk4(const SreSystem& sys, const Measure& omega0, const SolverSettings& st, long substeps) {
    Trajectory traj;
    traj.rk_steps_per_interval = substeps;
    const double target_mass = omega0.mass();
    const double dt = st.t_max / st.grid_steps;
    const double h = dt / static_cast<double>(substeps);
    Measure y = omega0;
    traj.times.push_back(0.0);
    traj.states.push_back(y);
    for (int g = 0; g < st.grid_steps; ++g) {
        for (long k = 0; k < substeps; ++k) {
            const Measure k1 = sys.rhs(y);
            const Measure k2 = sys.rhs(Measure(y).add_scaled(k1, 0.5 * h));
            const Measure k3 = sys.rhs(Measure(y).add_scaled(k2, 0.5 * h));
            const Measure k4 = sys.rhs(Measure(y).add_scaled(k3, h));
            y.add_scaled(k1, h / 6.0).add_scaled(k2, h / 3.0).add_scaled(k3, h / 3.0).add_scaled(k4, h / 6.0);
            const double mass = y.mass();
            traj.max_mass_drift = std::max(traj.max_mass_drift, std::abs(mass - target_mass));
            if (mass != 0.0) y *= target_mass / mass;
        }
        traj.times.push_back(st.grid_time(g + 1));
        traj.states.push_back(y);
    }
    return traj;
}

Trajectory integrate(const SreSystem& sys, const Measure& omega0, const SolverSettings& st) {
    st.validate();
    if (st.t_max == 0.0) {
        Trajectory traj;
        for (int g = 0; g <= st.grid_steps; ++g) {
            traj.times.push_back(0.0);
            traj.states.push_back(omega0);
        }
        return traj;
    }
    const double dt = st.t_max / st.grid_steps;
    long substeps = std::max(1L, static_cast<long>(std::ceil(dt / st.ode_step - 1e-12)));
    Trajectory coarse = run_rk4(sys, omega0, st, substeps);
    for (int halving = 0; halving < 20; ++halving) {
        substeps *= 2;
        Trajectory fine = run_rk4(sys, omega0, st, substeps);
        if (l1_distance(fine.final(), coarse.final()) < st.quad_tol) return fine;
        coarse = std::move(fine);
    }
    throw NumericalError("RK4 step refinement did not converge after 20 halvings");
}

std::vector<Site> checked_permutation(const SiteConfig& cfg, const std::optional<std::vector<Site>>& perm) {
    if (!perm) return cfg.canonical_permutation();
    if (!is_nondecreasing_permutation(cfg, *perm))
        throw std::invalid_argument("site permutation is not nondecreasing with respect to the site order");
    return *perm;
}

TruncatedFamily run_recursion(const SiteConfig& cfg, const Measure& omega0, double t_max, int steps,
                              const std::vector<Site>& perm) {
    TruncatedFamily fam;
    fam.permutation = perm;
    for (int g = 0; g <= steps; ++g) fam.times.push_back(t_max * static_cast<double>(g) / steps);
    const double h = t_max / steps;

    std::vector<Measure> level;
    level.reserve(fam.times.size());
    for (double t : fam.times) level.push_back(selection_flow(cfg, omega0, t));
    fam.levels.push_back(level);

    for (std::size_t k = 1; k < perm.size(); ++k) {
        const Site site = perm[k];
        const double rho = cfg.rho(site);
        const std::vector<Measure>& prev = fam.levels.back();
        if (rho == 0.0 || h == 0.0) {
            fam.levels.push_back(prev);
            continue;
        }
        const SiteSet head = cfg.head(site), tail = cfg.tail(site);
        // Product trapezoid: omega is interpolated linearly on each cell and
        // integrated exactly against rho e^{-rho tau}, so the accumulated
        // mass equals 1 - e^{-rho t} on every grid point.
        const double q = -std::expm1(-rho * h);
        const double c = q / (rho * h);
        const double w_left = 1.0 - c;
        const double w_right = c - std::exp(-rho * h);

        std::vector<Measure> next;
        next.reserve(prev.size());
        Measure integral(tail);
        Measure prev_tail = project(prev[0], tail);
        for (std::size_t g = 0; g < prev.size(); ++g) {
            if (g > 0) {
                const double e_left = std::exp(-rho * fam.times[g - 1]);
                Measure cur_tail = project(prev[g], tail);
                integral.add_scaled(prev_tail, e_left * w_left).add_scaled(cur_tail, e_left * w_right);
                prev_tail = std::move(cur_tail);
            }
            Measure state = tensor(project(prev[g], head), integral);
            state.add_scaled(prev[g], std::exp(-rho * fam.times[g]));
            next.push_back(std::move(state));
        }
        fam.levels.push_back(std::move(next));
    }
    return fam;
}

SreSystem marginal_system(const SiteConfig& cfg, SiteSet a) {
    SreSystem sys{a, cfg.i_star(), cfg.s(), true, {}};
    for (const MarginalRate& mr : marginal_rates(cfg, a)) sys.terms.push_back({mr.tail, mr.rate});
    return sys;
}

}  // namespace

void SolverSettings::validate() const {
    if (grid_steps < 2) throw std::invalid_argument("grid_steps must be >= 2");
    if (!(ode_step > 0.0)) throw std::invalid_argument("ode_step must be > 0");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be >= 0");
    if (!(quad_tol > 0.0) || quad_tol > 1e-3) throw std::invalid_argument("quad_tol must lie in (0, 1e-3]");
}

std::size_t TruncatedFamily::grid_index(double t) const {
    if (times.empty()) throw std::invalid_argument("empty family");
    const double t_max = times.back();
    if (t_max == 0.0) {
        if (t != 0.0) throw std::invalid_argument("time is not on the solver grid");
        return 0;
    }
    const double pos = t / t_max * static_cast<double>(times.size() - 1);
    const double rounded = std::round(pos);
    if (rounded < 0.0 || rounded > static_cast<double>(times.size() - 1) || std::abs(pos - rounded) > 1e-9)
        throw std::invalid_argument("time " + std::to_string(t) + " is not on the solver grid");
    return static_cast<std::size_t>(rounded);
}

Measure selection_flow(const SiteConfig& cfg, const Measure& omega0, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("negative time");
    const double f = fit_fraction(omega0, cfg.i_star());
    if (t == 0.0 || f == 0.0 || f == 1.0 || cfg.s() == 0.0) return omega0;
    // numerator and denominator both divided by e^{st}
    const double e = std::exp(-cfg.s() * t);
    const Measure fit = select_F(omega0, cfg.i_star());
    Measure out = fit;
    out.add_scaled(omega0, e).add_scaled(fit, -e);
    out *= 1.0 / (f + e * (1.0 - f));
    return out;
}

Measure sre_rhs(const SiteConfig& cfg, const Measure& nu) {
    if (nu.sites() != cfg.all_sites()) throw std::invalid_argument("sre_rhs needs a measure on X");
    return full_system(cfg).rhs(nu);
}

Trajectory integrate_ode(const SiteConfig& cfg, const Measure& omega0, const SolverSettings& settings) {
    if (omega0.sites() != cfg.all_sites()) throw std::invalid_argument("initial condition must live on X");
    require_probability(omega0, "initial condition");
    return integrate(full_system(cfg), omega0, settings);
}

TruncatedFamily recursive_solve(const SiteConfig& cfg, const Measure& omega0, const SolverSettings& settings,
                                std::optional<std::vector<Site>> permutation) {
    settings.validate();
    if (omega0.sites() != cfg.all_sites()) throw std::invalid_argument("initial condition must live on X");
    require_probability(omega0, "initial condition");
    const std::vector<Site> perm = checked_permutation(cfg, permutation);
    TruncatedFamily fam = run_recursion(cfg, omega0, settings.t_max, settings.grid_steps, perm);
    if (settings.t_max > 0.0 && cfg.n() > 1) {
        double estimate;
        if (settings.grid_steps % 2 == 0) {
            const TruncatedFamily half = run_recursion(cfg, omega0, settings.t_max, settings.grid_steps / 2, perm);
            estimate = l1_distance(fam.levels.back().back(), half.levels.back().back()) / 3.0;
        } else {
            const TruncatedFamily dbl = run_recursion(cfg, omega0, settings.t_max, settings.grid_steps * 2, perm);
            estimate = l1_distance(fam.levels.back().back(), dbl.levels.back().back()) * 4.0 / 3.0;
        }
        fam.richardson_error = estimate;
        if (estimate > 10.0 * settings.quad_tol)
            throw NumericalError("recursion grid too coarse: estimated error " + std::to_string(estimate) +
                                 " exceeds 10 * quad_tol");
    }
    return fam;
}

Measure semigroup_solve(const SiteConfig& cfg, const Measure& omega0, double t, double quad_tol,
                        std::optional<std::vector<Site>> permutation) {
    if (cfg.s() == 0.0) throw std::domain_error("closed-form semigroup solution requires s > 0");
    if (omega0.sites() != cfg.all_sites()) throw std::invalid_argument("initial condition must live on X");
    require_probability(omega0, "initial condition");
    if (!(t >= 0.0)) throw std::invalid_argument("negative time");
    const std::vector<Site> perm = checked_permutation(cfg, permutation);

    const Site i_star = cfg.i_star();
    const double x = 1.0 - fit_fraction(omega0, i_star);
    const Measure b = cond_b(omega0, i_star);
    const Measure d = cond_d(omega0, i_star);
    auto mixture = [&](double to_d, double to_b) {
        Measure m = d * to_d;
        return m.add_scaled(b, to_b);
    };

    const PgfSplit root = ypir_pgf(YpirParams::for_site(cfg, i_star), 1, t, x, quad_tol);
    Measure result = mixture(root.weighted, root.positive - root.weighted);
    for (std::size_t k = 1; k < perm.size(); ++k) {
        const Site i = perm[k];
        const PgfSplit split = ypir_pgf(YpirParams::for_site(cfg, i), 0, t, x, quad_tol);
        if (split.positive == 0.0) continue;
        const Measure factor = project(mixture(split.weighted, split.positive - split.weighted), cfg.tail(i));
        Measure next = boxtimes(result, factor);
        next.add_scaled(result, split.atom0);
        result = std::move(next);
    }
    return result;
}

LinkageDisequilibrium linkage_disequilibrium(const SiteConfig& cfg, const TruncatedFamily& family, int k, double t) {
    if (k < 1 || k >= family.level_count()) throw std::invalid_argument("level must lie in [1, n-1]");
    const std::size_t g = family.grid_index(t);
    const Site site = family.permutation[static_cast<std::size_t>(k)];
    const Measure& cur = family.levels[static_cast<std::size_t>(k)][g];
    const Measure& prev = family.levels[static_cast<std::size_t>(k) - 1][g];
    LinkageDisequilibrium out;
    out.decay_factor = std::exp(-cfg.rho(site) * family.times[g]);
    out.lhs = cur - recombinator(cfg, cur, site);
    out.rhs = (prev - recombinator(cfg, prev, site)) * out.decay_factor;
    const double diff = l1_distance(out.lhs, out.rhs);
    const double norm = l1_distance(out.rhs, Measure(out.rhs.sites()));
    out.relative_error = norm > 1e-300 ? diff / norm : diff;
    return out;
}

Measure asymptotic_limit(const SiteConfig& cfg, const Measure& omega0) {
    if (!(cfg.s() > 0.0)) throw std::invalid_argument("asymptotic limit requires s > 0");
    for (Site i : cfg.neutral_sites().sites())
        if (!(cfg.rho(i) > 0.0))
            throw std::invalid_argument("asymptotic limit assumes rho_i > 0 for all i in S* (site " +
                                        std::to_string(i) + " has rho = 0)");
    if (omega0.sites() != cfg.all_sites()) throw std::invalid_argument("initial condition must live on X");
    require_probability(omega0, "initial condition");
    const Site i_star = cfg.i_star();
    const double x = 1.0 - fit_fraction(omega0, i_star);
    const Measure b = cond_b(omega0, i_star);
    const Measure d = cond_d(omega0, i_star);
    Measure out = Measure::scalar(1.0);
    for (Site i = 1; i <= cfg.n(); ++i) {
        double gamma;
        if (i == i_star)
            gamma = x == 0.0 ? 1.0 : 0.0;
        else
            gamma = yule_law_pgf(cfg.resetting_rate(i) / cfg.s(), x);
        Measure site_law = b * (1.0 - gamma);
        site_law.add_scaled(d, gamma);
        out = tensor(out, project(site_law, SiteSet::single(i)));
    }
    return out;
}

Trajectory marginal_sre_solve(const SiteConfig& cfg, const Measure& omega0, SiteSet a,
                              const SolverSettings& settings) {
    if (!a.contains(cfg.i_star()))
        throw std::invalid_argument("the marginal equation is closed only for subsystems containing i*");
    if (!a.subset_of(omega0.sites())) throw std::invalid_argument("initial condition does not cover the subsystem");
    const Measure start = project(omega0, a);
    require_probability(start, "initial condition");
    return integrate(marginal_system(cfg, a), start, settings);
}

Trajectory naive_marginal_solve(const SiteConfig& cfg, const Measure& omega0, SiteSet a,
                                const SolverSettings& settings) {
    if (a.empty() || !a.subset_of(omega0.sites())) throw std::invalid_argument("invalid subsystem");
    std::map<std::uint32_t, double> splits;
    for (Site j : cfg.neutral_sites().sites()) {
        const SiteSet tail = cfg.tail(j) & a;
        if (tail.empty() || tail == a) continue;
        splits[tail.mask()] += cfg.rho(j);
    }
    SreSystem sys{a, cfg.i_star(), cfg.s(), false, {}};
    for (auto [mask, rate] : splits) sys.terms.push_back({SiteSet(mask), rate});
    return integrate(sys, project(omega0, a), settings);
}

}  // namespace selrec
