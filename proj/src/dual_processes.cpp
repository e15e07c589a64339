#include "selrec/dual_processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "selrec/parallel.hpp"

namespace selrec {

namespace {

void check_length(const SiteConfig& cfg, std::size_t size, const char* what) {
    if (size != static_cast<std::size_t>(cfg.n())) throw std::invalid_argument(std::string(what) + " needs one entry per site");
}

std::vector<Site> order_or_canonical(const SiteConfig& cfg, const std::optional<std::vector<Site>>& perm) {
    if (!perm) return cfg.canonical_permutation();
    if (!is_nondecreasing_permutation(cfg, *perm))
        throw std::invalid_argument("factor order is not a nondecreasing permutation");
    return *perm;
}

// The b/d split of nu and its tail marginals, shared by every evaluation of a
// duality function at the same nu.
class DualityKernel {
public:
    DualityKernel(const SiteConfig& cfg, const Measure& nu) : cfg_(cfg) {
        if (nu.sites() != cfg.all_sites()) throw std::invalid_argument("duality functions need a measure on X");
        x_ = 1.0 - fit_fraction(nu, cfg.i_star());
        b_ = cond_b(nu, cfg.i_star());
        d_ = cond_d(nu, cfg.i_star());
        for (Site i = 1; i <= cfg.n(); ++i) {
            b_tail_.push_back(project(b_, cfg.tail(i)));
            d_tail_.push_back(project(d_, cfg.tail(i)));
        }
    }

    double unfit() const { return x_; }

    // Tail marginal of w d + (1 - w) b.
    Measure factor(Site i, double w) const {
        const auto k = static_cast<std::size_t>(i - 1);
        Measure out = d_tail_[k] * w;
        out.add_scaled(b_tail_[k], 1.0 - w);
        return out;
    }

    double power(long k) const { return std::pow(x_, static_cast<double>(k)); }

    Measure calH(const IntVector& m, const std::vector<Site>& order) const {
        if (m.at(cfg_.i_star()) < 1) throw std::invalid_argument("the selected site needs a positive entry");
        Measure out = factor(cfg_.i_star(), power(m.at(cfg_.i_star())));
        for (std::size_t k = 1; k < order.size(); ++k) {
            const long v = m.at(order[k]);
            if (v < 0) throw std::invalid_argument("negative entry in integer vector");
            if (v > 0) out = boxtimes(out, factor(order[k], power(v)));
        }
        return out;
    }

    Measure calG(const InitiationState& theta, const std::vector<Site>& order) const {
        const auto& top = theta.at(cfg_.i_star());
        if (!top) throw std::invalid_argument("the selected site cannot be Delta");
        Measure out = factor(cfg_.i_star(), yule_pgf(cfg_.s(), *top, x_));
        for (std::size_t k = 1; k < order.size(); ++k) {
            const auto& th = theta.at(order[k]);
            if (th) out = boxtimes(out, factor(order[k], yule_pgf(cfg_.s(), *th, x_)));
        }
        return out;
    }

    Measure H(const WeightedPartition& wp) const {
        Measure out = Measure::scalar(1.0);
        for (std::size_t k = 0; k < wp.weights.size(); ++k) {
            const double w = power(wp.weights[k]);
            Measure mix = d_ * w;
            mix.add_scaled(b_, 1.0 - w);
            out = tensor(out, project(mix, wp.partition.blocks()[k].sites()));
        }
        return out;
    }

private:
    const SiteConfig& cfg_;
    double x_ = 0.0;
    Measure b_, d_;
    std::vector<Measure> b_tail_, d_tail_;
};

// Yule growth from k lines over time dt.
long yule_advance(double s, long k, double dt, RngStream& rng) {
    if (s == 0.0 || dt <= 0.0 || k == 0) return k;
    const double sigma = std::exp(-s * dt);
    if (!(sigma > 0.0)) throw std::overflow_error("Yule process grows beyond representable counts");
    return k + std::negative_binomial_distribution<long>(k, sigma)(rng);
}

constexpr std::size_t kMcBlock = 1024;

// Per-cell running mean and sum of squared deviations.
struct Moments {
    std::size_t count = 0;
    std::vector<double> mean, m2;

    explicit Moments(std::size_t cells = 0) : mean(cells, 0.0), m2(cells, 0.0) {}

    void add(const Measure& v) {
        ++count;
        const double c = static_cast<double>(count);
        for (std::size_t k = 0; k < mean.size(); ++k) {
            const double delta = v[k] - mean[k];
            mean[k] += delta / c;
            m2[k] += delta * (v[k] - mean[k]);
        }
    }

    void merge(const Moments& o) {
        if (o.count == 0) return;
        const double na = static_cast<double>(count), nb = static_cast<double>(o.count), n = na + nb;
        for (std::size_t k = 0; k < mean.size(); ++k) {
            const double delta = o.mean[k] - mean[k];
            mean[k] += delta * nb / n;
            m2[k] += o.m2[k] + delta * delta * na * nb / n;
        }
        count += o.count;
    }
};

}  // namespace

IntVector IntVector::unit(int n, Site i) {
    IntVector out{std::vector<long>(static_cast<std::size_t>(n), 0)};
    out.at(i) = 1;
    return out;
}

InitiationState InitiationState::initial(const SiteConfig& cfg) {
    InitiationState out{std::vector<std::optional<double>>(static_cast<std::size_t>(cfg.n()))};
    out.theta[static_cast<std::size_t>(cfg.i_star() - 1)] = 0.0;
    return out;
}

Site block_minimum(const SiteConfig& cfg, const Interval& block) {
    if (block.first <= cfg.i_star() && cfg.i_star() <= block.last) return cfg.i_star();
    return block.last < cfg.i_star() ? block.last : block.first;
}

IntVector encode(const WeightedPartition& wp, const SiteConfig& cfg) {
    if (wp.partition.n() != cfg.n()) throw std::invalid_argument("partition does not match the sequence length");
    if (wp.weights.size() != wp.partition.blocks().size()) throw std::invalid_argument("need one weight per block");
    IntVector out{std::vector<long>(static_cast<std::size_t>(cfg.n()), 0)};
    for (std::size_t k = 0; k < wp.weights.size(); ++k) {
        if (wp.weights[k] < 1) throw std::invalid_argument("block weights must be positive");
        out.at(block_minimum(cfg, wp.partition.blocks()[k])) = wp.weights[k];
    }
    return out;
}

WeightedPartition decode(const IntVector& m, const SiteConfig& cfg) {
    check_length(cfg, m.m.size(), "integer vector");
    if (m.at(cfg.i_star()) < 1) throw std::invalid_argument("the selected site needs a positive entry");
    std::vector<Site> owner(static_cast<std::size_t>(cfg.n()) + 1, 0);
    // predecessors come first in the canonical order
    for (Site i : cfg.canonical_permutation()) {
        if (m.at(i) < 0) throw std::invalid_argument("negative entry in integer vector");
        owner[static_cast<std::size_t>(i)] =
            (i == cfg.i_star() || m.at(i) > 0) ? i : owner[static_cast<std::size_t>(cfg.predecessor(i))];
    }
    std::vector<Interval> blocks;
    std::vector<long> weights;
    for (Site i = 1; i <= cfg.n(); ++i) {
        const Site o = owner[static_cast<std::size_t>(i)];
        if (i > 1 && owner[static_cast<std::size_t>(i - 1)] == o) {
            blocks.back().last = i;
        } else {
            blocks.push_back({i, i});
            weights.push_back(m.at(o));
        }
    }
    return {IntervalPartition(cfg.n(), std::move(blocks)), std::move(weights)};
}

long ypir_simulate(const YpirParams& par, long k0, double t, RngStream& rng) {
    if (k0 < 0) throw std::invalid_argument("negative YPIR start state");
    long k = k0;
    double clock = 0.0;
    while (true) {
        const double total = k == 0 ? par.rho : par.s * static_cast<double>(k) + par.r;
        if (total == 0.0) return k;
        clock += rng.exponential(total);
        if (clock > t) return k;
        if (k == 0) {
            k = 1;
        } else if (rng.uniform() * total < par.s * static_cast<double>(k)) {
            ++k;
        } else {
            k = 1;
        }
    }
}

long ypir_sample(const YpirParams& par, long k0, double t, RngStream& rng) {
    if (k0 < 0) throw std::invalid_argument("negative YPIR start state");
    long k = k0;
    double clock = 0.0;
    while (true) {
        if (k == 0) {
            if (par.rho == 0.0) return 0;
            clock += rng.exponential(par.rho);
            if (clock >= t) return 0;
            k = 1;
            continue;
        }
        const double next = par.r > 0.0 ? clock + rng.exponential(par.r) : std::numeric_limits<double>::infinity();
        if (next >= t) return yule_advance(par.s, k, t - clock, rng);
        clock = next;
        k = 1;
    }
}

IntVector ypir_vector_simulate(const SiteConfig& cfg, const IntVector& m0, double t, RngStream& rng) {
    check_length(cfg, m0.m.size(), "integer vector");
    IntVector out = m0;
    for (Site i = 1; i <= cfg.n(); ++i) out.at(i) = ypir_sample(YpirParams::for_site(cfg, i), m0.at(i), t, rng);
    return out;
}

WeightedPartition wpp_simulate(const SiteConfig& cfg, const WeightedPartition& start, double t, RngStream& rng) {
    return decode(ypir_vector_simulate(cfg, encode(start, cfg), t, rng), cfg);
}

InitiationState initiation_simulate(const SiteConfig& cfg, const InitiationState& start, double t, RngStream& rng) {
    check_length(cfg, start.theta.size(), "initiation state");
    if (!start.at(cfg.i_star())) throw std::invalid_argument("the selected site cannot be Delta");
    InitiationState out = start;
    for (Site i = 1; i <= cfg.n(); ++i) {
        const YpirParams par = YpirParams::for_site(cfg, i);
        std::optional<double> theta = start.at(i);
        double clock = 0.0;
        while (true) {
            if (!theta) {
                if (par.rho == 0.0) break;
                const double w = rng.exponential(par.rho);
                if (clock + w >= t) break;
                clock += w;
                theta = 0.0;
                continue;
            }
            const double w = par.r > 0.0 ? rng.exponential(par.r) : std::numeric_limits<double>::infinity();
            if (clock + w >= t) {
                *theta += t - clock;
                break;
            }
            clock += w;
            theta = 0.0;
        }
        out.theta[static_cast<std::size_t>(i - 1)] = theta;
    }
    return out;
}

double theta_of_k(const SiteConfig& cfg, double f0, long k) {
    if (!(cfg.s() > 0.0)) throw std::invalid_argument("theta(k) needs s > 0");
    if (!(f0 > 0.0 && f0 < 1.0)) throw std::invalid_argument("theta(k) needs a fit fraction in (0, 1)");
    if (k < 1) throw std::invalid_argument("theta(k) needs k >= 1");
    if (k == 1) return 0.0;
    const double x = 1.0 - f0;
    const double kd = static_cast<double>(k);
    // e^{s theta} = x^{1-k} (1 - x^k) / (1 - x)
    return ((1.0 - kd) * std::log(x) + std::log1p(-std::pow(x, kd)) - std::log(f0)) / cfg.s();
}

InitiationState theta_of_vector(const SiteConfig& cfg, const IntVector& m, const Measure& nu) {
    check_length(cfg, m.m.size(), "integer vector");
    const double f0 = fit_fraction(nu, cfg.i_star());
    InitiationState out{std::vector<std::optional<double>>(static_cast<std::size_t>(cfg.n()))};
    for (Site i = 1; i <= cfg.n(); ++i)
        if (m.at(i) > 0) out.theta[static_cast<std::size_t>(i - 1)] = theta_of_k(cfg, f0, m.at(i));
    return out;
}

Measure little_h(const SiteConfig& cfg, long k, const Measure& nu) {
    if (k < 1) throw std::invalid_argument("h(k, .) needs k >= 1");
    const double w = std::pow(1.0 - fit_fraction(nu, cfg.i_star()), static_cast<double>(k));
    Measure out = cond_d(nu, cfg.i_star()) * w;
    out.add_scaled(cond_b(nu, cfg.i_star()), 1.0 - w);
    return out;
}

Measure duality_H(const SiteConfig& cfg, const WeightedPartition& wp, const Measure& nu) {
    if (wp.partition.n() != cfg.n()) throw std::invalid_argument("partition does not match the sequence length");
    return DualityKernel(cfg, nu).H(wp);
}

Measure duality_calH(const SiteConfig& cfg, const IntVector& m, const Measure& nu,
                     const std::optional<std::vector<Site>>& permutation) {
    check_length(cfg, m.m.size(), "integer vector");
    return DualityKernel(cfg, nu).calH(m, order_or_canonical(cfg, permutation));
}

Measure duality_calG(const SiteConfig& cfg, const InitiationState& theta, const Measure& nu,
                     const std::optional<std::vector<Site>>& permutation) {
    check_length(cfg, theta.theta.size(), "initiation state");
    return DualityKernel(cfg, nu).calG(theta, order_or_canonical(cfg, permutation));
}

McEstimate monte_carlo(SiteSet sites, const McOptions& opts, const std::function<Measure(RngStream&)>& sample) {
    if (opts.replicates < 1) throw std::invalid_argument("need at least one replicate");
    const std::size_t cells = std::size_t{1} << sites.size();
    const std::size_t n_blocks = (opts.replicates + kMcBlock - 1) / kMcBlock;
    std::vector<Moments> partial(n_blocks, Moments(cells));
    for_each_block(n_blocks, resolve_threads(opts.threads), [&](std::size_t b) {
        const std::size_t end = std::min(opts.replicates, (b + 1) * kMcBlock);
        for (std::size_t r = b * kMcBlock; r < end; ++r) {
            RngStream rng(opts.seed, r);
            Measure v = sample(rng);
            if (v.sites() != sites) throw std::logic_error("sample lives on the wrong site set");
            partial[b].add(v);
        }
    });
    Moments total(cells);
    for (const Moments& m : partial) total.merge(m);

    McEstimate out{Measure(sites, total.mean), Measure(sites), opts.replicates};
    if (opts.replicates > 1) {
        const double n = static_cast<double>(opts.replicates);
        for (std::size_t k = 0; k < cells; ++k) out.std_error[k] = std::sqrt(total.m2[k] / (n - 1.0) / n);
    }
    return out;
}

const char* flavor_name(DualFlavor flavor) {
    switch (flavor) {
        case DualFlavor::WPP: return "wpp";
        case DualFlavor::YPIR: return "ypir";
        case DualFlavor::INIT: return "init";
    }
    return "?";
}

DualFlavor parse_flavor(const std::string& name) {
    if (name == "wpp") return DualFlavor::WPP;
    if (name == "ypir") return DualFlavor::YPIR;
    if (name == "init") return DualFlavor::INIT;
    throw std::invalid_argument("unknown dual process '" + name + "' (expected wpp, ypir or init)");
}

McEstimate mc_solution_estimate(const SiteConfig& cfg, const Measure& omega0, double t, const McOptions& opts,
                                DualFlavor flavor) {
    require_probability(omega0, "initial measure");
    if (!(t >= 0.0)) throw std::invalid_argument("negative time");
    const DualityKernel kernel(cfg, omega0);
    const std::vector<Site>& order = cfg.canonical_permutation();
    switch (flavor) {
        case DualFlavor::WPP: {
            const WeightedPartition start = WeightedPartition::trivial(cfg.n());
            return monte_carlo(cfg.all_sites(), opts,
                               [&](RngStream& rng) { return kernel.H(wpp_simulate(cfg, start, t, rng)); });
        }
        case DualFlavor::YPIR: {
            const IntVector start = IntVector::unit(cfg.n(), cfg.i_star());
            return monte_carlo(cfg.all_sites(), opts, [&](RngStream& rng) {
                return kernel.calH(ypir_vector_simulate(cfg, start, t, rng), order);
            });
        }
        case DualFlavor::INIT: {
            const InitiationState start = InitiationState::initial(cfg);
            return monte_carlo(cfg.all_sites(), opts, [&](RngStream& rng) {
                return kernel.calG(initiation_simulate(cfg, start, t, rng), order);
            });
        }
    }
    throw std::invalid_argument("unknown dual process");
}

DualityReport make_report(std::string name, double t, Measure lhs, Measure rhs, Measure se, std::size_t replicates) {
    DualityReport out{std::move(name), t, std::move(lhs), std::move(rhs), std::move(se), {}, 0.0, replicates};
    out.z.resize(out.lhs.size());
    for (std::size_t k = 0; k < out.z.size(); ++k) {
        const double diff = out.lhs[k] - out.rhs[k];
        if (out.std_error[k] > 0.0)
            out.z[k] = diff / out.std_error[k];
        else
            out.z[k] = std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        out.max_abs_z = std::max(out.max_abs_z, std::abs(out.z[k]));
    }
    return out;
}

DualityReport duality_check(const SiteConfig& cfg, const Measure& nu, const DualStart& start, double t,
                            const McOptions& opts, const SolverSettings& solver) {
    require_probability(nu, "measure");
    if (!(t >= 0.0)) throw std::invalid_argument("negative time");
    Measure flowed = nu;
    if (t > 0.0) {
        SolverSettings st = solver;
        st.t_max = t;
        flowed = integrate_ode(cfg, nu, st).final();
    }
    const DualityKernel kernel(cfg, nu);
    const std::vector<Site>& order = cfg.canonical_permutation();
    if (const auto* m = std::get_if<IntVector>(&start)) {
        check_length(cfg, m->m.size(), "integer vector");
        Measure lhs = duality_calH(cfg, *m, flowed);
        McEstimate mc = monte_carlo(cfg.all_sites(), opts, [&](RngStream& rng) {
            return kernel.calH(ypir_vector_simulate(cfg, *m, t, rng), order);
        });
        return make_report("ypir_duality", t, std::move(lhs), std::move(mc.mean), std::move(mc.std_error),
                           mc.replicates);
    }
    const auto& theta = std::get<InitiationState>(start);
    check_length(cfg, theta.theta.size(), "initiation state");
    Measure lhs = duality_calG(cfg, theta, flowed);
    McEstimate mc = monte_carlo(cfg.all_sites(), opts, [&](RngStream& rng) {
        return kernel.calG(initiation_simulate(cfg, theta, t, rng), order);
    });
    return make_report("initiation_duality", t, std::move(lhs), std::move(mc.mean), std::move(mc.std_error),
                       mc.replicates);
}

DualityReport compare_ypir_initiation(const SiteConfig& cfg, const Measure& nu, const IntVector& m, double t,
                                      const McOptions& opts, const std::optional<Measure>& theta_reference) {
    require_probability(nu, "measure");
    const DualityKernel kernel(cfg, nu);
    const std::vector<Site>& order = cfg.canonical_permutation();
    const InitiationState theta0 = theta_of_vector(cfg, m, theta_reference ? *theta_reference : nu);

    McOptions a = opts, b = opts;
    a.seed = derive_seed(opts.seed, 1);
    b.seed = derive_seed(opts.seed, 2);
    McEstimate via_m = monte_carlo(cfg.all_sites(), a, [&](RngStream& rng) {
        return kernel.calH(ypir_vector_simulate(cfg, m, t, rng), order);
    });
    McEstimate via_theta = monte_carlo(cfg.all_sites(), b, [&](RngStream& rng) {
        return kernel.calG(initiation_simulate(cfg, theta0, t, rng), order);
    });
    Measure se(cfg.all_sites());
    for (std::size_t k = 0; k < se.size(); ++k)
        se[k] = std::hypot(via_m.std_error[k], via_theta.std_error[k]);
    return make_report("ypir_vs_initiation", t, std::move(via_m.mean), std::move(via_theta.mean), std::move(se),
                       opts.replicates);
}

DualityReport pure_selection_check(const SiteConfig& cfg, const Measure& mu, long k, double t, const McOptions& opts) {
    require_probability(mu, "measure");
    if (k < 1) throw std::invalid_argument("Yule start needs k >= 1");
    Measure lhs = little_h(cfg, k, selection_flow(cfg, mu, t));
    const Measure b = cond_b(mu, cfg.i_star());
    const Measure d = cond_d(mu, cfg.i_star());
    const double x = 1.0 - fit_fraction(mu, cfg.i_star());
    const YpirParams yule{cfg.s(), 0.0, 0.0};
    McEstimate mc = monte_carlo(mu.sites(), opts, [&](RngStream& rng) {
        const double w = std::pow(x, static_cast<double>(ypir_sample(yule, k, t, rng)));
        Measure out = d * w;
        out.add_scaled(b, 1.0 - w);
        return out;
    });
    return make_report("pure_selection_duality", t, std::move(lhs), std::move(mc.mean), std::move(mc.std_error),
                       mc.replicates);
}

double pure_selection_analytic_residual(const SiteConfig& cfg, const Measure& mu, long k, double t) {
    const Measure lhs = little_h(cfg, k, selection_flow(cfg, mu, t));
    const double x = 1.0 - fit_fraction(mu, cfg.i_star());
    const double w = std::pow(yule_pgf(cfg.s(), t, x), static_cast<double>(k));
    Measure rhs = cond_d(mu, cfg.i_star()) * w;
    rhs.add_scaled(cond_b(mu, cfg.i_star()), 1.0 - w);
    return l1_distance(lhs, rhs);
}

}  // namespace selrec
