#include "selrec/moran.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "selrec/parallel.hpp"

namespace selrec {

MoranState MoranState::from_types(const SiteConfig& cfg, std::vector<std::uint32_t> types) {
    const std::uint32_t mask = cfg.all_sites().mask();
    for (std::uint32_t x : types)
        if (x & ~mask) throw std::invalid_argument("type has letters outside the sequence");
    MoranState out;
    out.types = std::move(types);
    out.recombination_events.assign(static_cast<std::size_t>(cfg.n()), 0);
    return out;
}

MoranState moran_simulate(const SiteConfig& cfg, const MoranState& initial, double t, RngStream& rng,
                          std::vector<MoranEvent>* log) {
    if (initial.types.empty()) throw std::invalid_argument("population must not be empty");
    if (!(t >= 0.0)) throw std::invalid_argument("negative time");
    MoranState state = initial;
    state.recombination_events.resize(static_cast<std::size_t>(cfg.n()), 0);
    const std::size_t n_ind = state.size();
    const double pop = static_cast<double>(n_ind);
    const std::uint32_t fit_bit = 1u << (cfg.i_star() - 1);

    std::vector<Site> reco_sites;
    std::vector<double> reco_cumulative;
    double reco_total = 0.0;
    for (Site i : cfg.neutral_sites().sites()) {
        if (cfg.rho(i) <= 0.0) continue;
        reco_total += cfg.rho(i) * pop;
        reco_sites.push_back(i);
        reco_cumulative.push_back(reco_total);
    }
    const double neutral_rate = pop;
    const double selective_rate = cfg.s() * pop;
    const double total = neutral_rate + selective_rate + reco_total;
    const double end = initial.clock + t;

    while (true) {
        const double next = state.clock + rng.exponential(total);
        if (next > end) break;
        state.clock = next;
        const double u = rng.uniform() * total;
        const std::size_t alpha = rng.index(n_ind);
        const std::size_t beta = rng.index(n_ind);
        if (u < neutral_rate) {
            state.types[alpha] = state.types[beta];
            ++state.neutral_events;
            if (log) log->push_back({next, MoranEventKind::Neutral, alpha, beta, beta, 0, true});
        } else if (u < neutral_rate + selective_rate) {
            const bool fit = (state.types[beta] & fit_bit) == 0;
            if (fit) {
                state.types[alpha] = state.types[beta];
                ++state.selective_effective;
            }
            ++state.selective_events;
            if (log) log->push_back({next, MoranEventKind::Selective, alpha, beta, beta, 0, fit});
        } else {
            const double v = u - neutral_rate - selective_rate;
            auto it = std::upper_bound(reco_cumulative.begin(), reco_cumulative.end(), v);
            if (it == reco_cumulative.end()) --it;
            const Site site = reco_sites[static_cast<std::size_t>(it - reco_cumulative.begin())];
            const std::size_t gamma = rng.index(n_ind);
            const std::uint32_t tail = cfg.tail(site).mask();
            state.types[alpha] = (state.types[beta] & ~tail) | (state.types[gamma] & tail);
            ++state.recombination_events[static_cast<std::size_t>(site - 1)];
            if (log) log->push_back({next, MoranEventKind::Recombination, alpha, beta, gamma, site, true});
        }
    }
    state.clock = end;
    return state;
}

Measure empirical_measure(const SiteConfig& cfg, const MoranState& state) {
    if (state.types.empty()) throw std::invalid_argument("population must not be empty");
    std::vector<std::size_t> counts(std::size_t{1} << cfg.n(), 0);
    for (std::uint32_t x : state.types) ++counts[x];
    Measure out(cfg.all_sites());
    const double pop = static_cast<double>(state.size());
    for (std::size_t k = 0; k < counts.size(); ++k) out[k] = static_cast<double>(counts[k]) / pop;
    return out;
}

MoranState sample_population(const SiteConfig& cfg, const Measure& omega0, std::size_t n_individuals,
                             RngStream& rng) {
    if (omega0.sites() != cfg.all_sites()) throw std::invalid_argument("initial measure must live on X");
    require_probability(omega0, "initial measure");
    std::vector<double> cumulative(omega0.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < omega0.size(); ++k) cumulative[k] = acc += std::max(omega0[k], 0.0);
    std::vector<std::uint32_t> types(n_individuals);
    for (auto& x : types) {
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), rng.uniform() * acc);
        if (it == cumulative.end()) --it;
        x = static_cast<std::uint32_t>(it - cumulative.begin());
    }
    return MoranState::from_types(cfg, std::move(types));
}

LlnTable lln_convergence(const SiteConfig& cfg, const Measure& omega0, double t,
                         const std::vector<std::size_t>& populations, std::size_t replicates, std::uint64_t seed,
                         int threads, const SolverSettings& solver) {
    if (replicates < 1) throw std::invalid_argument("need at least one replicate");
    Measure target = omega0;
    if (t > 0.0) {
        SolverSettings st = solver;
        st.t_max = t;
        target = integrate_ode(cfg, omega0, st).final();
    }
    LlnTable table;
    for (std::size_t pop : populations) {
        if (pop < 1) throw std::invalid_argument("population size must be positive");
        std::vector<double> dist(replicates);
        const std::uint64_t pop_seed = derive_seed(seed, pop);
        for_each_block(replicates, resolve_threads(threads), [&](std::size_t r) {
            RngStream rng(pop_seed, r);
            MoranState state = sample_population(cfg, omega0, pop, rng);
            state = moran_simulate(cfg, state, t, rng);
            dist[r] = l1_distance(empirical_measure(cfg, state), target);
        });
        double mean = 0.0;
        for (double d : dist) mean += d;
        mean /= static_cast<double>(replicates);
        double var = 0.0;
        for (double d : dist) var += (d - mean) * (d - mean);
        const double se =
            replicates > 1 ? std::sqrt(var / static_cast<double>(replicates - 1) / static_cast<double>(replicates)) : 0.0;
        table.rows.push_back({pop, mean, se});
    }
    if (table.rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double k = static_cast<double>(table.rows.size());
        for (const LlnRow& row : table.rows) {
            const double x = std::log(static_cast<double>(row.population));
            const double y = std::log(row.mean_distance);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        table.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    }
    return table;
}

}  // namespace selrec
