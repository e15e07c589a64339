#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "selrec/moran.hpp"

using namespace selrec;

namespace {

bool is_fit(const SiteConfig& cfg, std::uint32_t type) { return !((type >> (cfg.i_star() - 1)) & 1u); }

}  // namespace

TEST_CASE("a single individual never changes") {
    const SiteConfig cfg(3, 2, 1.0, {0.6, 0.0, 0.9});
    RngStream rng(1, 0);
    const MoranState out = moran_simulate(cfg, MoranState::from_types(cfg, {0b101}), 5.0, rng);
    CHECK(out.types == std::vector<std::uint32_t>{0b101});
    CHECK(out.clock == 5.0);
    CHECK(out.neutral_events > 0);
}

TEST_CASE("monomorphic populations stay monomorphic") {
    const SiteConfig cfg(3, 1, 2.0, {0.0, 1.0, 1.0});
    RngStream rng(2, 0);
    const MoranState out = moran_simulate(cfg, MoranState::from_types(cfg, std::vector<std::uint32_t>(50, 0b110)), 2.0, rng);
    for (std::uint32_t x : out.types) CHECK(x == 0b110);
    const Measure emp = empirical_measure(cfg, out);
    CHECK(emp.at_pattern(0b110) == 1.0);
}

TEST_CASE("population sampling and empirical measure") {
    const SiteConfig cfg(2, 1, 1.0, {0.0, 0.5});
    const Measure omega0(cfg.all_sites(), {0.1, 0.2, 0.3, 0.4});
    RngStream rng(3, 0);
    const MoranState pop = sample_population(cfg, omega0, 20000, rng);
    CHECK(pop.size() == 20000);
    const Measure emp = empirical_measure(cfg, pop);
    CHECK(emp.mass() == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t k = 0; k < 4; ++k) {
        const double p = omega0[k];
        CHECK(std::abs(emp[k] - p) <= 4.0 * std::sqrt(p * (1 - p) / 20000));
    }
    RngStream step(3, 1);
    const MoranState later = moran_simulate(cfg, pop, 0.5, step);
    CHECK(later.size() == pop.size());
    CHECK(empirical_measure(cfg, later).mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("event log replays to the final state") {
    const SiteConfig cfg(3, 2, 1.5, {0.8, 0.0, 1.1});
    const Measure omega0 = Measure::uniform(cfg.all_sites());
    RngStream init(4, 0), rng(4, 1);
    const MoranState start = sample_population(cfg, omega0, 40, init);
    std::vector<MoranEvent> log;
    const MoranState out = moran_simulate(cfg, start, 3.0, rng, &log);
    std::vector<std::uint32_t> types = start.types;
    long selective = 0, effective = 0, neutral = 0;
    std::vector<long> recomb(3, 0);
    double last = 0.0;
    for (const MoranEvent& e : log) {
        CHECK(e.time >= last);
        last = e.time;
        switch (e.kind) {
        case MoranEventKind::Neutral:
            ++neutral;
            types[e.alpha] = types[e.beta];
            break;
        case MoranEventKind::Selective:
            ++selective;
            CHECK(e.effective == is_fit(cfg, types[e.beta]));
            if (e.effective) {
                ++effective;
                types[e.alpha] = types[e.beta];
            }
            break;
        case MoranEventKind::Recombination: {
            ++recomb[static_cast<std::size_t>(e.site - 1)];
            const std::uint32_t tail = cfg.tail(e.site).mask();
            types[e.alpha] = (types[e.gamma] & tail) | (types[e.beta] & ~tail);
            break;
        }
        }
    }
    CHECK(last <= 3.0);
    CHECK(types == out.types);
    CHECK(neutral == out.neutral_events);
    CHECK(selective == out.selective_events);
    CHECK(effective == out.selective_effective);
    CHECK(recomb == out.recombination_events);
    CHECK(recomb[1] == 0);
}

TEST_CASE("event counts have Poisson means") {
    const SiteConfig cfg(3, 2, 1.5, {0.8, 0.0, 1.1});
    const std::size_t n_ind = 30;
    const double t = 2.0;
    const int runs = 200;
    double neutral = 0, selective = 0, r1 = 0, r3 = 0;
    for (int k = 0; k < runs; ++k) {
        RngStream init(5, 2 * k), rng(5, 2 * k + 1);
        const MoranState pop = sample_population(cfg, Measure::uniform(cfg.all_sites()), n_ind, init);
        const MoranState out = moran_simulate(cfg, pop, t, rng);
        neutral += out.neutral_events;
        selective += out.selective_events;
        r1 += out.recombination_events[0];
        r3 += out.recombination_events[2];
    }
    auto z = [&](double total, double rate) {
        const double mean = rate * static_cast<double>(n_ind) * t * runs;
        return (total - mean) / std::sqrt(mean);
    };
    CHECK(std::abs(z(neutral, 1.0)) <= 4.0);
    CHECK(std::abs(z(selective, cfg.s())) <= 4.0);
    CHECK(std::abs(z(r1, cfg.rho(1))) <= 4.0);
    CHECK(std::abs(z(r3, cfg.rho(3))) <= 4.0);
}

TEST_CASE("one locus: fit fraction follows the logistic curve") {
    const SiteConfig cfg(1, 1, 1.0, {0.0});
    const double f0 = 0.3, t = 1.0;
    const double logistic = f0 * std::exp(t) / (f0 * std::exp(t) + 1 - f0);
    const Measure omega0(cfg.all_sites(), {f0, 1 - f0});
    const int runs = 20;
    double sum = 0, sum2 = 0;
    for (int k = 0; k < runs; ++k) {
        RngStream init(6, 2 * k), rng(6, 2 * k + 1);
        const MoranState out = moran_simulate(cfg, sample_population(cfg, omega0, 10000, init), t, rng);
        const double f = empirical_measure(cfg, out)[0];
        sum += f;
        sum2 += f * f;
    }
    const double mean = sum / runs;
    const double se = std::sqrt((sum2 / runs - mean * mean) * runs / (runs - 1) / runs);
    CHECK(std::abs(mean - logistic) <= 3.0 * se);
    CHECK(std::abs(mean - logistic) <= 0.01);
}

TEST_CASE("law of large numbers table") {
    const SiteConfig cfg(2, 1, 1.0, {0.0, 0.7});
    const Measure omega0(cfg.all_sites(), {0.3, 0.1, 0.2, 0.4});
    const LlnTable a = lln_convergence(cfg, omega0, 1.0, {50, 500, 5000}, 10, 8, 1);
    REQUIRE(a.rows.size() == 3);
    CHECK(a.rows[0].mean_distance > a.rows[1].mean_distance);
    CHECK(a.rows[1].mean_distance > a.rows[2].mean_distance);
    CHECK(a.slope < 0.0);
    const LlnTable b = lln_convergence(cfg, omega0, 1.0, {50, 500, 5000}, 10, 8, 2);
    for (std::size_t k = 0; k < 3; ++k) CHECK(a.rows[k].mean_distance == b.rows[k].mean_distance);
}
