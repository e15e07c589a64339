#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "selrec/measure.hpp"
#include "selrec/site_config.hpp"

using namespace selrec;

namespace {

Measure random_measure(SiteSet sites, std::mt19937_64& gen) {
    std::exponential_distribution<double> e(1.0);
    Measure out(sites);
    double total = 0.0;
    for (double& v : out.values()) total += v = e(gen);
    out *= 1.0 / total;
    return out;
}

SiteSet random_subset(int n, std::mt19937_64& gen) {
    return SiteSet(static_cast<std::uint32_t>(gen()) & SiteSet::all(n).mask());
}

void check_close(const Measure& a, const Measure& b, double tol = 1e-14) {
    REQUIRE(a.sites() == b.sites());
    CHECK(l1_distance(a, b) <= tol);
}

}  // namespace

TEST_CASE("project") {
    const SiteSet s12 = SiteSet::of({1, 2});
    // delta at (0,1): letter 1 at site 2
    const Measure nu = Measure::point(s12, 0b10);
    check_close(project(nu, SiteSet::single(2)), Measure::point(SiteSet::single(2), 0b10));
    check_close(project(Measure::uniform(s12), SiteSet::single(1)), Measure(SiteSet::single(1), {0.5, 0.5}));

    std::mt19937_64 gen(1);
    const Measure p = random_measure(SiteSet::all(3), gen);
    const Measure scalar = project(p, SiteSet{});
    CHECK(scalar.sites().empty());
    CHECK(scalar[0] == doctest::Approx(1.0).epsilon(1e-14));

    SUBCASE("nested projections and fibre sums against full-pattern loops") {
        for (int trial = 0; trial < 200; ++trial) {
            const Measure q = random_measure(SiteSet::all(4), gen);
            const SiteSet a = random_subset(4, gen), b = random_subset(4, gen);
            check_close(project(project(q, a), b), project(q, a & b));
            const oracle::Vec ref = oracle::marginal(q.values(), a.mask());
            const Measure pa = project(q, a);
            for (std::size_t idx = 0; idx < pa.size(); ++idx)
                CHECK(pa[idx] == doctest::Approx(ref[pa.pattern_of(idx)]).epsilon(1e-13));
        }
    }
}

TEST_CASE("tensor") {
    const Measure a = Measure::point(SiteSet::single(1), 0);
    const Measure b = Measure::point(SiteSet::single(2), 0b10);
    check_close(tensor(a, b), Measure::point(SiteSet::of({1, 2}), 0b10));
    const Measure half1(SiteSet::single(1), {0.5, 0.5}), half2(SiteSet::single(2), {0.5, 0.5});
    check_close(tensor(half1, half2), Measure::uniform(SiteSet::of({1, 2})));
    std::mt19937_64 gen(2);
    const Measure nu = random_measure(SiteSet::of({2, 3}), gen);
    check_close(tensor(Measure::scalar(1.0), nu), nu);
    CHECK_THROWS_AS(tensor(nu, half2), std::invalid_argument);
    // mass multiplies
    CHECK(tensor(nu * 2.0, half1 * 3.0).mass() == doctest::Approx(6.0));
}

TEST_CASE("boxtimes algebra") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(gen() % 4);
        const SiteSet i = random_subset(n, gen), j = random_subset(n, gen), k = random_subset(n, gen);
        const Measure mi = random_measure(i, gen), mj = random_measure(j, gen), mk = random_measure(k, gen);
        check_close(boxtimes(boxtimes(mi, mj), mk), boxtimes(mi, boxtimes(mj, mk)), 1e-13);
        if (i.disjoint(j)) {
            check_close(boxtimes(mi, mj), tensor(mi, mj), 1e-15);
            check_close(boxtimes(mi, mj), boxtimes(mj, mi), 1e-15);
        }
        if (i.subset_of(j)) check_close(boxtimes(mi, mj), mj, 1e-13);
    }
}

TEST_CASE("heads, tails and order") {
    const SiteConfig c1(3, 1, 1.0, {0, 0.3, 0.4});
    CHECK(c1.tail(2) == SiteSet::of({2, 3}));
    CHECK(c1.head(2) == SiteSet::of({1}));
    CHECK(c1.predecessor(3) == 2);
    CHECK(c1.predecessor(2) == 1);
    CHECK(c1.canonical_permutation() == std::vector<Site>{1, 2, 3});
    CHECK(c1.resetting_rates() == std::vector<double>{0, 0.3, 0.7});

    const SiteConfig c2(3, 2, 1.0, {0.5, 0, 0.25});
    CHECK(c2.tail(1) == SiteSet::of({1}));
    CHECK(c2.head(1) == SiteSet::of({2, 3}));
    CHECK(c2.tail(3) == SiteSet::of({3}));
    CHECK(c2.head(3) == SiteSet::of({1, 2}));
    CHECK_FALSE(c2.precedes(1, 3));
    CHECK_FALSE(c2.precedes(3, 1));
    CHECK(c2.canonical_permutation() == std::vector<Site>{2, 1, 3});
    CHECK(c2.resetting_rates() == std::vector<double>{0.5, 0, 0.25});
    CHECK_THROWS_AS(c2.predecessor(2), std::invalid_argument);

    const SiteConfig c3(4, 4, 1.0, {0.1, 0.2, 0.3, 0});
    CHECK(c3.canonical_permutation() == std::vector<Site>{4, 3, 2, 1});

    for (const SiteConfig* c : {&c1, &c2, &c3}) {
        CHECK(c->tail(c->i_star()) == c->all_sites());
        CHECK(c->head(c->i_star()).empty());
        CHECK(is_nondecreasing_permutation(*c, c->canonical_permutation()));
        for (Site j = 1; j <= c->n(); ++j) CHECK(c->precedes(c->i_star(), j));
        for (Site i : c->neutral_sites().sites()) {
            CHECK(c->resetting_rate(i) >= c->rho(i));
            CHECK(std::abs(c->predecessor(i) - i) == 1);
            CHECK(c->tail(i).mask() == oracle::tail_mask({c->n(), c->i_star(), 0, c->rho()}, i));
        }
    }
    const SiteConfig zero(3, 2, 0.0, {0, 0, 0});
    CHECK(zero.resetting_rates() == std::vector<double>{0, 0, 0});
    CHECK_THROWS_AS(SiteConfig(3, 2, 1.0, {0, 0.1, 0}), std::invalid_argument);
}

TEST_CASE("recombinators") {
    const SiteConfig cfg(2, 1, 1.0, {0, 0.5});
    Measure nu(SiteSet::all(2));
    nu[0b00] = 0.5;
    nu[0b11] = 0.5;
    check_close(recombinator(cfg, nu, 2), Measure::uniform(SiteSet::all(2)));
    CHECK_THROWS_AS(recombinator(cfg, nu, 1), std::invalid_argument);

    std::mt19937_64 gen(4);
    const SiteConfig c4(4, 2, 1.0, {0.1, 0, 0.2, 0.3});
    for (int trial = 0; trial < 100; ++trial) {
        const Measure p = random_measure(SiteSet::all(4), gen);
        for (Site i : c4.neutral_sites().sites()) {
            const Measure r = recombinator(c4, p, i);
            check_close(recombinator(c4, r, i), r, 1e-14);
            CHECK(r.mass() == doctest::Approx(1.0));
            check_close(partition_recombinator(p, IntervalPartition::from_sets(4, {c4.head(i), c4.tail(i)})), r);
        }
        check_close(partition_recombinator(p, IntervalPartition::trivial(4)), p);
        Measure singles = Measure::scalar(1.0);
        for (Site i = 1; i <= 4; ++i) singles = tensor(singles, project(p, SiteSet::single(i)));
        check_close(partition_recombinator(p, IntervalPartition(4, {{1, 1}, {2, 2}, {3, 3}, {4, 4}})), singles);
    }
    // a product over {C_i, D_i} is fixed
    const Measure prod = tensor(random_measure(c4.head(3), gen), random_measure(c4.tail(3), gen));
    check_close(recombinator(c4, prod, 3), prod, 1e-15);
    CHECK_THROWS_AS(IntervalPartition(4, {{1, 2}, {4, 4}}), std::invalid_argument);
}

TEST_CASE("selection operators") {
    const SiteSet one = SiteSet::single(1);
    const Measure nu(one, {0.3, 0.7});
    CHECK(fit_fraction(nu, 1) == doctest::Approx(0.3));
    check_close(cond_b(nu, 1), Measure::point(one, 0));
    check_close(cond_d(nu, 1), Measure::point(one, 1));

    const Measure fit_point = Measure::point(SiteSet::all(3), 0b101);  // letter 0 at site 2
    CHECK(fit_fraction(fit_point, 2) == 1.0);
    CHECK(cond_b(fit_point, 2) == fit_point);
    CHECK(cond_d(fit_point, 2) == fit_point);
    const Measure unfit_point = Measure::point(SiteSet::all(3), 0b010);
    CHECK(cond_b(unfit_point, 2) == unfit_point);

    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 3);
        const Site i_star = 1 + static_cast<int>(gen() % n);
        const Measure mu = random_measure(SiteSet::all(n), gen);
        check_close(select_F(select_F(mu, i_star), i_star), select_F(mu, i_star), 0.0);
        const Measure other = random_measure(SiteSet::all(n) - SiteSet::single(i_star), gen);
        check_close(select_F(boxtimes(mu, other), i_star), boxtimes(select_F(mu, i_star), other), 1e-14);
        const double f = fit_fraction(mu, i_star);
        check_close(cond_b(mu, i_star) * f + cond_d(mu, i_star) * (1.0 - f), mu, 1e-14);
    }
}

TEST_CASE("marginal rates") {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 5);
        const Site i_star = 1 + static_cast<int>(gen() % n);
        std::vector<double> rho(static_cast<std::size_t>(n));
        for (double& r : rho) r = u(gen);
        rho[static_cast<std::size_t>(i_star - 1)] = 0.0;
        const SiteConfig cfg(n, i_star, 1.0, rho);
        // two-site subsystem {i*, i}: rate equals the resetting rate r_i
        for (Site i : cfg.neutral_sites().sites()) {
            auto rates = marginal_rates(cfg, SiteSet::of({i_star, i}));
            REQUIRE(rates.size() == 1);
            CHECK(rates[0].rate == doctest::Approx(cfg.resetting_rate(i)).epsilon(1e-14));
        }
        // full system: marginal rates are the rates themselves
        for (const MarginalRate& mr : marginal_rates(cfg, cfg.all_sites()))
            CHECK(mr.rate == doctest::Approx(cfg.rho(mr.site)));
    }
    const SiteConfig cfg(3, 2, 1.0, {0.1, 0, 0.2});
    CHECK_THROWS_AS(marginal_rates(cfg, SiteSet::of({1, 3})), std::invalid_argument);
}

TEST_CASE("measure validation") {
    CHECK_THROWS_AS(Measure(SiteSet::all(2), {1.0, 0.0}), std::invalid_argument);
    CHECK(is_probability(Measure::uniform(SiteSet::all(3))));
    CHECK_FALSE(is_probability(Measure(SiteSet::single(1), {1.5, -0.5})));
    const double p0[] = {0.25, 1.0};
    const Measure prod = Measure::product(SiteSet::all(2), p0);
    CHECK(prod[0b00] == doctest::Approx(0.25));
    CHECK(prod[0b01] == doctest::Approx(0.75));
    CHECK(prod[0b10] == 0.0);
}
