#include "selrec/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace selrec {

namespace {

// Scatter the low bits of `idx` into the set bits of `mask` (pdep).
std::uint32_t deposit(std::uint32_t idx, std::uint32_t mask) {
    std::uint32_t out = 0;
    for (std::uint32_t bit = 1; mask != 0; mask &= mask - 1, bit <<= 1)
        if (idx & bit) out |= mask & (~mask + 1);
    return out;
}

// Gather the bits of `pattern` at the set bits of `mask` into the low bits (pext).
std::uint32_t extract(std::uint32_t pattern, std::uint32_t mask) {
    std::uint32_t out = 0;
    for (std::uint32_t bit = 1; mask != 0; mask &= mask - 1, bit <<= 1)
        if (pattern & mask & (~mask + 1)) out |= bit;
    return out;
}

void require_same_sites(const Measure& a, const Measure& b) {
    if (a.sites() != b.sites()) throw std::invalid_argument("measures live on different site sets");
}

void require_selected(const Measure& nu, Site i_star) {
    if (!nu.sites().contains(i_star))
        throw std::invalid_argument("measure does not contain the selected site");
}

// Index bit of the selected site within the site set of `nu`.
std::size_t selected_bit(const Measure& nu, Site i_star) {
    std::uint32_t below = nu.sites().mask() & ((1u << (i_star - 1)) - 1u);
    return std::size_t{1} << std::popcount(below);
}

}  // namespace

Measure::Measure(SiteSet sites) : sites_(sites), values_(std::size_t{1} << sites.size(), 0.0) {
    if (sites.size() > kMaxSites) throw std::invalid_argument("too many sites for dense storage");
}

Measure::Measure(SiteSet sites, std::vector<double> values) : sites_(sites), values_(std::move(values)) {
    if (sites.size() > kMaxSites) throw std::invalid_argument("too many sites for dense storage");
    if (values_.size() != (std::size_t{1} << sites.size()))
        throw std::invalid_argument("value array length must be 2^|sites|");
}

Measure Measure::scalar(double value) { return Measure(SiteSet{}, {value}); }

Measure Measure::point(SiteSet sites, std::uint32_t pattern) {
    Measure out(sites);
    out.values_[extract(pattern, sites.mask())] = 1.0;
    return out;
}

Measure Measure::uniform(SiteSet sites) {
    Measure out(sites);
    std::fill(out.values_.begin(), out.values_.end(), 1.0 / static_cast<double>(out.size()));
    return out;
}

Measure Measure::product(SiteSet sites, std::span<const double> p0) {
    if (p0.size() != static_cast<std::size_t>(sites.size()))
        throw std::invalid_argument("need one marginal per site");
    Measure out(sites);
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
        double v = 1.0;
        for (std::size_t k = 0; k < p0.size(); ++k) v *= ((idx >> k) & 1u) ? 1.0 - p0[k] : p0[k];
        out.values_[idx] = v;
    }
    return out;
}

double Measure::at_pattern(std::uint32_t pattern) const { return values_[extract(pattern, sites_.mask())]; }

std::uint32_t Measure::pattern_of(std::size_t idx) const {
    return deposit(static_cast<std::uint32_t>(idx), sites_.mask());
}

double Measure::mass() const {
    // Neumaier summation keeps the mass check meaningful for 2^20 entries.
    double sum = 0.0, comp = 0.0;
    for (double v : values_) {
        double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

Measure& Measure::operator+=(const Measure& other) { return add_scaled(other, 1.0); }
Measure& Measure::operator-=(const Measure& other) { return add_scaled(other, -1.0); }

Measure& Measure::operator*=(double factor) {
    for (double& v : values_) v *= factor;
    return *this;
}

Measure& Measure::add_scaled(const Measure& other, double factor) {
    require_same_sites(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += factor * other.values_[k];
    return *this;
}

bool is_probability(const Measure& nu, double mass_tol, double neg_tol) {
    for (double v : nu.values())
        if (!(v >= -neg_tol)) return false;
    return std::abs(nu.mass() - 1.0) <= mass_tol;
}

void require_probability(const Measure& nu, const char* what) {
    if (!is_probability(nu)) throw std::invalid_argument(std::string(what) + " is not a probability measure");
}

Measure project(const Measure& nu, SiteSet a) {
    const SiteSet source = nu.sites();
    const SiteSet target = source & a;
    if (target == source) return nu;
    Measure out(target);
    if (target.empty()) {
        out[0] = nu.mass();
        return out;
    }
    for (std::size_t idx = 0; idx < nu.size(); ++idx) {
        std::uint32_t pattern = deposit(static_cast<std::uint32_t>(idx), source.mask());
        out[extract(pattern, target.mask())] += nu[idx];
    }
    return out;
}

Measure tensor(const Measure& nu_i, const Measure& nu_j) {
    if (!nu_i.sites().disjoint(nu_j.sites())) throw std::invalid_argument("tensor factors must be disjoint");
    if (nu_i.sites().empty()) return nu_j * nu_i[0];
    if (nu_j.sites().empty()) return nu_i * nu_j[0];
    const SiteSet joint = nu_i.sites() | nu_j.sites();
    Measure out(joint);
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
        std::uint32_t pattern = deposit(static_cast<std::uint32_t>(idx), joint.mask());
        out[idx] = nu_i[extract(pattern, nu_i.sites().mask())] * nu_j[extract(pattern, nu_j.sites().mask())];
    }
    return out;
}

Measure boxtimes(const Measure& nu_i, const Measure& nu_j) {
    return tensor(project(nu_i, nu_i.sites() - nu_j.sites()), nu_j);
}

double l1_distance(const Measure& mu, const Measure& nu) {
    require_same_sites(mu, nu);
    double sum = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) sum += std::abs(mu[k] - nu[k]);
    return sum;
}

double fit_fraction(const Measure& nu, Site i_star) {
    require_selected(nu, i_star);
    const std::size_t bit = selected_bit(nu, i_star);
    double f = 0.0;
    for (std::size_t idx = 0; idx < nu.size(); ++idx)
        if (!(idx & bit)) f += nu[idx];
    return f;
}

Measure select_F(const Measure& nu, Site i_star) {
    require_selected(nu, i_star);
    const std::size_t bit = selected_bit(nu, i_star);
    Measure out = nu;
    for (std::size_t idx = 0; idx < out.size(); ++idx)
        if (idx & bit) out[idx] = 0.0;
    return out;
}

Measure cond_b(const Measure& nu, Site i_star) {
    const double f = fit_fraction(nu, i_star);
    if (f == 0.0) return nu;
    return select_F(nu, i_star) * (1.0 / f);
}

Measure cond_d(const Measure& nu, Site i_star) {
    const double f = fit_fraction(nu, i_star);
    if (f == 1.0) return nu;
    Measure out = nu - select_F(nu, i_star);
    return out * (1.0 / (1.0 - f));
}

SiteSet Interval::sites() const {
    std::uint32_t upper = last >= 32 ? ~0u : ((1u << last) - 1u);
    std::uint32_t lower = (1u << (first - 1)) - 1u;
    return SiteSet(upper & ~lower);
}

IntervalPartition::IntervalPartition(int n, std::vector<Interval> blocks) : n_(n), blocks_(std::move(blocks)) {
    if (n < 1 || n > kMaxSites) throw std::invalid_argument("partition size out of range");
    std::sort(blocks_.begin(), blocks_.end());
    Site next = 1;
    for (const Interval& b : blocks_) {
        if (b.first != next || b.last < b.first)
            throw std::invalid_argument("blocks must be disjoint nonempty intervals covering S");
        next = b.last + 1;
    }
    if (next != n + 1) throw std::invalid_argument("blocks must be disjoint nonempty intervals covering S");
}

IntervalPartition IntervalPartition::from_sets(int n, const std::vector<SiteSet>& sets) {
    std::vector<Interval> blocks;
    for (SiteSet set : sets) {
        auto s = set.sites();
        if (s.empty() || s.back() - s.front() + 1 != static_cast<int>(s.size()))
            throw std::invalid_argument("partition block is not an interval");
        blocks.push_back({s.front(), s.back()});
    }
    return IntervalPartition(n, std::move(blocks));
}

Measure recombinator(const SiteConfig& cfg, const Measure& nu, Site i) {
    if (i == cfg.i_star()) throw std::invalid_argument("no recombinator at the selected site");
    if (i < 1 || i > cfg.n()) throw std::invalid_argument("site out of range");
    if (nu.sites() != cfg.all_sites()) throw std::invalid_argument("recombinator needs a measure on X");
    return tensor(project(nu, cfg.head(i)), project(nu, cfg.tail(i)));
}

Measure partition_recombinator(const Measure& nu, const IntervalPartition& partition) {
    if (nu.sites() != SiteSet::all(partition.n()))
        throw std::invalid_argument("partition does not match the measure's sites");
    Measure out = Measure::scalar(1.0);
    for (const Interval& block : partition.blocks()) out = tensor(out, project(nu, block.sites()));
    return out;
}

std::vector<MarginalRate> marginal_rates(const SiteConfig& cfg, SiteSet a) {
    if (!a.contains(cfg.i_star()))
        throw std::invalid_argument("marginal rates need the selected site in the subsystem");
    if (!a.subset_of(cfg.all_sites())) throw std::invalid_argument("subsystem outside S");
    std::vector<MarginalRate> out;
    for (Site i : a.sites()) {
        if (i == cfg.i_star()) continue;
        const SiteSet tail = cfg.tail(i) & a;
        double rate = 0.0;
        // i* sits in every head, so equal induced splits means equal induced tails.
        for (Site j : cfg.neutral_sites().sites())
            if ((cfg.tail(j) & a) == tail) rate += cfg.rho(j);
        out.push_back({i, tail, rate});
    }
    return out;
}

}  // namespace selrec
