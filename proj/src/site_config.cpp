#include "selrec/site_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace selrec {

SiteConfig::SiteConfig(int n, Site i_star, double s, std::vector<double> rho)
    : n_(n), i_star_(i_star), s_(s), rho_(std::move(rho)) {
    if (n < 1 || n > kMaxSites)
        throw std::invalid_argument("n must lie in [1, " + std::to_string(kMaxSites) + "]");
    if (i_star < 1 || i_star > n) throw std::invalid_argument("selected site out of range");
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("selection intensity must be >= 0");
    if (rho_.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("rho must have length n");
    for (double r : rho_)
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("recombination rates must be >= 0");
    if (rho_[static_cast<std::size_t>(i_star - 1)] != 0.0)
        throw std::invalid_argument("rho at the selected site must be 0");

    tails_.resize(static_cast<std::size_t>(n));
    for (Site i = 1; i <= n; ++i) {
        SiteSet d;
        for (Site j = 1; j <= n; ++j)
            if (precedes(i, j)) d = d | SiteSet::single(j);
        tails_[static_cast<std::size_t>(i - 1)] = d;
    }

    permutation_.resize(static_cast<std::size_t>(n));
    for (Site i = 1; i <= n; ++i) permutation_[static_cast<std::size_t>(i - 1)] = i;
    std::stable_sort(permutation_.begin(), permutation_.end(), [&](Site a, Site b) {
        int da = std::abs(a - i_star_), db = std::abs(b - i_star_);
        return da != db ? da < db : a < b;
    });

    reset_.assign(static_cast<std::size_t>(n), 0.0);
    for (Site i = 1; i <= n; ++i)
        for (Site l = 1; l <= n; ++l)
            if (precedes(l, i)) reset_[static_cast<std::size_t>(i - 1)] += rho_[static_cast<std::size_t>(l - 1)];
}

bool SiteConfig::precedes(Site i, Site j) const {
    return (i_star_ <= i && i <= j) || (i_star_ >= i && i >= j);
}

Site SiteConfig::predecessor(Site i) const {
    if (i == i_star_) throw std::invalid_argument("the selected site has no predecessor");
    if (i < 1 || i > n_) throw std::invalid_argument("site out of range");
    return i > i_star_ ? i - 1 : i + 1;
}

bool is_nondecreasing_permutation(const SiteConfig& cfg, const std::vector<Site>& order) {
    if (order.size() != static_cast<std::size_t>(cfg.n()) || order.front() != cfg.i_star()) return false;
    std::vector<bool> seen(static_cast<std::size_t>(cfg.n()) + 1, false);
    for (std::size_t a = 0; a < order.size(); ++a) {
        Site i = order[a];
        if (i < 1 || i > cfg.n() || seen[static_cast<std::size_t>(i)]) return false;
        seen[static_cast<std::size_t>(i)] = true;
        // no later element may strictly precede an earlier one
        for (std::size_t b = a + 1; b < order.size(); ++b)
            if (order[b] != i && cfg.precedes(order[b], i)) return false;
    }
    return true;
}

std::vector<std::vector<Site>> all_nondecreasing_permutations(const SiteConfig& cfg) {
    if (cfg.n() > 8) throw std::invalid_argument("enumeration limited to n <= 8");
    std::vector<Site> order(static_cast<std::size_t>(cfg.n()));
    for (Site i = 1; i <= cfg.n(); ++i) order[static_cast<std::size_t>(i - 1)] = i;
    std::vector<std::vector<Site>> out;
    do {
        if (is_nondecreasing_permutation(cfg, order)) out.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

}  // namespace selrec
