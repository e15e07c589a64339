#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace selrec {

/// 1-based site index in S = {1, ..., n}.
using Site = int;

inline constexpr int kMaxSites = 20;

/// A subset of sites stored as a bitmask; site i occupies bit i-1.
class SiteSet {
public:
    constexpr SiteSet() = default;
    constexpr explicit SiteSet(std::uint32_t mask) : mask_(mask) {}

    static constexpr SiteSet all(int n) { return SiteSet(n >= 32 ? ~0u : ((1u << n) - 1u)); }
    static constexpr SiteSet single(Site i) { return SiteSet(1u << (i - 1)); }
    static SiteSet of(std::initializer_list<Site> sites) {
        SiteSet out;
        for (Site i : sites) out.mask_ |= 1u << (i - 1);
        return out;
    }

    constexpr std::uint32_t mask() const { return mask_; }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr int size() const { return std::popcount(mask_); }
    constexpr bool contains(Site i) const { return (mask_ >> (i - 1)) & 1u; }
    constexpr bool subset_of(SiteSet other) const { return (mask_ & ~other.mask_) == 0; }
    constexpr bool disjoint(SiteSet other) const { return (mask_ & other.mask_) == 0; }

    /// Sites in ascending order.
    std::vector<Site> sites() const {
        std::vector<Site> out;
        for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
        return out;
    }

    friend constexpr SiteSet operator|(SiteSet a, SiteSet b) { return SiteSet(a.mask_ | b.mask_); }
    friend constexpr SiteSet operator&(SiteSet a, SiteSet b) { return SiteSet(a.mask_ & b.mask_); }
    friend constexpr SiteSet operator-(SiteSet a, SiteSet b) { return SiteSet(a.mask_ & ~b.mask_); }
    friend constexpr bool operator==(SiteSet a, SiteSet b) = default;

private:
    std::uint32_t mask_ = 0;
};

/// Sequence length, selected site, selection intensity and per-site
/// recombination rates. Heads, tails, the site order and the resetting
/// rates are derived from (n, i_star, rho) only.
class SiteConfig {
public:
    /// `rho` is indexed by site - 1 and must have length n; rho at the
    /// selected site must be zero.
    SiteConfig(int n, Site i_star, double s, std::vector<double> rho);

    int n() const { return n_; }
    Site i_star() const { return i_star_; }
    double s() const { return s_; }
    double rho(Site i) const { return rho_[static_cast<std::size_t>(i - 1)]; }
    const std::vector<double>& rho() const { return rho_; }

    SiteSet all_sites() const { return SiteSet::all(n_); }
    /// S* = S without the selected site.
    SiteSet neutral_sites() const { return all_sites() - SiteSet::single(i_star_); }

    /// i precedes j: i* <= i <= j or i* >= i >= j.
    bool precedes(Site i, Site j) const;
    /// Maximal j strictly preceding i. Throws for i = i*.
    Site predecessor(Site i) const;

    SiteSet tail(Site i) const { return tails_[static_cast<std::size_t>(i - 1)]; }
    SiteSet head(Site i) const { return all_sites() - tail(i); }

    /// Sites sorted by distance from i*, ties toward the smaller index.
    const std::vector<Site>& canonical_permutation() const { return permutation_; }
    /// r_i = sum of rho_l over l preceding i.
    const std::vector<double>& resetting_rates() const { return reset_; }
    double resetting_rate(Site i) const { return reset_[static_cast<std::size_t>(i - 1)]; }

    /// Same sites, selected site and rates with a different selection intensity.
    SiteConfig with_s(double s) const { return SiteConfig(n_, i_star_, s, rho_); }
    SiteConfig with_rho(std::vector<double> rho) const { return SiteConfig(n_, i_star_, s_, std::move(rho)); }

private:
    int n_;
    Site i_star_;
    double s_;
    std::vector<double> rho_;
    std::vector<SiteSet> tails_;
    std::vector<Site> permutation_;
    std::vector<double> reset_;
};

/// Checks that `order` is a permutation of S starting at i* that is
/// nondecreasing with respect to the site order.
bool is_nondecreasing_permutation(const SiteConfig& cfg, const std::vector<Site>& order);

/// Every nondecreasing permutation of S (small n only; used to check
/// ordering independence).
std::vector<std::vector<Site>> all_nondecreasing_permutations(const SiteConfig& cfg);

}  // namespace selrec
