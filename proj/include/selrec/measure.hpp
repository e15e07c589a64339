#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "selrec/site_config.hpp"

namespace selrec {

/// Finite signed measure on X_A = {0,1}^A, stored densely. Entry `idx`
/// holds the mass of the configuration whose j-th site of A (ascending)
/// carries letter bit j of `idx`. An empty site set holds one scalar.
class Measure {
public:
    Measure() : values_(1, 0.0) {}
    explicit Measure(SiteSet sites);
    Measure(SiteSet sites, std::vector<double> values);

    static Measure scalar(double value);
    /// Point mass at the configuration whose letter at site i is bit i-1 of `pattern`.
    static Measure point(SiteSet sites, std::uint32_t pattern);
    static Measure uniform(SiteSet sites);
    /// Product of one-site marginals; `p0[k]` is the probability of letter 0
    /// at the k-th site of `sites` (ascending).
    static Measure product(SiteSet sites, std::span<const double> p0);

    SiteSet sites() const { return sites_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double operator[](std::size_t idx) const { return values_[idx]; }
    double& operator[](std::size_t idx) { return values_[idx]; }

    /// Value at a full-sequence pattern (bit i-1 = letter at site i);
    /// bits outside the site set are ignored.
    double at_pattern(std::uint32_t pattern) const;
    /// Full-sequence pattern of entry `idx`.
    std::uint32_t pattern_of(std::size_t idx) const;

    double mass() const;

    Measure& operator+=(const Measure& other);
    Measure& operator-=(const Measure& other);
    Measure& operator*=(double factor);
    /// this += factor * other
    Measure& add_scaled(const Measure& other, double factor);

    friend Measure operator+(Measure a, const Measure& b) { return a += b; }
    friend Measure operator-(Measure a, const Measure& b) { return a -= b; }
    friend Measure operator*(Measure a, double c) { return a *= c; }
    friend Measure operator*(double c, Measure a) { return a *= c; }
    friend bool operator==(const Measure&, const Measure&) = default;

private:
    SiteSet sites_;
    std::vector<double> values_;
};

inline constexpr double kMassTolerance = 1e-9;
inline constexpr double kNegativityTolerance = 1e-12;

/// True if all entries are >= -neg_tol and the mass is 1 within mass_tol.
bool is_probability(const Measure& nu, double mass_tol = kMassTolerance, double neg_tol = kNegativityTolerance);
/// Throws std::invalid_argument unless `nu` is a probability measure.
void require_probability(const Measure& nu, const char* what);

/// Marginal of `nu` on A ∩ sites(nu). Projecting onto a disjoint set yields the total mass.
Measure project(const Measure& nu, SiteSet a);
/// Product measure of factors on disjoint site sets.
Measure tensor(const Measure& nu_i, const Measure& nu_j);
/// (project(nu_i, I \ J)) ⊗ nu_j; the site sets may overlap.
Measure boxtimes(const Measure& nu_i, const Measure& nu_j);
/// Sum of absolute entry differences; the site sets must agree.
double l1_distance(const Measure& mu, const Measure& nu);

// Selection. All of these accept any measure whose site set contains i*.

/// Mass of configurations carrying the fit letter 0 at the selected site.
double fit_fraction(const Measure& nu, Site i_star);
/// Zeroes every configuration that is unfit at the selected site.
Measure select_F(const Measure& nu, Site i_star);
/// Fit subpopulation F nu / f(nu); nu itself when f(nu) = 0.
Measure cond_b(const Measure& nu, Site i_star);
/// Unfit subpopulation (1 - F) nu / (1 - f(nu)); nu itself when f(nu) = 1.
Measure cond_d(const Measure& nu, Site i_star);

/// Contiguous block [first, last] of sites.
struct Interval {
    Site first;
    Site last;
    SiteSet sites() const;
    friend bool operator==(const Interval&, const Interval&) = default;
    friend auto operator<=>(const Interval&, const Interval&) = default;
};

/// Partition of S = {1..n} into contiguous blocks, kept sorted by first site.
class IntervalPartition {
public:
    /// Throws std::invalid_argument unless the blocks are disjoint, nonempty
    /// intervals covering exactly {1..n}.
    IntervalPartition(int n, std::vector<Interval> blocks);
    /// Partition into arbitrary site sets given as masks (must be intervals).
    static IntervalPartition from_sets(int n, const std::vector<SiteSet>& sets);
    static IntervalPartition trivial(int n) { return IntervalPartition(n, {{1, n}}); }

    int n() const { return n_; }
    const std::vector<Interval>& blocks() const { return blocks_; }
    friend bool operator==(const IntervalPartition&, const IntervalPartition&) = default;

private:
    int n_;
    std::vector<Interval> blocks_;
};

/// R_i nu = nu^{C_i} ⊗ nu^{D_i}, for i in S*.
Measure recombinator(const SiteConfig& cfg, const Measure& nu, Site i);
/// Product of the block marginals of nu.
Measure partition_recombinator(const Measure& nu, const IntervalPartition& partition);

/// Marginal recombination rate for one site of a subsystem A ∋ i*.
struct MarginalRate {
    Site site;
    SiteSet tail;  // D_site ∩ A
    double rate;
};

/// Rates of the marginal recombination dynamics on A: for i in A \ {i*},
/// the sum of rho_j over all j in S* inducing the same split of A as i.
/// Throws if i* is not in A.
std::vector<MarginalRate> marginal_rates(const SiteConfig& cfg, SiteSet a);

}  // namespace selrec
