#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "selrec/forward_solvers.hpp"
#include "selrec/measure.hpp"
#include "selrec/rng.hpp"
#include "selrec/site_config.hpp"
#include "selrec/ypir.hpp"

namespace selrec {

/// One nonnegative integer per site, m[i - 1] for site i; the state of the
/// YPIR family and the coordinates of a weighted partition.
struct IntVector {
    std::vector<long> m;

    long at(Site i) const { return m[static_cast<std::size_t>(i - 1)]; }
    long& at(Site i) { return m[static_cast<std::size_t>(i - 1)]; }
    /// Unit vector at `i`: the start of the YPIR family.
    static IntVector unit(int n, Site i);
    friend bool operator==(const IntVector&, const IntVector&) = default;
};

/// Interval partition of S with a positive weight per block (weights[k]
/// belongs to partition.blocks()[k]).
struct WeightedPartition {
    IntervalPartition partition;
    std::vector<long> weights;

    static WeightedPartition trivial(int n) { return {IntervalPartition::trivial(n), {1}}; }
    friend bool operator==(const WeightedPartition&, const WeightedPartition&) = default;
};

/// Per-site value in [0, inf) or Delta (not yet initiated, std::nullopt).
struct InitiationState {
    std::vector<std::optional<double>> theta;

    /// theta = 0 at i*, Delta elsewhere.
    static InitiationState initial(const SiteConfig& cfg);
    const std::optional<double>& at(Site i) const { return theta[static_cast<std::size_t>(i - 1)]; }
    friend bool operator==(const InitiationState&, const InitiationState&) = default;
};

/// Minimal site of a block with respect to the site order.
Site block_minimum(const SiteConfig& cfg, const Interval& block);

/// Weight of every block written at its minimal site, 0 elsewhere.
IntVector encode(const WeightedPartition& wp, const SiteConfig& cfg);
/// Inverse of encode: a site joins the block of its predecessor iff its
/// entry is 0. Throws std::invalid_argument if m[i*] = 0 or an entry is negative.
WeightedPartition decode(const IntVector& m, const SiteConfig& cfg);

/// Gillespie simulation of one YPIR from k0 over time t, event by event.
long ypir_simulate(const YpirParams& par, long k0, double t, RngStream& rng);
/// Exact sampler for the same law: only initiation and reset times are
/// simulated; each reset-free stretch of Yule growth is drawn in one go from
/// its negative binomial law.
long ypir_sample(const YpirParams& par, long k0, double t, RngStream& rng);
/// Independent YPIRs, one per site with the site's rates, advanced by t.
IntVector ypir_vector_simulate(const SiteConfig& cfg, const IntVector& m0, double t, RngStream& rng);

/// WPP realised as the YPIR family in coordinates.
WeightedPartition wpp_simulate(const SiteConfig& cfg, const WeightedPartition& start, double t, RngStream& rng);

/// Independent initiation processes advanced by t.
InitiationState initiation_simulate(const SiteConfig& cfg, const InitiationState& start, double t, RngStream& rng);

/// Time theta with 1 - f(phi_theta(nu)) = (1 - f0)^k for any nu with
/// f(nu) = f0. Requires s > 0, f0 in (0, 1) and k >= 1.
double theta_of_k(const SiteConfig& cfg, double f0, long k);
/// Componentwise theta_of_k with f0 = f(nu); zero entries map to Delta.
InitiationState theta_of_vector(const SiteConfig& cfg, const IntVector& m, const Measure& nu);

/// h(k, nu) = (1-f)^k d(nu) + (1 - (1-f)^k) b(nu), for k >= 1.
Measure little_h(const SiteConfig& cfg, long k, const Measure& nu);

/// Duality functions of the WPP, the YPIR family and the initiation
/// processes. The ordered products use `permutation` (default: canonical).
Measure duality_H(const SiteConfig& cfg, const WeightedPartition& wp, const Measure& nu);
Measure duality_calH(const SiteConfig& cfg, const IntVector& m, const Measure& nu,
                     const std::optional<std::vector<Site>>& permutation = std::nullopt);
Measure duality_calG(const SiteConfig& cfg, const InitiationState& theta, const Measure& nu,
                     const std::optional<std::vector<Site>>& permutation = std::nullopt);

struct McOptions {
    std::size_t replicates = 100'000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: SELREC_THREADS or 1
};

struct McEstimate {
    Measure mean;
    Measure std_error;  // per cell
    std::size_t replicates = 0;
};

/// Replicate r is sampled from RngStream(seed, r); replicates are grouped in
/// fixed blocks whose partial moments are merged in block order, so the
/// result does not depend on the thread count.
McEstimate monte_carlo(SiteSet sites, const McOptions& opts, const std::function<Measure(RngStream&)>& sample);

enum class DualFlavor { WPP, YPIR, INIT };
const char* flavor_name(DualFlavor flavor);
DualFlavor parse_flavor(const std::string& name);

/// Monte-Carlo estimate of omega_t from the dual process started at the
/// trivial partition (WPP), the unit vector at i* (YPIR) or the initial
/// initiation state (INIT).
McEstimate mc_solution_estimate(const SiteConfig& cfg, const Measure& omega0, double t, const McOptions& opts,
                                DualFlavor flavor);

/// Elementwise comparison of an exact (or second Monte-Carlo) value with a
/// Monte-Carlo estimate.
struct DualityReport {
    std::string name;
    double t = 0.0;
    Measure lhs;
    Measure rhs;
    Measure std_error;
    std::vector<double> z;
    double max_abs_z = 0.0;
    std::size_t replicates = 0;

    bool passed(double threshold) const { return max_abs_z <= threshold; }
};

/// z-scores of lhs - rhs against `se`; a cell with zero standard error
/// scores 0 if |lhs - rhs| <= 1e-12 and infinity otherwise.
DualityReport make_report(std::string name, double t, Measure lhs, Measure rhs, Measure se, std::size_t replicates);

using DualStart = std::variant<IntVector, InitiationState>;

/// Duality of the SRE with the YPIR family (IntVector start, function calH)
/// or with the initiation processes (InitiationState start, function calG):
/// lhs = duality function at psi_t(nu) from the ODE, rhs = Monte-Carlo mean.
DualityReport duality_check(const SiteConfig& cfg, const Measure& nu, const DualStart& start, double t,
                            const McOptions& opts, const SolverSettings& solver = {});

/// E[calH(M_t, nu) | M_0 = m] against E[calG(Theta_t, nu) | Theta_0 = theta(m)],
/// both by Monte Carlo; the standard errors are combined. theta(m) is taken
/// at the fit fraction of `theta_reference` (default nu). For m with entries
/// in {0, 1} the start does not depend on the reference; for larger entries
/// the two sides agree when the reference is psi_t(nu), not nu itself.
DualityReport compare_ypir_initiation(const SiteConfig& cfg, const Measure& nu, const IntVector& m, double t,
                                      const McOptions& opts,
                                      const std::optional<Measure>& theta_reference = std::nullopt);

/// h(k, phi_t(mu)) against E[h(K_t, mu) | K_0 = k] for the Yule process K.
DualityReport pure_selection_check(const SiteConfig& cfg, const Measure& mu, long k, double t, const McOptions& opts);

/// l1 distance between h(k, phi_t(mu)) and the mixture of d and b weighted by
/// the Yule pgf g_t(1 - f(mu))^k.
double pure_selection_analytic_residual(const SiteConfig& cfg, const Measure& mu, long k, double t);

}  // namespace selrec
