#pragma once

#include <vector>

#include "selrec/site_config.hpp"

namespace selrec {

/// Rates of a Yule process with initiation and resetting: branching k -> k+1
/// at rate s*k, initiation 0 -> 1 at rate rho, reset k -> 1 at rate r.
struct YpirParams {
    double s = 0.0;
    double rho = 0.0;
    double r = 0.0;

    /// Parameters of the per-site process M_i; the selected site is a pure
    /// Yule process (rho = r = 0).
    static YpirParams for_site(const SiteConfig& cfg, Site i);
};

/// Distribution over {0, 1, ..., p.size()-1}; `tail_mass` is the probability
/// beyond the truncation point.
struct IntDistribution {
    std::vector<double> p;
    double tail_mass = 0.0;

    std::size_t truncation() const { return p.size(); }
    double at(std::size_t n) const { return n < p.size() ? p[n] : 0.0; }
    double mass() const;
    /// E[x^N] over the stored support.
    double pgf(double x) const;
};

inline constexpr double kDistributionTailTol = 1e-12;
inline constexpr std::size_t kMaxSupport = std::size_t{1} << 17;

/// Probability generating function of the Yule process started from one
/// line: e^{-st} x / (1 - (1 - e^{-st}) x).
double yule_pgf(double s, double t, double x);

/// Split of E[x^N_t] for a YPIR: `atom0` = P(N_t = 0), `positive` =
/// P(N_t >= 1), `weighted` = E[x^N_t ; N_t >= 1].
struct PgfSplit {
    double atom0 = 0.0;
    double positive = 0.0;
    double weighted = 0.0;
};

/// Transition pgf from state m0 over time t, evaluated by 1-D adaptive
/// quadrature over the time since the last initiation or reset.
PgfSplit ypir_pgf(const YpirParams& par, int m0, double t, double x, double quad_tol = 1e-12);

/// Transition law p_t(m0, .) truncated once the remaining tail is below
/// `tail_tol` (or at kMaxSupport).
IntDistribution ypir_semigroup(const YpirParams& par, int m0, double t, double quad_tol = 1e-10,
                               double tail_tol = kDistributionTailTol);

/// Negative binomial law of the number of trials up to and including the
/// m-th success with success probability sigma.
IntDistribution negative_binomial(int m, double sigma, double tail_tol = kDistributionTailTol);

/// Stationary (Yule) law alpha * B(n, alpha + 1), alpha = r / s. For m0 = 0
/// and rho = 0 the process never leaves 0 and the result is a point mass at 0.
IntDistribution ypir_stationary(const YpirParams& par, int m0 = 1, double tail_tol = kDistributionTailTol);

/// Generating function of the Yule law with parameter alpha, summed until
/// the bound on the remaining terms drops below `tol`.
double yule_law_pgf(double alpha, double x, double tol = 1e-14);

}  // namespace selrec
