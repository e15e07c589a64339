#pragma once

#include <optional>
#include <span>
#include <vector>

#include "selrec/errors.hpp"
#include "selrec/measure.hpp"
#include "selrec/site_config.hpp"

namespace selrec {

struct SolverSettings {
    double t_max = 1.0;
    int grid_steps = 2000;   // M, intervals of the shared time grid
    double ode_step = 0.01;  // initial RK4 step before refinement
    double quad_tol = 1e-9;  // refinement / quadrature tolerance

    /// Throws std::invalid_argument if M < 2, h <= 0, t_max < 0 or
    /// quad_tol outside (0, 1e-3].
    void validate() const;
    double grid_time(int k) const { return t_max * static_cast<double>(k) / grid_steps; }
};

/// States sampled on a time grid.
struct Trajectory {
    std::vector<double> times;
    std::vector<Measure> states;
    double max_mass_drift = 0.0;  // largest |mass - 1| before renormalisation
    long rk_steps_per_interval = 0;

    const Measure& final() const { return states.back(); }
};

/// Solutions of the SRE truncated at levels k = 0..n-1 on a shared grid.
struct TruncatedFamily {
    std::vector<double> times;
    std::vector<Site> permutation;            // (i_0 = i*, i_1, ..., i_{n-1})
    std::vector<std::vector<Measure>> levels;  // levels[k][grid index]
    double richardson_error = 0.0;             // estimated l1 error at t_max, top level

    int level_count() const { return static_cast<int>(levels.size()); }
    const Measure& solution(std::size_t grid_index) const { return levels.back()[grid_index]; }
    /// Grid index of time t; throws if t is not a grid point.
    std::size_t grid_index(double t) const;
};

/// Closed-form pure selection flow on any measure whose sites contain i*.
Measure selection_flow(const SiteConfig& cfg, const Measure& omega0, double t);

/// Right-hand side of the selection-recombination equation on X.
Measure sre_rhs(const SiteConfig& cfg, const Measure& nu);

/// Fixed-step RK4 on the grid of `settings`, halving the step until two
/// successive refinements agree to quad_tol (l1, at t_max).
Trajectory integrate_ode(const SiteConfig& cfg, const Measure& omega0, const SolverSettings& settings);

/// Recursion over the truncated equations, built on the selection flow.
/// `permutation` defaults to the canonical nondecreasing one. Throws
/// NumericalError if the half-resolution check exceeds 10 * quad_tol.
TruncatedFamily recursive_solve(const SiteConfig& cfg, const Measure& omega0, const SolverSettings& settings,
                                std::optional<std::vector<Site>> permutation = std::nullopt);

/// Closed-form solution through the per-site YPIR semigroups. Requires s > 0
/// (throws std::domain_error otherwise; use recursive_solve for s = 0).
Measure semigroup_solve(const SiteConfig& cfg, const Measure& omega0, double t, double quad_tol = 1e-11,
                        std::optional<std::vector<Site>> permutation = std::nullopt);

struct LinkageDisequilibrium {
    Measure lhs;  // (id - R^(k)) omega^(k)_t
    Measure rhs;  // e^{-rho^(k) t} (id - R^(k)) omega^(k-1)_t
    double decay_factor = 1.0;
    double relative_error = 0.0;  // |lhs - rhs|_1 / |rhs|_1 (absolute when rhs vanishes)
};

LinkageDisequilibrium linkage_disequilibrium(const SiteConfig& cfg, const TruncatedFamily& family, int k, double t);

/// Limit of omega_t as t -> infinity. Requires s > 0 and rho_i > 0 on S*.
Measure asymptotic_limit(const SiteConfig& cfg, const Measure& omega0);

/// Integrates the closed marginal equation on X_A (i* in A) with marginal
/// recombination rates; omega0 may live on S or already on A.
Trajectory marginal_sre_solve(const SiteConfig& cfg, const Measure& omega0, SiteSet a,
                              const SolverSettings& settings);

/// The marginal recombination equation on A without any selection term; for
/// A not containing i* this is what one would write down if marginalisation
/// consistency held there (it does not).
Trajectory naive_marginal_solve(const SiteConfig& cfg, const Measure& omega0, SiteSet a,
                                const SolverSettings& settings);

}  // namespace selrec
