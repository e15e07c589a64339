#pragma once

#include <cstdint>
#include <vector>

#include "selrec/forward_solvers.hpp"
#include "selrec/measure.hpp"
#include "selrec/rng.hpp"
#include "selrec/site_config.hpp"

namespace selrec {

/// Population of N sequences; type bit i-1 is the letter at site i.
struct MoranState {
    std::vector<std::uint32_t> types;
    double clock = 0.0;
    long neutral_events = 0;
    long selective_events = 0;    // selective arrows, effective or not
    long selective_effective = 0;  // arrows whose parent was fit
    std::vector<long> recombination_events;  // per site, index site - 1

    std::size_t size() const { return types.size(); }
    /// Fresh state (clock and counters zero) holding `types`.
    static MoranState from_types(const SiteConfig& cfg, std::vector<std::uint32_t> types);
};

enum class MoranEventKind { Neutral, Selective, Recombination };

struct MoranEvent {
    double time;
    MoranEventKind kind;
    std::size_t alpha;  // replaced individual
    std::size_t beta;   // parent (head parent for recombination)
    std::size_t gamma;  // tail parent; equal to beta otherwise
    Site site;          // crossover site, 0 unless recombination
    bool effective;     // false for selective arrows from unfit parents
};

/// Advances the Moran model by t with aggregate-rate Gillespie steps: a
/// neutral event at total rate N, a selective arrow at rate sN applied only
/// if the parent is fit, a crossover at site i at rate rho_i N. Participants
/// are drawn uniformly and may coincide. Events are appended to `log` if given.
MoranState moran_simulate(const SiteConfig& cfg, const MoranState& initial, double t, RngStream& rng,
                          std::vector<MoranEvent>* log = nullptr);

/// Normalised counting measure of the types on X.
Measure empirical_measure(const SiteConfig& cfg, const MoranState& state);

/// N individuals drawn i.i.d. from omega0.
MoranState sample_population(const SiteConfig& cfg, const Measure& omega0, std::size_t n_individuals,
                             RngStream& rng);

struct LlnRow {
    std::size_t population = 0;
    double mean_distance = 0.0;
    double std_error = 0.0;
};

struct LlnTable {
    std::vector<LlnRow> rows;
    double slope = 0.0;  // least-squares slope of log(mean distance) against log N
};

/// Mean l1 distance between the empirical measure at t (started from an
/// i.i.d. sample of omega0) and the ODE solution, for each population size.
LlnTable lln_convergence(const SiteConfig& cfg, const Measure& omega0, double t,
                         const std::vector<std::size_t>& populations, std::size_t replicates, std::uint64_t seed,
                         int threads = 0, const SolverSettings& solver = {});

}  // namespace selrec
