#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "selrec/dual_processes.hpp"
#include "selrec/forward_solvers.hpp"
#include "selrec/measure.hpp"
#include "selrec/site_config.hpp"

namespace selrec::cli {

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct DualSection {
    double t = 1.0;
    std::vector<DualFlavor> flavors{DualFlavor::WPP, DualFlavor::YPIR, DualFlavor::INIT};
};

struct MoranSection {
    double t = 1.0;
    std::vector<std::size_t> populations{100, 1000, 10000};
    std::size_t replicates = 20;
    bool event_log = false;  // write the event log of one run of the largest population
};

struct AsymptoticsSection {
    double t_max = 0.0;  // 0: chosen from the slowest rate
    int points = 40;
};

struct ExperimentConfig {
    ExperimentConfig(SiteConfig site_config, Measure initial_measure)
        : site(std::move(site_config)), initial(std::move(initial_measure)) {}

    nlohmann::json source;  // parsed input, for hashing
    std::string hash;
    SiteConfig site;
    Measure initial;
    SolverSettings solver;
    std::vector<double> output_times;
    std::uint64_t seed = 42;
    std::size_t replicates = 100'000;
    double z_threshold = 4.0;
    DualSection dual;
    MoranSection moran;
    AsymptoticsSection asymptotics;
};

/// Validates and converts a JSON configuration. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace selrec::cli
