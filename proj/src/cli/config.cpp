#include "selrec/cli/config.hpp"

#include <cmath>
#include <fstream>

#include "selrec/io.hpp"

namespace selrec::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) fail(path + key, "missing");
    return j.at(key);
}

template <class T>
T get(const json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        fail(field, "has the wrong type");
    }
}

template <class T>
T get_or(const json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    return get<T>(j.at(key), path + key);
}

double positive_time(const json& j, const std::string& key, const std::string& path, double fallback) {
    const double v = get_or<double>(j, key, path, fallback);
    if (!(v >= 0.0) || !std::isfinite(v)) fail(path + key, "must be a finite time >= 0");
    return v;
}

Measure parse_initial(const json& j, int n) {
    if (!j.is_object()) fail("initial", "must be an object with 'vector' or 'product'");
    Measure out;
    if (j.contains("vector")) {
        auto values = get<std::vector<double>>(j.at("vector"), "initial.vector");
        if (values.size() != (std::size_t{1} << n)) fail("initial.vector", "needs 2^n entries");
        out = Measure(SiteSet::all(n), std::move(values));
    } else if (j.contains("product")) {
        auto p0 = get<std::vector<double>>(j.at("product"), "initial.product");
        if (p0.size() != static_cast<std::size_t>(n)) fail("initial.product", "needs one entry per site");
        for (double p : p0)
            if (!(p >= 0.0 && p <= 1.0)) fail("initial.product", "entries must lie in [0, 1]");
        out = Measure::product(SiteSet::all(n), p0);
    } else {
        fail("initial", "needs either 'vector' or 'product'");
    }
    for (double v : out.values())
        if (!(v >= -kNegativityTolerance)) fail("initial", "has negative entries");
    if (std::abs(out.mass() - 1.0) > kMassTolerance) fail("initial", "does not have mass 1");
    return out;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const int n = get<int>(require(j, "n", ""), "n");
    if (n < 1 || n > kMaxSites) fail("n", "must lie in [1, " + std::to_string(kMaxSites) + "]");
    const int i_star = get<int>(require(j, "selected_site", ""), "selected_site");
    if (i_star < 1 || i_star > n) fail("selected_site", "must lie in [1, n]");
    const double s = get<double>(require(j, "s", ""), "s");
    if (!(s >= 0.0) || !std::isfinite(s)) fail("s", "must be finite and >= 0");
    auto rho = get<std::vector<double>>(require(j, "rho", ""), "rho");
    if (rho.size() != static_cast<std::size_t>(n)) fail("rho", "needs one rate per site");
    for (double r : rho)
        if (!(r >= 0.0) || !std::isfinite(r)) fail("rho", "rates must be finite and >= 0");
    if (rho[static_cast<std::size_t>(i_star - 1)] != 0.0) fail("rho", "the selected site must have rate 0");

    ExperimentConfig cfg(SiteConfig(n, i_star, s, rho), parse_initial(require(j, "initial", ""), n));
    cfg.source = j;
    cfg.hash = io::fnv1a_hex(j.dump());

    if (j.contains("solver")) {
        const json& sj = j.at("solver");
        cfg.solver.t_max = positive_time(sj, "t_max", "solver.", cfg.solver.t_max);
        cfg.solver.grid_steps = get_or<int>(sj, "grid_steps", "solver.", cfg.solver.grid_steps);
        cfg.solver.ode_step = get_or<double>(sj, "ode_step", "solver.", cfg.solver.ode_step);
        cfg.solver.quad_tol = get_or<double>(sj, "quad_tol", "solver.", cfg.solver.quad_tol);
    }
    try {
        cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
        fail("solver", e.what());
    }

    if (j.contains("output_times")) {
        cfg.output_times = get<std::vector<double>>(j.at("output_times"), "output_times");
        if (cfg.output_times.empty()) fail("output_times", "must not be empty");
    } else {
        const int parts = cfg.solver.grid_steps % 10 == 0 ? 10 : 1;
        for (int k = 0; k <= parts; ++k) cfg.output_times.push_back(cfg.solver.t_max * k / parts);
    }
    for (std::size_t k = 0; k < cfg.output_times.size(); ++k) {
        const double t = cfg.output_times[k];
        const std::string field = "output_times[" + std::to_string(k) + "]";
        if (!(t >= 0.0) || t > cfg.solver.t_max) fail(field, "must lie in [0, solver.t_max]");
        if (cfg.solver.t_max > 0.0) {
            const double pos = t / cfg.solver.t_max * cfg.solver.grid_steps;
            if (std::abs(pos - std::round(pos)) > 1e-9) fail(field, "is not a point of the solver grid");
        }
        if (k > 0 && !(t > cfg.output_times[k - 1])) fail("output_times", "must be strictly increasing");
    }

    cfg.seed = get_or<std::uint64_t>(j, "seed", "", cfg.seed);
    cfg.replicates = get_or<std::size_t>(j, "replicates", "", cfg.replicates);
    if (cfg.replicates < 2) fail("replicates", "must be >= 2");
    cfg.z_threshold = get_or<double>(j, "z_threshold", "", cfg.z_threshold);
    if (!(cfg.z_threshold > 0.0)) fail("z_threshold", "must be > 0");

    if (j.contains("dual")) {
        const json& dj = j.at("dual");
        cfg.dual.t = positive_time(dj, "t", "dual.", cfg.dual.t);
        if (dj.contains("flavors")) {
            cfg.dual.flavors.clear();
            for (const auto& name : get<std::vector<std::string>>(dj.at("flavors"), "dual.flavors")) {
                try {
                    cfg.dual.flavors.push_back(parse_flavor(name));
                } catch (const std::invalid_argument& e) {
                    fail("dual.flavors", e.what());
                }
            }
        }
    }
    if (j.contains("moran")) {
        const json& mj = j.at("moran");
        cfg.moran.t = positive_time(mj, "t", "moran.", cfg.moran.t);
        cfg.moran.populations = get_or<std::vector<std::size_t>>(mj, "populations", "moran.", cfg.moran.populations);
        for (std::size_t p : cfg.moran.populations)
            if (p < 1) fail("moran.populations", "sizes must be positive");
        if (cfg.moran.populations.empty()) fail("moran.populations", "must not be empty");
        cfg.moran.replicates = get_or<std::size_t>(mj, "replicates", "moran.", cfg.moran.replicates);
        if (cfg.moran.replicates < 1) fail("moran.replicates", "must be >= 1");
        cfg.moran.event_log = get_or<bool>(mj, "event_log", "moran.", cfg.moran.event_log);
    }
    if (j.contains("asymptotics")) {
        const json& aj = j.at("asymptotics");
        cfg.asymptotics.t_max = positive_time(aj, "t_max", "asymptotics.", cfg.asymptotics.t_max);
        cfg.asymptotics.points = get_or<int>(aj, "points", "asymptotics.", cfg.asymptotics.points);
        if (cfg.asymptotics.points < 2) fail("asymptotics.points", "must be >= 2");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

}  // namespace selrec::cli
