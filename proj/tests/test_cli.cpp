#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "selrec/cli/commands.hpp"
#include "selrec/cli/config.hpp"
#include "selrec/io.hpp"

using namespace selrec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_config() {
    return json::parse(R"({
        "n": 3, "selected_site": 2, "s": 1.0, "rho": [0.6, 0.0, 0.9],
        "initial": {"vector": [0.20, 0.05, 0.10, 0.15, 0.05, 0.15, 0.10, 0.20]},
        "solver": {"t_max": 1.0, "grid_steps": 2000, "ode_step": 0.01, "quad_tol": 1e-9},
        "seed": 42, "replicates": 2000
    })");
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("selrec_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const json& j) {
    const fs::path path = dir / "config.json";
    std::ofstream(path) << j.dump(2);
    return path.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string parse_error(const json& j) {
    try {
        cli::parse_config(j);
    } catch (const cli::ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("bundled example parses") {
    const cli::ExperimentConfig cfg = cli::load_config(std::string(SELREC_SOURCE_DIR) + "/configs/n3_example.json");
    CHECK(cfg.site.n() == 3);
    CHECK(cfg.site.i_star() == 2);
    CHECK(cfg.hash.size() == 16);
    CHECK(cfg.output_times.front() == 0.0);
}

TEST_CASE("config validation names the field") {
    json j = base_config();
    j.erase("rho");
    CHECK(parse_error(j).find("rho") != std::string::npos);

    j = base_config();
    j["rho"][1] = 0.5;
    CHECK(parse_error(j).find("rho") != std::string::npos);

    j = base_config();
    j["rho"] = {0.6, 0.0};
    CHECK(parse_error(j).find("rho") != std::string::npos);

    j = base_config();
    j["selected_site"] = 4;
    CHECK(parse_error(j).find("selected_site") != std::string::npos);

    j = base_config();
    j["initial"]["vector"][0] = 0.3;
    CHECK(parse_error(j).find("initial") != std::string::npos);

    j = base_config();
    j["s"] = -1.0;
    CHECK(parse_error(j).find("s") != std::string::npos);

    j = base_config();
    j["output_times"] = {0.0, 0.33333};
    CHECK(parse_error(j).find("output_times") != std::string::npos);

    j = base_config();
    j["initial"] = {{"product", {0.5, 0.2, 0.9}}};
    CHECK(parse_error(j).empty());
}

TEST_CASE("validation failures exit with code 1") {
    const fs::path dir = scratch("invalid");
    json j = base_config();
    j.erase("n");
    CHECK(cli::run("solve", write_config(dir, j), {dir.string()}) == cli::kValidation);
    CHECK(cli::run("solve", (dir / "missing.json").string(), {dir.string()}) == cli::kValidation);
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(cli::run("solve", (dir / "broken.json").string(), {dir.string()}) == cli::kValidation);
}

TEST_CASE("solve at t = 0 returns the initial condition") {
    const fs::path dir = scratch("t0");
    json j = base_config();
    j["output_times"] = {0.0};
    cli::RunOptions opts{dir.string()};
    opts.method = "ode";
    REQUIRE(cli::run("solve", write_config(dir, j), opts) == cli::kOk);
    std::ifstream in(dir / "trajectory_ode.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# selrec ", 0) == 0);
    std::getline(in, line);
    CHECK(line == "t,x000,x100,x010,x110,x001,x101,x011,x111");
    std::getline(in, line);
    CHECK(line == "0,0.2,0.05,0.1,0.15,0.05,0.15,0.1,0.2");
}

TEST_CASE("all methods agree") {
    const fs::path dir = scratch("all");
    cli::RunOptions opts{dir.string()};
    opts.method = "all";
    REQUIRE(cli::run("solve", write_config(dir, base_config()), opts) == cli::kOk);
    const json report = json::parse(slurp(dir / "solve.json"));
    CHECK(report["command"] == "solve");
    CHECK(report["version"] == io::library_version());
    REQUIRE(report["deviations"].size() == 3);
    for (const auto& d : report["deviations"]) CHECK(d["max_l1"].get<double>() <= 1e-5);
    for (const char* m : {"ode", "recursion", "semigroup"})
        CHECK(fs::exists(dir / (std::string("trajectory_") + m + ".csv")));
    opts.method = "bogus";
    CHECK(cli::run("solve", (dir / "config.json").string(), opts) == cli::kValidation);
}

TEST_CASE("linkage disequilibrium of a product start vanishes") {
    const fs::path dir = scratch("ld");
    json j = base_config();
    j["initial"] = {{"product", {0.5, 0.2, 0.9}}};
    REQUIRE(cli::run("ld", write_config(dir, j), {dir.string()}) == cli::kOk);
    std::ifstream in(dir / "ld.csv");
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 7);
        CHECK(std::abs(std::stod(cells[3])) <= 1e-10);
        ++rows;
    }
    CHECK(rows > 0);
}

TEST_CASE("asymptotics needs recombination at every neutral site") {
    const fs::path dir = scratch("asym");
    json j = base_config();
    j["rho"] = {0.0, 0.0, 0.9};
    CHECK(cli::run("asymptotics", write_config(dir, j), {dir.string()}) == cli::kValidation);
    j["rho"] = {0.6, 0.0, 0.9};
    REQUIRE(cli::run("asymptotics", write_config(dir, j), {dir.string()}) == cli::kOk);
    const json report = json::parse(slurp(dir / "asymptotics.json"));
    CHECK(report["final_l1"].get<double>() <= 1e-3);
}

TEST_CASE("outputs carry the config hash and version") {
    const fs::path dir = scratch("meta");
    json j = base_config();
    j["moran"] = {{"t", 0.5}, {"populations", {20, 200}}, {"replicates", 4}, {"event_log", true}};
    const std::string path = write_config(dir, j);
    const cli::ExperimentConfig cfg = cli::load_config(path);
    REQUIRE(cli::run("dual", path, {dir.string()}) == cli::kOk);
    REQUIRE(cli::run("moran", path, {dir.string()}) == cli::kOk);
    for (const char* name : {"dual.json", "moran.json"}) {
        const json report = json::parse(slurp(dir / name));
        CHECK(report["config_hash"] == cfg.hash);
        CHECK(report["version"] == io::library_version());
    }
    for (const char* name : {"dual_estimates.csv", "moran_lln.csv", "moran_events.csv"}) {
        REQUIRE(fs::exists(dir / name));
        const std::string head = slurp(dir / name).substr(0, 64);
        CHECK(head.find(cfg.hash) != std::string::npos);
        CHECK(head.find(io::library_version()) != std::string::npos);
    }
    CHECK(fs::exists(dir / "timing_dual.json"));
}

TEST_CASE("overrides change the hash and the results") {
    const fs::path dir = scratch("override");
    const std::string path = write_config(dir, base_config());
    const cli::ExperimentConfig cfg = cli::load_config(path);
    cli::RunOptions opts{dir.string()};
    opts.seed = 7;
    opts.replicates = 1000;
    const cli::ExperimentConfig over = cli::apply_overrides(cfg, opts);
    CHECK(over.seed == 7);
    CHECK(over.replicates == 1000);
    CHECK(over.hash != cfg.hash);
}
