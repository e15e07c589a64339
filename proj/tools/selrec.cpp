#include <CLI11.hpp>

#include "selrec/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Selection-recombination equation solvers and dual-process verification"};
    app.require_subcommand(1);

    std::string config_path;
    selrec::cli::RunOptions opts;
    std::uint64_t seed = 0;
    std::size_t replicates = 0;
    std::string method;

    const char* names[][2] = {{"solve", "Solve the equation by ODE, recursion and closed form"},
                              {"dual", "Monte-Carlo estimates of the solution from the dual processes"},
                              {"moran", "Moran model law-of-large-numbers experiment"},
                              {"verify", "Run the verification suite and write a pass/fail report"},
                              {"asymptotics", "Long-time limit and convergence curve"},
                              {"ld", "Linkage disequilibrium decay along the recursion"}};
    for (auto& [name, help] : names) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Override the configured seed");
        sub->add_option("--replicates", replicates, "Override the configured replicate count");
        sub->add_option("--threads", opts.threads, "Worker threads (default: $SELREC_THREADS or 1)");
        if (std::string(name) == "solve")
            sub->add_option("--method", method, "ode, recursion, semigroup or all")
                ->check(CLI::IsMember({"ode", "recursion", "semigroup", "all"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : selrec::cli::kValidation;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--seed")) opts.seed = seed;
    if (chosen->count("--replicates")) opts.replicates = replicates;
    if (!method.empty()) opts.method = method;
    return selrec::cli::run(chosen->get_name(), config_path, opts);
}
