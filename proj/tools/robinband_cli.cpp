// Command-line front end: configuration-driven spectral experiments.
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "robinband/errors.hpp"
#include "robinband/harness.hpp"

using namespace robinband;

namespace {

int run_kind(const std::string& kind, const std::string& config_path,
             const std::string& out_dir, const std::string& budget,
             int threads) {
    harness::Config cfg;
    if (!config_path.empty()) cfg = harness::Config::parse_file(config_path);
    cfg.set("experiment.kind", kind);
    if (!out_dir.empty()) cfg.set("experiment.out", out_dir);
    if (!budget.empty()) cfg.set("experiment.budget", budget);
    if (threads > 0) cfg.set("experiment.threads", std::to_string(threads));

    const auto rc = harness::RunConfig::from_config(cfg);
    const auto rep = harness::run_experiment(rc);
    std::cout << rep.report.summary();
    return rep.ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robinband: band functions and semiclassical limits of the "
                 "2D magnetic Robin Laplacian"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = "runs", budget = "quick";
    int threads = 1;
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--budget", budget, "quick|full")
        ->check(CLI::IsMember({"quick", "full"}));
    app.add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber);

    static const char* kinds[] = {"band",          "limits",      "models",
                                  "disk-converge", "square-count", "lt-check",
                                  "validate"};
    static const char* blurbs[] = {
        "build and snapshot a band-function table",
        "evaluate the semiclassical energy/count limit functionals",
        "run the model-operator oracles (torus, cylinder, Lieb-Thirring)",
        "disk eigensolves against the limit functionals over an h list",
        "Neumann square counting against the torus/boundary brackets",
        "Lieb-Thirring boundary-potential checks",
        "run the acceptance suite"};
    for (size_t i = 0; i < std::size(kinds); ++i)
        app.add_subcommand(kinds[i], blurbs[i]);

    CLI11_PARSE(app, argc, argv);
    const std::string kind = app.get_subcommands().front()->get_name();
    try {
        return run_kind(kind, config_path, out_dir, budget, threads);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
