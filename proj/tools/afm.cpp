// afm: simulate factor-model panels, estimate normalized principal components,
// and run the Monte Carlo rate suites.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "afm/commands.hpp"
#include "afm/diagnostics.hpp"

namespace {

void add_common(CLI::App* cmd, afm::CommandOptions& options) {
    cmd->add_option("--config", options.config, "key = value run configuration file");
    cmd->add_option("--out", options.out, "output path");
    cmd->add_option("--seed", options.seed, "overrides the configured seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate factor model toolkit"};
    app.require_subcommand(1);
    afm::CommandOptions options;

    auto* simulate = app.add_subcommand("simulate", "write a synthetic panel and its truth sidecar");
    add_common(simulate, options);
    simulate->add_option("--n", options.n, "number of series")->check(CLI::PositiveNumber);
    simulate->add_option("--t", options.t, "number of periods")->check(CLI::PositiveNumber);

    auto* estimate = app.add_subcommand("estimate", "estimate factors from a panel CSV");
    add_common(estimate, options);
    estimate->add_option("panel", options.panel, "panel CSV (t,series_1,...,series_n)")->required();
    estimate->add_option("--r", options.r, "number of factors")->check(CLI::PositiveNumber);
    estimate->add_flag("--demean", options.demean, "subtract column means before estimating");

    auto* rates = app.add_subcommand("rates", "run a convergence-rate suite");
    add_common(rates, options);
    std::string suites;
    for (const auto& name : afm::suite_names()) suites += (suites.empty() ? "" : ", ") + name;
    rates->add_option("--suite", options.suite, "one of: " + suites);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : afm::kExitError;
    }

    if (simulate->parsed()) return afm::cmd_simulate(options, std::cout, std::cerr);
    if (estimate->parsed()) return afm::cmd_estimate(options, std::cout, std::cerr);
    return afm::cmd_rates(options, std::cout, std::cerr);
}
