#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "afm/dgp.hpp"

namespace afm {

/// Flags shared by the subcommands; command-line values override the config file.
struct CommandOptions {
    std::optional<std::filesystem::path> config;
    std::optional<Index> n;
    std::optional<Index> t;
    std::optional<int> r;
    std::optional<std::filesystem::path> out;
    std::optional<std::string> suite;
    std::optional<std::uint64_t> seed;
    bool demean = false;
    std::filesystem::path panel;  ///< input of `estimate`
};

/// Exit codes: 0 success, 1 at least one verdict failed, 2 usage, input or I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailed = 1;
inline constexpr int kExitError = 2;

/// Writes the panel CSV at --out and `<out>.truth.json` beside it.
int cmd_simulate(const CommandOptions& options, std::ostream& log, std::ostream& err);

/// Writes factors.csv, loadings.csv, eigenvalues.csv and summary.csv into the
/// --out directory, plus scores.csv when the panel has a truth sidecar.
int cmd_estimate(const CommandOptions& options, std::ostream& log, std::ostream& err);

/// Runs a suite and writes report.csv and plot_data.txt into the --out directory.
int cmd_rates(const CommandOptions& options, std::ostream& log, std::ostream& err);

}  // namespace afm
