#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afm/diagnostics.hpp"

namespace afm {

/// Everything a CLI run can be configured with. Unset optionals fall back to
/// command-line flags and then to built-in defaults.
struct RunConfig {
    SuiteSettings settings;
    std::optional<Index> n;
    std::optional<Index> T;
    std::optional<int> factors;  ///< r used by `estimate`
    std::optional<std::filesystem::path> out;
    bool demean = false;
    std::vector<std::string> metrics;  ///< metric-name prefixes kept in reports; empty keeps all
};

/**
 * Parses flat `key = value` text. `#` starts a comment; lists are comma
 * separated. Unknown keys, duplicate keys and malformed values throw
 * ConfigError naming the line. `source` labels messages.
 */
RunConfig parse_run_config(std::string_view text, const std::string& source = "config");
RunConfig load_run_config(const std::filesystem::path& path);

/// Accepted keys, in documentation order.
const std::vector<std::string>& run_config_keys();

/// Metric name stems the diagnostics can emit.
const std::vector<std::string>& metric_stems();

/// Keeps only rows and verdicts whose metric starts with one of `prefixes`.
RateReport select_metrics(const RateReport& report, const std::vector<std::string>& prefixes);

}  // namespace afm
