#pragma once

#include <filesystem>
#include <string>

#include "afm/diagnostics.hpp"

namespace afm {

/// Shortest text that round-trips a double (17 significant digits).
std::string format_number(double value);

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Columns: metric,n,T,replications,rms,mse,slope,stderr,verdict.
std::string report_csv(const RateReport& report);

/// One block per metric: a `# metric <name> x=<axis>` line, then `x y` pairs.
std::string plot_data(const RateReport& report);

/// Multi-line human summary of the verdicts.
std::string verdict_summary(const RateReport& report);

}  // namespace afm
