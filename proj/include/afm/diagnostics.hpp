#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "afm/dgp.hpp"

namespace afm {

/// Every T equal to a single T0.
struct FixedT {
    Index t = 20;
};

/// T equal to n at every grid point.
struct CoupledT {};

using TimeAxis = std::variant<std::vector<Index>, FixedT, CoupledT>;

/**
 * @brief (n, T) design of a Monte Carlo rate experiment.
 *
 * With `redraw_loadings` each replicate draws its loadings from a seed derived
 * from (config.seed, replicate), so mean squares average over the loadings law
 * as well as over factors and shocks. Loadings stay nested in n within a
 * replicate either way.
 */
struct RateGrid {
    std::vector<Index> n_values;
    TimeAxis t_values = CoupledT{};
    int replications = 32;
    ModelConfig config = ModelConfig::canonical();
    bool redraw_loadings = true;

    /// Throws ValidationError on unsorted, nonpositive or out-of-range values.
    void validate() const;
    /// At least four n values spanning a decade.
    bool has_n_leverage() const;
    /// T values paired with a given n.
    std::vector<Index> times_for(Index n) const;
    /// Config for one replicate (reseeded when redraw_loadings is set).
    ModelConfig replicate_config(int replicate) const;
};

struct RateRow {
    std::string metric;
    Index n = 0;
    Index T = 0;  ///< 0 for population metrics
    int replications = 0;
    double mse = 0.0;
    double rms = 0.0;
};

/// Outcome of one metric. `axis` names the regressor of the fitted slope.
struct MetricVerdict {
    std::string metric;
    std::string axis = "n";
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_stderr = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    std::string rule;
    std::string detail;
};

struct RateReport {
    std::string suite;
    std::vector<RateRow> rows;
    std::vector<MetricVerdict> verdicts;

    bool all_pass() const;
    /// Throws std::out_of_range for unknown metrics.
    const MetricVerdict& verdict(std::string_view metric) const;
    std::vector<RateRow> rows_for(std::string_view metric) const;
    void append(const RateReport& other);
};

struct SlopeFit {
    double slope = 0.0;
    double standard_error = 0.0;
};

/// OLS of log y on log x. Needs >= 3 points, all coordinates positive.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

// Verdict thresholds.
inline constexpr double kSlopeLow = -0.65;
inline constexpr double kSlopeHigh = -0.35;
inline constexpr double kSlopeStderrMax = 0.08;
inline constexpr double kBoundedRatioMax = 5.0;
inline constexpr double kPlateauRatioMin = 0.5;
inline constexpr double kLevelRatioMax = 2.0;

/// Population eigenstructure of Gamma_y against Gamma_C (T is irrelevant).
RateReport lemma1_eigenstructure_check(const RateGrid& grid);

/// Population NPCs of y and of C against F_infinity.
RateReport theorem1_factor_limit_rate(const RateGrid& grid);

/// Population PC loadings of tracked units (1-based) against Lambda_infinity.
RateReport theorem2_loadings_rate(const RateGrid& grid, const std::vector<Index>& unit_indices);

/**
 * Sample NPCs against F_infinity on three designs: T = n (`coupled`),
 * T fixed while n grows (`fixed_t`, plateau expected) and n fixed while T
 * grows (`fixed_n`).
 */
RateReport theorem3_factor_consistency(const RateGrid& coupled, const RateGrid& fixed_t, const RateGrid& fixed_n);

/// Factor-space residual F_hat - F H_hat' with T fixed at a small T0.
RateReport theorem3_factor_space_fixed_t(const RateGrid& grid);

/// Sample eigenvectors, eigenvalues and NPC coefficient rows against population, as T grows.
RateReport lemma2_sample_rates(const RateGrid& grid);

/// Knobs for the named suites; defaults reproduce the desk-scale acceptance grids.
struct SuiteSettings {
    ModelConfig config = ModelConfig::canonical();
    std::vector<Index> n_values{100, 200, 400, 800, 1600, 3200};
    int replications = 32;
    bool redraw_loadings = true;
    Index theorem1_t = 500;
    std::vector<Index> unit_indices{1};
    Index fixed_t = 20;
    int fixed_t_replications = 64;
    Index floor_t = 100;
    std::vector<Index> floor_n_values{400, 800, 1600, 3200};
    Index fixed_n = 800;
    std::vector<Index> fixed_n_t_values{100, 200, 400, 800, 1600, 3200};
    std::vector<Index> lemma2_n_values{200, 800};
    std::vector<Index> lemma2_t_values{100, 200, 400, 800, 1600, 3200};
};

/// lemma1, theorem1, theorem2, theorem3, theorem3-fixedT, lemma2, all.
const std::vector<std::string>& suite_names();

/// Throws ValidationError for an unknown suite.
RateReport run_suite(const SuiteSettings& settings, std::string_view suite);

}  // namespace afm
