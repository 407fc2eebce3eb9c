#include "afm/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "afm/error.hpp"
#include "afm/moments.hpp"
#include "afm/pca.hpp"
#include "afm/rng.hpp"
#include "afm/spectra.hpp"

namespace afm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Grid and report plumbing

void RateGrid::validate() const {
    config.validate();
    if (n_values.empty()) throw ValidationError("grid has no n values");
    for (std::size_t k = 0; k < n_values.size(); ++k) {
        if (n_values[k] < 1) throw ValidationError("grid n values must be positive");
        if (k > 0 && n_values[k] <= n_values[k - 1]) throw ValidationError("grid n values must be strictly ascending");
        if (n_values[k] > config.n_max) {
            throw ConfigError("grid n = " + std::to_string(n_values[k]) + " exceeds n_max = " +
                              std::to_string(config.n_max));
        }
    }
    if (replications < 1) throw ValidationError("replications must be positive");
    if (const auto* list = std::get_if<std::vector<Index>>(&t_values)) {
        if (list->empty()) throw ValidationError("grid has no T values");
        for (std::size_t k = 0; k < list->size(); ++k) {
            if ((*list)[k] < 1) throw ValidationError("grid T values must be positive");
            if (k > 0 && (*list)[k] <= (*list)[k - 1]) throw ValidationError("grid T values must be strictly ascending");
        }
    } else if (const auto* fixed = std::get_if<FixedT>(&t_values)) {
        if (fixed->t < 1) throw ValidationError("fixed T must be positive");
    }
}

namespace {

bool spans_decade(const std::vector<double>& xs) {
    if (xs.size() < 4) return false;
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return *lo > 0.0 && *hi / *lo >= 10.0 - 1e-9;
}

}  // namespace

bool RateGrid::has_n_leverage() const {
    return spans_decade(std::vector<double>(n_values.begin(), n_values.end()));
}

std::vector<Index> RateGrid::times_for(Index n) const {
    if (const auto* list = std::get_if<std::vector<Index>>(&t_values)) return *list;
    if (const auto* fixed = std::get_if<FixedT>(&t_values)) return {fixed->t};
    return {n};
}

ModelConfig RateGrid::replicate_config(int replicate) const {
    ModelConfig copy = config;
    if (redraw_loadings) copy.seed = rng::mix_seed(config.seed, static_cast<std::uint64_t>(replicate));
    return copy;
}

bool RateReport::all_pass() const {
    return !verdicts.empty() && std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
}

const MetricVerdict& RateReport::verdict(std::string_view metric) const {
    for (const auto& v : verdicts) {
        if (v.metric == metric) return v;
    }
    throw std::out_of_range("no verdict for metric " + std::string(metric));
}

std::vector<RateRow> RateReport::rows_for(std::string_view metric) const {
    std::vector<RateRow> selected;
    for (const auto& row : rows) {
        if (row.metric == metric) selected.push_back(row);
    }
    return selected;
}

void RateReport::append(const RateReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    verdicts.insert(verdicts.end(), other.verdicts.begin(), other.verdicts.end());
}

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw ValidationError("slope fit needs at least 3 points, got " + std::to_string(points.size()));
    const auto m = static_cast<double>(points.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) throw ValidationError("slope fit needs positive coordinates");
        mean_x += std::log(x);
        mean_y += std::log(y);
    }
    mean_x /= m;
    mean_y /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mean_x;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - mean_y);
    }
    if (!(sxx > 0.0)) throw ValidationError("slope fit needs at least two distinct x values");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    double ssr = 0.0;
    for (const auto& [x, y] : points) {
        const double residual = std::log(y) - mean_y - fit.slope * (std::log(x) - mean_x);
        ssr += residual * residual;
    }
    fit.standard_error = std::sqrt(ssr / (m - 2.0) / sxx);
    return fit;
}

namespace {

struct Sample {
    std::string metric;
    Index n;
    Index T;
    double value;  // squared for error metrics
};

struct ReplicateResult {
    std::vector<Sample> samples;
    std::map<std::string, std::string> violations;  // metric -> first violation
};

// Runs fn(k) for k in [0, count) on up to hardware_concurrency threads. The
// result vector is indexed by k, so aggregation order is fixed.
template <class Fn>
std::vector<ReplicateResult> run_parallel(int count, Fn fn) {
    std::vector<ReplicateResult> results(static_cast<std::size_t>(count));
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), count));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int k = next++; k < count; k = next++) {
            try {
                results[static_cast<std::size_t>(k)] = fn(k);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

// Mean over replicates per (metric, n, T); metrics keep first-seen order.
struct Aggregate {
    std::vector<std::string> order;
    std::map<std::string, std::map<std::pair<Index, Index>, std::pair<double, int>>> cells;
    std::map<std::string, std::string> violations;

    void add(const std::vector<ReplicateResult>& results) {
        for (const auto& result : results) {
            for (const auto& sample : result.samples) {
                auto& metric = cells[sample.metric];
                if (metric.empty() && std::find(order.begin(), order.end(), sample.metric) == order.end()) {
                    order.push_back(sample.metric);
                }
                auto& cell = metric[{sample.n, sample.T}];
                cell.first += sample.value;
                cell.second += 1;
            }
            for (const auto& [metric, text] : result.violations) violations.try_emplace(metric, text);
        }
    }

    void emit(RateReport& report) const {
        for (const auto& name : order) {
            for (const auto& [key, cell] : cells.at(name)) {
                RateRow row;
                row.metric = name;
                row.n = key.first;
                row.T = key.second;
                row.replications = cell.second;
                row.mse = cell.first / cell.second;
                row.rms = std::sqrt(row.mse);
                report.rows.push_back(row);
            }
        }
    }
};

std::string format_double(double value) {
    std::ostringstream out;
    out.precision(4);
    out << value;
    return out.str();
}

double axis_value(const RateRow& row, std::string_view axis) {
    return static_cast<double>(axis == "T" ? row.T : row.n);
}

// Fits slope of log rms on log axis; stays NaN when the fit is impossible.
void attach_slope(MetricVerdict& verdict, const std::vector<RateRow>& rows) {
    std::vector<std::pair<double, double>> points;
    for (const auto& row : rows) points.emplace_back(axis_value(row, verdict.axis), row.rms);
    try {
        const SlopeFit fit = fit_loglog_slope(points);
        verdict.slope = fit.slope;
        verdict.slope_stderr = fit.standard_error;
    } catch (const ValidationError&) {
    }
}

MetricVerdict slope_window_verdict(const RateReport& report, const std::string& metric, std::string axis) {
    MetricVerdict verdict;
    verdict.metric = metric;
    verdict.axis = std::move(axis);
    verdict.rule = "slope of log rms on log " + verdict.axis + " in [" + format_double(kSlopeLow) + ", " +
                   format_double(kSlopeHigh) + "], stderr < " + format_double(kSlopeStderrMax);
    const auto rows = report.rows_for(metric);
    attach_slope(verdict, rows);
    std::vector<double> xs;
    for (const auto& row : rows) xs.push_back(axis_value(row, verdict.axis));
    if (!spans_decade(xs)) {
        verdict.detail = "insufficient leverage: need >= 4 points spanning a decade";
        return verdict;
    }
    verdict.pass = verdict.slope >= kSlopeLow && verdict.slope <= kSlopeHigh && verdict.slope_stderr < kSlopeStderrMax;
    verdict.detail = "slope " + format_double(verdict.slope) + " +- " + format_double(verdict.slope_stderr);
    return verdict;
}

MetricVerdict bounded_ratio_verdict(const RateReport& report, const std::string& metric) {
    MetricVerdict verdict;
    verdict.metric = metric;
    verdict.rule = "max/min of rms over grid <= " + format_double(kBoundedRatioMax);
    const auto rows = report.rows_for(metric);
    attach_slope(verdict, rows);
    if (rows.size() < 2) {
        verdict.detail = "needs at least two grid points";
        return verdict;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& row : rows) {
        lo = std::min(lo, row.rms);
        hi = std::max(hi, row.rms);
    }
    if (hi == 0.0) {
        verdict.pass = true;
        verdict.detail = "identically zero";
        return verdict;
    }
    const double ratio = hi / lo;
    verdict.pass = ratio <= kBoundedRatioMax;
    verdict.detail = "max/min = " + format_double(ratio);
    return verdict;
}

MetricVerdict shrink_verdict(const RateReport& report, const std::string& metric, std::string axis = "n") {
    MetricVerdict verdict;
    verdict.metric = metric;
    verdict.axis = std::move(axis);
    verdict.rule = "rms at largest " + verdict.axis + " < rms at smallest " + verdict.axis;
    const auto rows = report.rows_for(metric);
    attach_slope(verdict, rows);
    if (rows.size() < 2) {
        verdict.detail = "needs at least two grid points";
        return verdict;
    }
    const double first = rows.front().rms;
    const double last = rows.back().rms;
    verdict.pass = last < first || (first == 0.0 && last == 0.0);
    verdict.detail = "first " + format_double(first) + ", last " + format_double(last);
    return verdict;
}

MetricVerdict plateau_verdict(const RateReport& report, const std::string& metric) {
    MetricVerdict verdict;
    verdict.metric = metric;
    verdict.rule = "rms(last n) / rms(first n) >= " + format_double(kPlateauRatioMin);
    const auto rows = report.rows_for(metric);
    attach_slope(verdict, rows);
    if (rows.size() < 2 || rows.front().rms == 0.0) {
        verdict.detail = "needs at least two grid points with nonzero error";
        return verdict;
    }
    const double ratio = rows.back().rms / rows.front().rms;
    verdict.pass = ratio >= kPlateauRatioMin;
    verdict.detail = "ratio " + format_double(ratio);
    return verdict;
}

MetricVerdict hard_bound_verdict(const RateReport& report, const Aggregate& aggregate, const std::string& metric,
                                 std::string rule) {
    MetricVerdict verdict;
    verdict.metric = metric;
    verdict.rule = std::move(rule);
    attach_slope(verdict, report.rows_for(metric));
    const auto found = aggregate.violations.find(metric);
    verdict.pass = found == aggregate.violations.end();
    verdict.detail = verdict.pass ? "holds at every grid point and replicate" : found->second;
    return verdict;
}

std::string indexed(const std::string& stem, Index j) {
    return stem + "_" + std::to_string(j);
}

std::string at_n(const std::string& stem, Index n) {
    return stem + ".n" + std::to_string(n);
}

// Sign of the inner product, used to align eigenvectors that are only
// determined up to sign.
double sign_towards(const Eigen::Ref<const VectorXd>& v, const Eigen::Ref<const VectorXd>& reference) {
    return v.dot(reference) < 0.0 ? -1.0 : 1.0;
}

std::uint32_t replicate_tag(int replicate) {
    return static_cast<std::uint32_t>(replicate);
}

}  // namespace

// ---------------------------------------------------------------------------
// Suites

RateReport lemma1_eigenstructure_check(const RateGrid& grid) {
    grid.validate();
    const int r = grid.config.r;
    const VectorXd d_lambda = Eigen::SelfAdjointEigenSolver<MatrixXd>(grid.config.limit_loadings_gram())
                                  .eigenvalues()
                                  .reverse();
    std::vector<MatrixXd> gamma_e;
    std::vector<double> mu1_e;
    for (const Index n : grid.n_values) {
        gamma_e.push_back(idio_covariance(grid.config, n));
        mu1_e.push_back(idio_top_eigenvalue(grid.config, n));
    }
    const auto results = run_parallel(grid.replications, [&](int replicate) {
        ReplicateResult result;
        const ModelConfig config = grid.replicate_config(replicate);
        const MatrixXd loadings_max = draw_loadings(config, grid.n_values.back());
        for (std::size_t k = 0; k < grid.n_values.size(); ++k) {
            const Index n = grid.n_values[k];
            const CovariancePair pair = population_covariances(loadings_max.topRows(n), gamma_e[k]);
            const EigenSystem ey = top_r_eigs(pair.gamma_y, r);
            const EigenSystem ec = top_r_eigs(pair.gamma_c, r);
            const double nd = static_cast<double>(n);
            // Rounding allowance for the hard Weyl check.
            const double slack = 1e-10 * std::max(1.0, ey.values(0));
            for (int j = 0; j < r; ++j) {
                const double gap = ey.values(j) - ec.values(j);
                const std::string weyl = indexed("lemma1.weyl_gap", j + 1);
                result.samples.push_back({weyl, n, 0, gap * gap});
                if (gap < -slack || gap > mu1_e[k] + slack) {
                    result.violations.try_emplace(weyl, "n=" + std::to_string(n) + " replicate=" +
                                                            std::to_string(replicate) + ": gap " + format_double(gap) +
                                                            " outside [0, " + format_double(mu1_e[k]) + "]");
                }
                const VectorXd py = ey.vectors.row(j).transpose();
                const VectorXd pc = ec.vectors.row(j).transpose();
                const double distance = (py - sign_towards(pc, py) * pc).norm();
                result.samples.push_back({indexed("lemma1.eigvec_gap_sqrt_n", j + 1), n, 0, nd * distance * distance});
            }
            const VectorXd scaled_y = ey.values / nd;
            const VectorXd scaled_c = ec.values / nd;
            result.samples.push_back({"lemma1.eigval_over_n_error", n, 0, (scaled_y - d_lambda).squaredNorm()});
            const double diff = nd * (scaled_y - scaled_c).norm();
            result.samples.push_back({"lemma1.scaled_eigval_diff", n, 0, diff * diff});
        }
        return result;
    });
    Aggregate aggregate;
    aggregate.add(results);
    RateReport report;
    report.suite = "lemma1";
    aggregate.emit(report);
    for (int j = 1; j <= r; ++j) {
        report.verdicts.push_back(
            hard_bound_verdict(report, aggregate, indexed("lemma1.weyl_gap", j), "0 <= mu_j(Gy) - mu_j(GC) <= mu_1(Ge)"));
        report.verdicts.push_back(bounded_ratio_verdict(report, indexed("lemma1.eigvec_gap_sqrt_n", j)));
    }
    report.verdicts.push_back(shrink_verdict(report, "lemma1.eigval_over_n_error"));
    report.verdicts.push_back(bounded_ratio_verdict(report, "lemma1.scaled_eigval_diff"));
    return report;
}

RateReport theorem1_factor_limit_rate(const RateGrid& grid) {
    grid.validate();
    const int r = grid.config.r;
    std::vector<MatrixXd> gamma_e;
    for (const Index n : grid.n_values) gamma_e.push_back(idio_covariance(grid.config, n));
    const auto results = run_parallel(grid.replications, [&](int replicate) {
        ReplicateResult result;
        const ModelConfig config = grid.replicate_config(replicate);
        for (std::size_t k = 0; k < grid.n_values.size(); ++k) {
            const Index n = grid.n_values[k];
            for (const Index T : grid.times_for(n)) {
                const SyntheticPanel panel = simulate_panel(config, n, T, replicate_tag(replicate));
                const CovariancePair pair = population_covariances(panel.loadings, gamma_e[k]);
                const LimitObjects limit = limit_objects(config, panel.loadings, panel.factors);
                const MatrixXd npc_y = normalized_pcs(top_r_eigs(pair.gamma_y, r), panel.observations);
                const MatrixXd common = panel.factors * panel.loadings.transpose();
                const MatrixXd npc_c = normalized_pcs(top_r_eigs(pair.gamma_c, r), common);
                result.samples.push_back({"theorem1.npc_y", n, T, mean_squared_row_distance(npc_y, limit.f_infinity)});
                result.samples.push_back({"theorem1.npc_c", n, T, mean_squared_row_distance(npc_c, limit.f_infinity)});
            }
        }
        return result;
    });
    Aggregate aggregate;
    aggregate.add(results);
    RateReport report;
    report.suite = "theorem1";
    aggregate.emit(report);
    report.verdicts.push_back(slope_window_verdict(report, "theorem1.npc_y", "n"));
    report.verdicts.push_back(slope_window_verdict(report, "theorem1.npc_c", "n"));
    return report;
}

RateReport theorem2_loadings_rate(const RateGrid& grid, const std::vector<Index>& unit_indices) {
    grid.validate();
    if (unit_indices.empty()) throw ValidationError("theorem2 needs at least one tracked unit");
    for (const Index unit : unit_indices) {
        if (unit < 1 || unit > grid.n_values.front()) {
            throw ValidationError("tracked unit " + std::to_string(unit) + " must lie in [1, min grid n]");
        }
    }
    const int r = grid.config.r;
    const MatrixXd d_lambda = Eigen::SelfAdjointEigenSolver<MatrixXd>(grid.config.limit_loadings_gram())
                                  .eigenvalues()
                                  .reverse()
                                  .asDiagonal();
    std::vector<MatrixXd> gamma_e;
    for (const Index n : grid.n_values) gamma_e.push_back(idio_covariance(grid.config, n));
    const auto results = run_parallel(grid.replications, [&](int replicate) {
        ReplicateResult result;
        const ModelConfig config = grid.replicate_config(replicate);
        const MatrixXd loadings_max = draw_loadings(config, grid.n_values.back());
        // Factors are irrelevant for the loadings limit; one row satisfies the signature.
        const MatrixXd no_factors = MatrixXd::Zero(1, r);
        for (std::size_t k = 0; k < grid.n_values.size(); ++k) {
            const Index n = grid.n_values[k];
            const MatrixXd loadings = loadings_max.topRows(n);
            const CovariancePair pair = population_covariances(loadings, gamma_e[k]);
            const LimitObjects limit = limit_objects(config, loadings, no_factors);
            MatrixXd from_y = pc_loadings(top_r_eigs(pair.gamma_y, r));
            MatrixXd from_c = pc_loadings(top_r_eigs(pair.gamma_c, r));
            from_y = from_y * alignment_signs(from_y, limit.lambda_infinity).asDiagonal();
            from_c = from_c * alignment_signs(from_c, limit.lambda_infinity).asDiagonal();
            for (const Index unit : unit_indices) {
                const std::string suffix = "_unit" + std::to_string(unit);
                const Index i = unit - 1;
                result.samples.push_back(
                    {"theorem2.loading_y" + suffix, n, 0, (from_y.row(i) - limit.lambda_infinity.row(i)).squaredNorm()});
                result.samples.push_back(
                    {"theorem2.loading_c" + suffix, n, 0, (from_c.row(i) - limit.lambda_infinity.row(i)).squaredNorm()});
            }
            const double gram_gap = (loadings_gram(limit.lambda_infinity) - d_lambda).norm();
            result.samples.push_back({"theorem2.gram_gap", n, 0, gram_gap * gram_gap});
        }
        return result;
    });
    Aggregate aggregate;
    aggregate.add(results);
    RateReport report;
    report.suite = "theorem2";
    aggregate.emit(report);
    for (const Index unit : unit_indices) {
        const std::string suffix = "_unit" + std::to_string(unit);
        report.verdicts.push_back(slope_window_verdict(report, "theorem2.loading_y" + suffix, "n"));
        report.verdicts.push_back(slope_window_verdict(report, "theorem2.loading_c" + suffix, "n"));
    }
    report.verdicts.push_back(shrink_verdict(report, "theorem2.gram_gap"));
    return report;
}

namespace {

// Mean squared distance of the sample NPCs to F_infinity over a grid.
std::vector<ReplicateResult> sample_npc_errors(const RateGrid& grid, const std::string& metric) {
    grid.validate();
    const int r = grid.config.r;
    return run_parallel(grid.replications, [&](int replicate) {
        ReplicateResult result;
        const ModelConfig config = grid.replicate_config(replicate);
        for (const Index n : grid.n_values) {
            for (const Index T : grid.times_for(n)) {
                const SyntheticPanel panel = simulate_panel(config, n, T, replicate_tag(replicate));
                const FactorEstimate estimate = estimate_from_panel(panel.observations, r);
                const LimitObjects limit = limit_objects(config, panel.loadings, panel.factors);
                result.samples.push_back({metric, n, T, mean_squared_row_distance(estimate.factors, limit.f_infinity)});
            }
        }
        return result;
    });
}

}  // namespace

RateReport theorem3_factor_consistency(const RateGrid& coupled, const RateGrid& fixed_t, const RateGrid& fixed_n) {
    RateReport report;
    report.suite = "theorem3";
    Aggregate aggregate;
    aggregate.add(sample_npc_errors(coupled, "theorem3.coupled"));
    aggregate.add(sample_npc_errors(fixed_t, "theorem3.fixed_t_floor"));
    aggregate.add(sample_npc_errors(fixed_n, "theorem3.fixed_n"));
    aggregate.emit(report);
    report.verdicts.push_back(slope_window_verdict(report, "theorem3.coupled", "n"));
    report.verdicts.push_back(plateau_verdict(report, "theorem3.fixed_t_floor"));
    report.verdicts.push_back(shrink_verdict(report, "theorem3.fixed_n", "T"));
    return report;
}

RateReport theorem3_factor_space_fixed_t(const RateGrid& grid) {
    grid.validate();
    const int r = grid.config.r;
    for (const Index n : grid.n_values) {
        for (const Index T : grid.times_for(n)) {
            if (T < r) {
                throw ValidationError("fixed T = " + std::to_string(T) + " < r = " + std::to_string(r) +
                                      " makes the sample factor gram singular");
            }
        }
    }
    const auto results = run_parallel(grid.replications, [&](int replicate) {
        ReplicateResult result;
        const ModelConfig config = grid.replicate_config(replicate);
        for (const Index n : grid.n_values) {
            for (const Index T : grid.times_for(n)) {
                const SyntheticPanel panel = simulate_panel(config, n, T, replicate_tag(replicate));
                const FactorEstimate estimate = estimate_from_panel(panel.observations, r);
                const MatrixXd h = rotation_h(estimate.factors, panel.factors);
                const MatrixXd residual = estimate.factors - panel.factors * h.transpose();
                result.samples.push_back(
                    {"theorem3.factor_space_fixed_t", n, T, residual.rowwise().squaredNorm().mean()});
            }
        }
        return result;
    });
    Aggregate aggregate;
    aggregate.add(results);
    RateReport report;
    report.suite = "theorem3-fixedT";
    aggregate.emit(report);
    report.verdicts.push_back(slope_window_verdict(report, "theorem3.factor_space_fixed_t", "n"));
    return report;
}

RateReport lemma2_sample_rates(const RateGrid& grid) {
    grid.validate();
    const int r = grid.config.r;
    std::vector<MatrixXd> gamma_e;
    for (const Index n : grid.n_values) gamma_e.push_back(idio_covariance(grid.config, n));
    const auto results = run_parallel(grid.replications, [&](int replicate) {
        ReplicateResult result;
        const ModelConfig config = grid.replicate_config(replicate);
        for (std::size_t k = 0; k < grid.n_values.size(); ++k) {
            const Index n = grid.n_values[k];
            const std::vector<Index> times = grid.times_for(n);
            const Index t_max = *std::max_element(times.begin(), times.end());
            // Panels nest in T, so one long panel serves every T on the grid.
            const SyntheticPanel panel = simulate_panel(config, n, t_max, replicate_tag(replicate));
            const EigenSystem population = top_r_eigs(population_covariances(panel.loadings, gamma_e[k]).gamma_y, r);
            const MatrixXd coefficients = npc_coefficients(population);
            const double nd = static_cast<double>(n);
            for (const Index T : times) {
                const EigenSystem sample = top_r_eigs_of_sample_covariance(panel.observations.topRows(T), r);
                const MatrixXd sample_coefficients = npc_coefficients(sample);
                for (int j = 0; j < r; ++j) {
                    const VectorXd p = population.vectors.row(j).transpose();
                    const double s = sign_towards(sample.vectors.row(j).transpose(), p);
                    const double eigvec = (s * sample.vectors.row(j).transpose() - p).squaredNorm();
                    const double coef = (s * sample_coefficients.row(j) - coefficients.row(j)).squaredNorm();
                    result.samples.push_back({at_n(indexed("lemma2.eigvec", j + 1), n), n, T, eigvec});
                    result.samples.push_back({at_n(indexed("lemma2.coef_row_sqrt_n", j + 1), n), n, T, nd * coef});
                }
                result.samples.push_back(
                    {at_n("lemma2.eigval_over_n", n), n, T, ((sample.values - population.values) / nd).squaredNorm()});
            }
        }
        return result;
    });
    Aggregate aggregate;
    aggregate.add(results);
    RateReport report;
    report.suite = "lemma2";
    aggregate.emit(report);
    for (const Index n : grid.n_values) {
        for (int j = 1; j <= r; ++j) {
            report.verdicts.push_back(slope_window_verdict(report, at_n(indexed("lemma2.eigvec", j), n), "T"));
            report.verdicts.push_back(slope_window_verdict(report, at_n(indexed("lemma2.coef_row_sqrt_n", j), n), "T"));
        }
        report.verdicts.push_back(slope_window_verdict(report, at_n("lemma2.eigval_over_n", n), "T"));
    }
    // Level agreement of the sqrt(n)-scaled coefficient error across n.
    const Index n_first = grid.n_values.front();
    const Index n_last = grid.n_values.back();
    for (int j = 1; j <= r; ++j) {
        const std::string name = indexed("lemma2.coef_row_level_ratio", j);
        MetricVerdict verdict;
        verdict.metric = name;
        verdict.axis = "T";
        verdict.rule = "rms(n=" + std::to_string(n_last) + ") / rms(n=" + std::to_string(n_first) + ") in [" +
                       format_double(1.0 / kLevelRatioMax) + ", " + format_double(kLevelRatioMax) + "] at every T";
        if (n_first == n_last) {
            verdict.detail = "needs two n values";
            report.verdicts.push_back(verdict);
            continue;
        }
        const auto first = report.rows_for(at_n(indexed("lemma2.coef_row_sqrt_n", j), n_first));
        const auto last = report.rows_for(at_n(indexed("lemma2.coef_row_sqrt_n", j), n_last));
        verdict.pass = !first.empty() && first.size() == last.size();
        double worst = 1.0;
        for (std::size_t k = 0; k < std::min(first.size(), last.size()); ++k) {
            const double ratio = last[k].rms / first[k].rms;
            RateRow row = last[k];
            row.metric = name;
            row.rms = ratio;
            row.mse = ratio * ratio;
            report.rows.push_back(row);
            if (!(ratio >= 1.0 / kLevelRatioMax && ratio <= kLevelRatioMax)) verdict.pass = false;
            if (std::abs(std::log(ratio)) > std::abs(std::log(worst))) worst = ratio;
        }
        verdict.detail = "most extreme ratio " + format_double(worst);
        report.verdicts.push_back(verdict);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Named suites

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"lemma1", "theorem1", "theorem2", "theorem3",
                                                "theorem3-fixedT", "lemma2", "all"};
    return names;
}

RateReport run_suite(const SuiteSettings& settings, std::string_view suite) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::string valid;
        for (const auto& name : names) valid += (valid.empty() ? "" : ", ") + name;
        throw ValidationError("unknown suite '" + std::string(suite) + "'; valid suites: " + valid);
    }
    auto make_grid = [&](std::vector<Index> n_values, TimeAxis times, int replications) {
        RateGrid grid;
        grid.n_values = std::move(n_values);
        grid.t_values = std::move(times);
        grid.replications = replications;
        grid.config = settings.config;
        grid.redraw_loadings = settings.redraw_loadings;
        return grid;
    };
    const bool all = suite == "all";
    RateReport report;
    report.suite = std::string(suite);
    if (all || suite == "lemma1") {
        report.append(lemma1_eigenstructure_check(make_grid(settings.n_values, CoupledT{}, settings.replications)));
    }
    if (all || suite == "theorem1") {
        report.append(theorem1_factor_limit_rate(
            make_grid(settings.n_values, FixedT{settings.theorem1_t}, settings.replications)));
    }
    if (all || suite == "theorem2") {
        report.append(theorem2_loadings_rate(make_grid(settings.n_values, CoupledT{}, settings.replications),
                                             settings.unit_indices));
    }
    if (all || suite == "theorem3") {
        report.append(theorem3_factor_consistency(
            make_grid(settings.n_values, CoupledT{}, settings.replications),
            make_grid(settings.floor_n_values, FixedT{settings.floor_t}, settings.replications),
            make_grid({settings.fixed_n}, settings.fixed_n_t_values, settings.replications)));
    }
    if (all || suite == "theorem3-fixedT") {
        report.append(theorem3_factor_space_fixed_t(
            make_grid(settings.n_values, FixedT{settings.fixed_t}, settings.fixed_t_replications)));
    }
    if (all || suite == "lemma2") {
        report.append(lemma2_sample_rates(make_grid(settings.lemma2_n_values, settings.lemma2_t_values,
                                                    settings.replications)));
    }
    return report;
}

}  // namespace afm
