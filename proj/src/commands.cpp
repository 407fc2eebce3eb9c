#include "afm/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "afm/diagnostics.hpp"
#include "afm/error.hpp"
#include "afm/moments.hpp"
#include "afm/panel_io.hpp"
#include "afm/pca.hpp"
#include "afm/report_io.hpp"
#include "afm/run_config.hpp"

namespace afm {

using Eigen::MatrixXd;

namespace {

RunConfig resolve(const CommandOptions& options) {
    RunConfig run = options.config ? load_run_config(*options.config) : RunConfig{};
    if (options.seed) run.settings.config.seed = *options.seed;
    if (options.n) run.n = options.n;
    if (options.t) run.T = options.t;
    if (options.r) run.factors = options.r;
    if (options.out) run.out = options.out;
    if (options.demean) run.demean = true;
    return run;
}

std::filesystem::path require_out(const RunConfig& run) {
    if (!run.out) throw ValidationError("no output path: pass --out or set out in the config");
    return *run.out;
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
}

template <class Body>
int guarded(std::ostream& err, Body body) {
    try {
        return body();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitError;
}

std::string key_value_csv(const std::vector<std::pair<std::string, std::string>>& entries) {
    std::string out = "key,value\n";
    for (const auto& [key, value] : entries) out += key + "," + value + "\n";
    return out;
}

}  // namespace

int cmd_simulate(const CommandOptions& options, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig run = resolve(options);
        const ModelConfig& config = run.settings.config;
        const Index n = run.n.value_or(100);
        const Index T = run.T.value_or(100);
        const std::filesystem::path out = require_out(run);
        if (out.has_parent_path()) ensure_directory(out.parent_path());
        const SyntheticPanel panel = simulate_panel(config, n, T, 0);
        const LimitObjects limit = limit_objects(config, panel.loadings, panel.factors);
        PanelTruth truth;
        truth.config = config;
        truth.replicate = panel.replicate;
        truth.factors = panel.factors;
        truth.loadings = panel.loadings;
        truth.f_infinity = limit.f_infinity;
        truth.p_lambda = limit.p_lambda;
        write_atomic(out, panel_csv(panel.observations));
        write_atomic(truth_path_for(out), truth_json(truth));
        log << "wrote " << T << " x " << n << " panel to " << out.string() << '\n';
        return kExitOk;
    });
}

int cmd_estimate(const CommandOptions& options, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig run = resolve(options);
        const std::filesystem::path out = require_out(run);
        MatrixXd data = read_panel_csv(options.panel);
        const Index T = data.rows();
        const Index n = data.cols();
        const int r = run.factors.value_or(run.settings.config.r);
        if (run.demean) demean_columns(data);
        const FactorEstimate estimate = estimate_from_panel(data, r);
        ensure_directory(out);

        const MatrixXd fitted = estimate.factors * estimate.loadings.transpose();
        const double scale = data.norm();
        const double reconstruction = scale > 0.0 ? (data - fitted).norm() / scale : 0.0;

        write_atomic(out / "factors.csv", matrix_csv(estimate.factors, "t", "factor"));
        write_atomic(out / "loadings.csv", matrix_csv(estimate.loadings, "series", "loading"));
        write_atomic(out / "eigenvalues.csv", matrix_csv(estimate.eigen.values, "j", "eigenvalue"));
        write_atomic(out / "summary.csv", key_value_csv({{"n", std::to_string(n)},
                                                         {"T", std::to_string(T)},
                                                         {"r", std::to_string(r)},
                                                         {"demeaned", run.demean ? "true" : "false"},
                                                         {"eigen_gap", format_number(estimate.eigen.gap)},
                                                         {"reconstruction_relative_error",
                                                          format_number(reconstruction)}}));
        log << "estimated " << r << " factors from a " << T << " x " << n << " panel\n";

        const auto truth_path = truth_path_for(options.panel);
        if (std::filesystem::exists(truth_path)) {
            const PanelTruth truth = read_truth(truth_path);
            if (truth.f_infinity.rows() != T || truth.f_infinity.cols() != r) {
                throw ValidationError("truth sidecar " + truth_path.string() + " does not match the panel and r");
            }
            const double rms = std::sqrt(mean_squared_row_distance(estimate.factors, truth.f_infinity));
            const MatrixXd h = rotation_h(estimate.factors, truth.factors);
            std::vector<std::pair<std::string, std::string>> scores{{"rms_factor_error", format_number(rms)}};
            for (Index i = 0; i < h.rows(); ++i) {
                for (Index j = 0; j < h.cols(); ++j) {
                    scores.emplace_back("h_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                                        format_number(h(i, j)));
                }
            }
            write_atomic(out / "scores.csv", key_value_csv(scores));
            log << "rms distance to F_infinity: " << format_number(rms) << '\n';
        }
        return kExitOk;
    });
}

int cmd_rates(const CommandOptions& options, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig run = resolve(options);
        const std::string suite = options.suite.value_or("all");
        const std::filesystem::path out = require_out(run);
        const auto& names = suite_names();
        if (std::find(names.begin(), names.end(), suite) == names.end()) {
            std::string valid;
            for (const auto& name : names) valid += (valid.empty() ? "" : ", ") + name;
            throw ValidationError("unknown suite '" + suite + "'; valid suites: " + valid);
        }
        ensure_directory(out);
        const RateReport report = select_metrics(run_suite(run.settings, suite), run.metrics);
        write_atomic(out / "report.csv", report_csv(report));
        write_atomic(out / "plot_data.txt", plot_data(report));
        log << verdict_summary(report);
        const bool pass = report.all_pass();
        log << (pass ? "all verdicts pass\n" : "some verdicts failed\n");
        return pass ? kExitOk : kExitVerdictFailed;
    });
}

}  // namespace afm
