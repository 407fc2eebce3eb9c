// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Usage: afm_acceptance [path-to-afm-executable]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "afm/diagnostics.hpp"
#include "afm/rng.hpp"
#include "afm/dgp.hpp"
#include "afm/moments.hpp"
#include "afm/panel_io.hpp"
#include "afm/pca.hpp"
#include "afm/spectra.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using Eigen::MatrixXd;

namespace {

// Pinned thresholds.
constexpr double kRuntimeLimitSeconds = 600.0;
constexpr int kGramSeeds = 10;
constexpr double kWilkinsonRatioLow = 3.0;
constexpr double kWilkinsonRatioHigh = 5.0;
constexpr double kIdentityTol = 1e-8;
constexpr double kOrthonormalTol = 1e-10;
constexpr double kReconstructionTol = 1e-6;
constexpr double kRotationTol = 0.1;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << (ok ? "" : "failed: ") << what;
    }
};

std::string fmt(double x) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4g", x);
    return buffer;
}

void slope_check(Outcome& out, const afm::RateReport& report, const std::string& metric) {
    const auto& v = report.verdict(metric);
    out.require(v.pass, metric + " slope " + fmt(v.slope) + " +- " + fmt(v.slope_stderr));
}

Outcome criterion1() {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    const auto report = afm::run_suite(afm::SuiteSettings{}, "theorem1");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    slope_check(out, report, "theorem1.npc_y");
    slope_check(out, report, "theorem1.npc_c");
    out.require(seconds <= kRuntimeLimitSeconds, "runtime " + fmt(seconds) + " s <= 600 s");
    return out;
}

Outcome criterion2() {
    Outcome out;
    const auto report = afm::run_suite(afm::SuiteSettings{}, "theorem2");
    slope_check(out, report, "theorem2.loading_y_unit1");
    // Gram gap with loadings held fixed per seed.
    int decreasing = 0;
    for (int s = 0; s < kGramSeeds; ++s) {
        const auto config = afm::ModelConfig::canonical(afm::rng::mix_seed(afm::kDefaultSeed, 1000 + s));
        const MatrixXd loadings = afm::draw_loadings(config, 3200);
        const auto limit = afm::limit_objects(config, loadings, MatrixXd::Zero(1, 2));
        auto gap = [&](Eigen::Index n) {
            return (afm::loadings_gram(limit.lambda_infinity.topRows(n)) - MatrixXd(limit.d_lambda.asDiagonal()))
                .norm();
        };
        if (gap(3200) < gap(100)) ++decreasing;
    }
    out.require(2 * decreasing > kGramSeeds,
                "gram gap(3200) < gap(100) for " + std::to_string(decreasing) + "/" + std::to_string(kGramSeeds) +
                    " seeds");
    return out;
}

Outcome criterion3() {
    Outcome out;
    const auto report = afm::run_suite(afm::SuiteSettings{}, "theorem3");
    slope_check(out, report, "theorem3.coupled");
    const auto& floor = report.verdict("theorem3.fixed_t_floor");
    out.require(floor.pass, "T=100 floor " + floor.detail);
    return out;
}

Outcome criterion4() {
    Outcome out;
    afm::SuiteSettings settings;
    const auto report = afm::run_suite(settings, "theorem3-fixedT");
    out.require(settings.fixed_t == 20 && settings.fixed_t_replications == 64, "T0 = 20 with 64 replications");
    slope_check(out, report, "theorem3.factor_space_fixed_t");
    return out;
}

Outcome criterion5() {
    Outcome out;
    const auto report = afm::run_suite(afm::SuiteSettings{}, "lemma1");
    for (int j = 1; j <= 2; ++j) {
        const auto& weyl = report.verdict("lemma1.weyl_gap_" + std::to_string(j));
        out.require(weyl.pass, "Weyl sandwich j=" + std::to_string(j));
        const auto& bounded = report.verdict("lemma1.eigvec_gap_sqrt_n_" + std::to_string(j));
        out.require(bounded.pass, "sqrt(n) eigvec gap j=" + std::to_string(j) + " " + bounded.detail + " <= 5");
    }
    return out;
}

Outcome criterion6() {
    Outcome out;
    const auto report = afm::run_suite(afm::SuiteSettings{}, "lemma2");
    slope_check(out, report, "lemma2.eigvec_1.n200");
    slope_check(out, report, "lemma2.eigvec_2.n200");
    for (int j = 1; j <= 2; ++j) {
        const auto& level = report.verdict("lemma2.coef_row_level_ratio_" + std::to_string(j));
        out.require(level.pass, "coefficient row " + std::to_string(j) + " level " + level.detail);
    }
    return out;
}

Outcome criterion7() {
    Outcome out;
    std::mt19937_64 gen(20240607);
    const MatrixXd q = oracle::random_orthogonal(10, gen);
    const MatrixXd base = q * Eigen::VectorXd::LinSpaced(10, 10.0, 1.0).asDiagonal() * q.transpose();
    const MatrixXd b = oracle::random_symmetric_unit(10, gen);
    const double eps[3] = {1e-2, 5e-3, 2.5e-3};
    oracle::PerturbationResiduals res[3];
    for (int k = 0; k < 3; ++k) res[k] = oracle::perturbation_residuals(base, b, eps[k]);
    for (int k = 0; k < 2; ++k) {
        const double vr = res[k].vector / res[k + 1].vector;
        const double er = res[k].value / res[k + 1].value;
        out.require(vr >= kWilkinsonRatioLow && vr <= kWilkinsonRatioHigh, "vector ratio " + fmt(vr));
        out.require(er >= kWilkinsonRatioLow && er <= kWilkinsonRatioHigh, "value ratio " + fmt(er));
    }
    return out;
}

Outcome criterion8() {
    Outcome out;
    const auto config = afm::ModelConfig::canonical();
    const auto panel = afm::simulate_panel(config, 300, 200, 0);
    const auto estimate = afm::estimate_from_panel(panel.observations, 2);
    const double var_err =
        (afm::sample_covariance(estimate.factors) - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff();
    out.require(var_err < kIdentityTol, "NPC sample variance = I (" + fmt(var_err) + ")");
    const double orth = afm::orthonormality_defect(estimate.eigen.vectors);
    out.require(orth < kOrthonormalTol, "PP' = I (" + fmt(orth) + ")");

    const auto once = afm::fix_signs(estimate.eigen);
    auto flipped = estimate.eigen;
    flipped.vectors.row(0) *= -1.0;
    out.require(afm::fix_signs(once).vectors == once.vectors, "sign convention idempotent");
    out.require(afm::fix_signs(flipped).vectors == once.vectors, "sign convention flip invariant");

    afm::ModelConfig noiseless = config;
    noiseless.idio_sigma = 0.0;
    const auto clean = afm::simulate_panel(noiseless, 120, 60, 0);
    const auto clean_est = afm::estimate_from_panel(clean.observations, 2);
    const double recon = (clean.observations - clean_est.factors * clean_est.loadings.transpose()).norm() /
                         clean.observations.norm();
    out.require(recon < kReconstructionTol, "noiseless reconstruction " + fmt(recon));

    const double self_h = (afm::rotation_h(panel.factors, panel.factors) - MatrixXd::Identity(2, 2)).norm();
    out.require(self_h < kIdentityTol, "rotation_h(F, F) = I (" + fmt(self_h) + ")");

    const auto big = afm::simulate_panel(config, 1600, 1600, 0);
    const auto limit = afm::limit_objects(config, big.loadings, big.factors);
    out.require(limit.p_lambda == MatrixXd::Identity(2, 2), "canonical P_Lambda = I2");
    const MatrixXd h = afm::rotation_h(afm::estimate_from_panel(big.observations, 2).factors, big.factors);
    const double h_err = (h - MatrixXd::Identity(2, 2)).norm();
    out.require(h_err < kRotationTol, "|H_hat - I2| = " + fmt(h_err) + " at n=T=1600");
    return out;
}

int run(const std::string& command) {
    const int status = std::system(command.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

Outcome criterion9(const std::string& exe) {
    Outcome out;
    if (exe.empty() || !fs::exists(exe)) {
        out.require(false, "afm executable available");
        return out;
    }
    const fs::path dir = fs::temp_directory_path() / "afm_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string q = "\"" + exe + "\"";
    const std::string d = dir.string();
    bool ok = run(q + " simulate --n 400 --t 400 --out " + d + "/a.csv > /dev/null") == 0 &&
              run(q + " simulate --n 400 --t 400 --out " + d + "/b.csv > /dev/null") == 0;
    out.require(ok, "simulate exits 0");
    out.require(ok && afm::read_text(d + "/a.csv") == afm::read_text(d + "/b.csv") &&
                    afm::read_text(d + "/a.csv.truth.json") == afm::read_text(d + "/b.csv.truth.json"),
                "simulate bit-exact across invocations");

    ok = run(q + " estimate " + d + "/a.csv --r 2 --out " + d + "/est1 > /dev/null") == 0 &&
         run(q + " estimate " + d + "/a.csv --r 2 --out " + d + "/est2 > /dev/null") == 0;
    out.require(ok && fs::exists(d + "/est1/scores.csv"), "simulate -> estimate writes scores");
    bool same = ok;
    for (const char* name : {"factors.csv", "loadings.csv", "eigenvalues.csv", "summary.csv", "scores.csv"}) {
        same = same && afm::read_text(d + "/est1/" + name) == afm::read_text(d + "/est2/" + name);
    }
    out.require(same, "estimate bit-exact across invocations");

    {
        std::FILE* f = std::fopen((d + "/bad.csv").c_str(), "w");
        std::fputs("t,series_1,series_2\n1,0.1,0.2\n2,0.3,oops\n", f);
        std::fclose(f);
    }
    const int code = run(q + " estimate " + d + "/bad.csv --r 1 --out " + d + "/bad 2> " + d + "/bad.err");
    const std::string message = afm::read_text(d + "/bad.err");
    out.require(code != 0 && message.find("row 3, column 3") != std::string::npos,
                "malformed CSV rejected at row 3, column 3");
    fs::remove_all(dir);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string exe = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 population NPC rate (T=500)", criterion1},
        {"2 PC loadings rate and gram gap", criterion2},
        {"3 sample NPC rate and fixed-T floor", criterion3},
        {"4 factor space at fixed T0=20", criterion4},
        {"5 eigenvalue sandwich and eigenvector gap", criterion5},
        {"6 sample eigenvector and coefficient rates", criterion6},
        {"7 first-order perturbation accuracy", criterion7},
        {"8 identities", criterion8},
        {"9 CLI contract", [&] { return criterion9(exe); }},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome.require(false, std::string("exception: ") + e.what());
        }
        if (!outcome.pass) ++failures;
        std::printf("%s criterion %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), outcome.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
