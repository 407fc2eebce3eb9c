#include <doctest.h>

#include <cmath>

#include "afm/dgp.hpp"
#include "afm/error.hpp"
#include "afm/moments.hpp"
#include "afm/pca.hpp"
#include "afm/spectra.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double mean_sq_to(const MatrixXd& path, const MatrixXd& target) {
    return afm::mean_squared_row_distance(path, target);
}

}  // namespace

TEST_SUITE("pca") {

TEST_CASE("diagonal noiseless model recovers the factors exactly") {
    MatrixXd l(2, 2);
    l << 2.0, 0.0, 0.0, 1.0;
    const auto pair = afm::population_covariances(l, MatrixXd::Zero(2, 2));
    const auto eigen = afm::top_r_eigs(pair.gamma_y, 2);
    const MatrixXd f = afm::draw_factors(afm::ModelConfig::canonical(), 25, 0);
    const MatrixXd y = f * l.transpose();
    CHECK((afm::normalized_pcs(eigen, y) - f).norm() < 1e-13);
    CHECK(afm::normalized_pcs(eigen, MatrixXd::Zero(4, 2)).isZero(0.0));
    CHECK((afm::pc_loadings(eigen) - l).norm() < 1e-14);
    CHECK_THROWS_AS(afm::normalized_pcs(eigen, MatrixXd::Zero(4, 3)), afm::ValidationError);
}

TEST_CASE("designed orthogonal loadings make the common-component NPCs exact") {
    // Columns orthogonal with gram exactly diag(2, 1).
    const Eigen::Index n = 64;
    MatrixXd l(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        l(i, 0) = std::sqrt(2.0) * (i % 2 == 0 ? 1.0 : -1.0);
        l(i, 1) = (i % 4 < 2) ? 1.0 : -1.0;
    }
    CHECK((afm::loadings_gram(l) - Eigen::Vector2d(2.0, 1.0).asDiagonal().toDenseMatrix()).norm() < 1e-14);
    const auto config = afm::ModelConfig::canonical();
    const MatrixXd f = afm::draw_factors(config, 40, 0);
    const auto pair = afm::population_covariances(l, MatrixXd::Zero(n, n));
    const auto limit = afm::limit_objects(config, l, f);
    const MatrixXd npc = afm::normalized_pcs(afm::top_r_eigs(pair.gamma_c, 2), f * l.transpose());
    CHECK(std::sqrt(mean_sq_to(npc, limit.f_infinity)) < 1e-12);
    const MatrixXd loadings = afm::pc_loadings(afm::top_r_eigs(pair.gamma_c, 2));
    const MatrixXd aligned = loadings * afm::alignment_signs(loadings, limit.lambda_infinity).asDiagonal();
    CHECK((aligned - limit.lambda_infinity).norm() < 1e-12);
}

TEST_CASE("pc loadings reproduce the eigenvalues") {
    const auto config = afm::ModelConfig::canonical();
    const auto pair = afm::population_covariances(afm::draw_loadings(config, 80), afm::idio_covariance(config, 80));
    const auto eigen = afm::top_r_eigs(pair.gamma_y, 2);
    const MatrixXd loadings = afm::pc_loadings(eigen);
    CHECK((loadings.transpose() * loadings - MatrixXd(eigen.values.asDiagonal())).norm() < 1e-9);
}

TEST_CASE("canonical limit objects") {
    const auto config = afm::ModelConfig::canonical();
    const auto panel = afm::simulate_panel(config, 50, 30, 0);
    const auto limit = afm::limit_objects(config, panel.loadings, panel.factors);
    CHECK(limit.p_lambda == MatrixXd::Identity(2, 2));
    CHECK(limit.d_lambda(0) == doctest::Approx(2.0));
    CHECK(limit.d_lambda(1) == doctest::Approx(1.0));
    CHECK(limit.f_infinity == panel.factors);
    CHECK(limit.lambda_infinity == panel.loadings);

    afm::ModelConfig repeated = config;
    repeated.loading_half_widths = {std::sqrt(3.0), std::sqrt(3.0)};
    CHECK_THROWS_AS(afm::limit_objects(repeated, panel.loadings, panel.factors), afm::ConfigError);
}

TEST_CASE("rotated loadings: P_Lambda undoes the rotation up to sign") {
    afm::ModelConfig config = afm::ModelConfig::canonical();
    const double c = std::cos(0.7), s = std::sin(0.7);
    config.loading_rotation.resize(2, 2);
    config.loading_rotation << c, -s, s, c;
    const auto panel = afm::simulate_panel(config, 200, 30, 0);
    const auto limit = afm::limit_objects(config, panel.loadings, panel.factors);
    // Brute force: eigenvectors of R' D R are the rows of R.
    const MatrixXd product = limit.p_lambda * config.loading_rotation.transpose();
    CHECK((product.cwiseAbs() - MatrixXd::Identity(2, 2)).norm() < 1e-12);
    CHECK((limit.p_lambda * config.limit_loadings_gram() * limit.p_lambda.transpose() -
           MatrixXd(limit.d_lambda.asDiagonal()))
              .norm() < 1e-12);
    // The unrotated draw carries the same F_infinity up to column signs.
    const auto plain = afm::simulate_panel(afm::ModelConfig::canonical(), 200, 30, 0);
    const auto plain_limit = afm::limit_objects(afm::ModelConfig::canonical(), plain.loadings, plain.factors);
    CHECK(mean_sq_to(limit.lambda_infinity, plain_limit.lambda_infinity) < 1e-24);
}

TEST_CASE("population NPC and loadings errors shrink with n") {
    const auto config = afm::ModelConfig::canonical();
    double npc_error[2];
    double loading_error[2];
    const Eigen::Index ns[2] = {400, 1600};
    for (int k = 0; k < 2; ++k) {
        const auto panel = afm::simulate_panel(config, ns[k], 500, 0);
        const auto pair = afm::population_covariances(panel.loadings, afm::idio_covariance(config, ns[k]));
        const auto eigen = afm::top_r_eigs(pair.gamma_y, 2);
        const auto limit = afm::limit_objects(config, panel.loadings, panel.factors);
        npc_error[k] = mean_sq_to(afm::normalized_pcs(eigen, panel.observations), limit.f_infinity);
        MatrixXd loadings = afm::pc_loadings(eigen);
        loadings = loadings * afm::alignment_signs(loadings, limit.lambda_infinity).asDiagonal();
        loading_error[k] = (loadings.row(0) - limit.lambda_infinity.row(0)).norm();
    }
    CHECK(npc_error[1] < npc_error[0]);
    CHECK(loading_error[1] < loading_error[0]);
}

TEST_CASE("sample estimator identities") {
    const auto config = afm::ModelConfig::canonical();
    const auto panel = afm::simulate_panel(config, 200, 200, 0);
    const auto estimate = afm::estimate_from_panel(panel.observations, 2);
    CHECK((afm::sample_covariance(estimate.factors) - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(afm::orthonormality_defect(estimate.eigen.vectors) < 1e-10);
    CHECK_THROWS_AS(afm::estimate_from_panel(panel.observations, 201), afm::ValidationError);
    CHECK_THROWS_AS(afm::estimate_from_panel(panel.observations.leftCols(1), 2), afm::ValidationError);

    // Flipping an eigenvector before re-fixing leaves the NPCs unchanged.
    auto flipped = estimate.eigen;
    flipped.vectors.row(1) *= -1.0;
    CHECK(afm::normalized_pcs(afm::fix_signs(flipped), panel.observations) == estimate.factors);
}

TEST_CASE("noiseless panel: the estimated factors span F exactly") {
    afm::ModelConfig config = afm::ModelConfig::canonical();
    config.idio_sigma = 0.0;
    const auto panel = afm::simulate_panel(config, 60, 25, 0);
    const auto estimate = afm::estimate_from_panel(panel.observations, 2);
    const MatrixXd& fh = estimate.factors;
    const MatrixXd projected = fh * (fh.transpose() * fh).ldlt().solve(fh.transpose() * panel.factors);
    CHECK((projected - panel.factors).norm() < 1e-8);
    const MatrixXd h = afm::rotation_h(fh, panel.factors);
    CHECK((fh - panel.factors * h.transpose()).norm() < 1e-8);
    const MatrixXd fitted = estimate.factors * estimate.loadings.transpose();
    CHECK((panel.observations - fitted).norm() / panel.observations.norm() < 1e-6);
}

TEST_CASE("sample NPC error shrinks on the coupled design") {
    const auto config = afm::ModelConfig::canonical();
    double error[2];
    const Eigen::Index ns[2] = {800, 3200};
    for (int k = 0; k < 2; ++k) {
        const auto panel = afm::simulate_panel(config, ns[k], ns[k], 0);
        const auto limit = afm::limit_objects(config, panel.loadings, panel.factors);
        error[k] = mean_sq_to(afm::estimate_from_panel(panel.observations, 2).factors, limit.f_infinity);
    }
    CHECK(error[1] < error[0]);
}

TEST_CASE("rotation_h") {
    const auto config = afm::ModelConfig::canonical();
    const MatrixXd f = afm::draw_factors(config, 50, 0);
    CHECK((afm::rotation_h(f, f) - MatrixXd::Identity(2, 2)).norm() < 1e-12);
    MatrixXd r(2, 2);
    r << 0.6, -0.8, 0.8, 0.6;
    CHECK((afm::rotation_h(f * r.transpose(), f) - r).norm() < 1e-12);
    CHECK_THROWS_AS(afm::rotation_h(f.topRows(1), f.topRows(1)), afm::ValidationError);
    MatrixXd collinear(5, 2);
    collinear.col(0) = f.col(0).head(5);
    collinear.col(1) = 2.0 * f.col(0).head(5);
    try {
        afm::rotation_h(collinear, collinear);
        FAIL("expected NumericalError");
    } catch (const afm::NumericalError& e) {
        CHECK(e.condition_number() >= 1e12);
    }
}

TEST_CASE("estimated rotation approaches P_Lambda") {
    const auto config = afm::ModelConfig::canonical();
    const auto panel = afm::simulate_panel(config, 1600, 1600, 0);
    const auto limit = afm::limit_objects(config, panel.loadings, panel.factors);
    REQUIRE(limit.p_lambda == MatrixXd::Identity(2, 2));
    const MatrixXd h = afm::rotation_h(afm::estimate_from_panel(panel.observations, 2).factors, panel.factors);
    CHECK((h - limit.p_lambda).norm() < 0.1);
}

}  // TEST_SUITE
