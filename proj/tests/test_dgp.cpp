#include <doctest.h>

#include <cmath>

#include "afm/dgp.hpp"
#include "afm/error.hpp"

using afm::ModelConfig;
using Eigen::MatrixXd;

TEST_SUITE("dgp") {

TEST_CASE("a single one-factor loading respects the uniform support") {
    ModelConfig config;
    config.r = 1;
    config.loading_half_widths = {std::sqrt(3.0)};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        config.seed = seed;
        const MatrixXd loadings = afm::draw_loadings(config, 1);
        REQUIRE(loadings.rows() == 1);
        CHECK(std::abs(loadings(0, 0)) <= std::sqrt(3.0));
    }
}

TEST_CASE("loadings gram approaches diag(w^2/3) for large n") {
    ModelConfig config = ModelConfig::canonical();
    config.n_max = 100000;
    const MatrixXd loadings = afm::draw_loadings(config, 100000);
    const MatrixXd gram = loadings.transpose() * loadings / 100000.0;
    MatrixXd target(2, 2);
    target << 2.0, 0.0, 0.0, 1.0;
    CHECK((gram - target).norm() < 0.05);
}

TEST_CASE("loadings and idiosyncratic columns are nested in n") {
    const ModelConfig config = ModelConfig::canonical();
    const MatrixXd small = afm::draw_loadings(config, 50);
    const MatrixXd large = afm::draw_loadings(config, 300);
    CHECK(small == large.topRows(50));
    const MatrixXd e_small = afm::draw_idiosyncratic(config, 51, 20, 3);
    const MatrixXd e_large = afm::draw_idiosyncratic(config, 400, 20, 3);
    CHECK(e_small == e_large.leftCols(51));
}

TEST_CASE("panels are bitwise reproducible and replicates differ only in F and e") {
    const ModelConfig config = ModelConfig::canonical();
    const auto a = afm::simulate_panel(config, 40, 30, 2);
    const auto b = afm::simulate_panel(config, 40, 30, 2);
    const auto c = afm::simulate_panel(config, 40, 30, 3);
    CHECK(a.observations == b.observations);
    CHECK(a.loadings == c.loadings);
    CHECK(a.factors != c.factors);
    CHECK(a.idio != c.idio);
    CHECK((a.observations - a.factors * a.loadings.transpose() - a.idio).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("factor columns have unit sample variance") {
    const auto panel = afm::simulate_panel(ModelConfig::canonical(), 400, 10000, 0);
    for (int j = 0; j < 2; ++j) {
        const double variance = panel.factors.col(j).squaredNorm() / 10000.0;
        CHECK(variance >= 0.95);
        CHECK(variance <= 1.05);
    }
}

TEST_CASE("idiosyncratic draws reproduce the AR(1) cross-sectional covariance") {
    const ModelConfig config = ModelConfig::canonical();
    const Eigen::Index T = 40000;
    const MatrixXd e = afm::draw_idiosyncratic(config, 6, T, 0);
    const MatrixXd empirical = e.transpose() * e / static_cast<double>(T);
    const MatrixXd exact = afm::idio_covariance(config, 6);
    CHECK((empirical - exact).cwiseAbs().maxCoeff() < 0.03);
    CHECK(exact(0, 3) == doctest::Approx(0.125));
}

TEST_CASE("top idiosyncratic eigenvalue matches a dense solve and the Toeplitz bound") {
    const ModelConfig config = ModelConfig::canonical();
    for (const Eigen::Index n : {1, 2, 7, 100, 400}) {
        const MatrixXd gamma = afm::idio_covariance(config, n);
        const double dense = Eigen::SelfAdjointEigenSolver<MatrixXd>(gamma).eigenvalues().maxCoeff();
        CHECK(afm::idio_top_eigenvalue(config, n) == doctest::Approx(dense).epsilon(1e-10));
        CHECK(dense <= 3.0);
    }
    CHECK(config.idio_eigenvalue_bound() == doctest::Approx(3.0));
}

TEST_CASE("zero idiosyncratic scale gives an exact rank-r panel") {
    ModelConfig config = ModelConfig::canonical();
    config.idio_sigma = 0.0;
    const auto panel = afm::simulate_panel(config, 30, 12, 0);
    CHECK(panel.idio.isZero(0.0));
    CHECK(afm::idio_top_eigenvalue(config, 30) == 0.0);
}

TEST_CASE("configuration errors") {
    ModelConfig config = ModelConfig::canonical();
    CHECK_THROWS_AS(afm::draw_loadings(config, 3201), afm::ConfigError);
    CHECK_THROWS_AS(afm::simulate_panel(config, 3201, 10, 0), afm::ConfigError);
    config.loading_half_widths = {1.0, 0.0};
    CHECK_THROWS_AS(afm::draw_loadings(config, 5), afm::ValidationError);
    config = ModelConfig::canonical();
    config.idio_rho = 1.0;
    CHECK_THROWS_AS(config.validate(), afm::ValidationError);
    config = ModelConfig::canonical();
    config.r = 3;
    CHECK_THROWS_AS(config.validate(), afm::ValidationError);
}

TEST_CASE("rotated loadings carry the rotated limit gram") {
    ModelConfig config = ModelConfig::canonical();
    const double c = std::cos(0.3), s = std::sin(0.3);
    config.loading_rotation.resize(2, 2);
    config.loading_rotation << c, -s, s, c;
    const MatrixXd gram = config.limit_loadings_gram();
    MatrixXd expected = config.loading_rotation.transpose() * Eigen::Vector2d(2.0, 1.0).asDiagonal() *
                        config.loading_rotation;
    CHECK((gram - expected).norm() < 1e-14);
    const MatrixXd unrotated = afm::draw_loadings(ModelConfig::canonical(), 10);
    CHECK((afm::draw_loadings(config, 10) - unrotated * config.loading_rotation).norm() < 1e-14);
}

}  // TEST_SUITE
