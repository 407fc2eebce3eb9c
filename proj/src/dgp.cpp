#include "afm/dgp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "afm/error.hpp"
#include "afm/rng.hpp"

namespace afm {

namespace {

constexpr Index kMaxCounter = std::numeric_limits<std::uint32_t>::max();

void check_counter_range(Index value, const char* what) {
    if (value < 1 || value > kMaxCounter) {
        throw ValidationError(std::string(what) + " must lie in [1, 2^32 - 1], got " + std::to_string(value));
    }
}

}  // namespace

void ModelConfig::validate() const {
    if (r < 1) throw ValidationError("r must be positive, got " + std::to_string(r));
    if (n_max < 1 || n_max > kMaxCounter) throw ValidationError("n_max out of range: " + std::to_string(n_max));
    if (loading_half_widths.size() != static_cast<std::size_t>(r)) {
        throw ValidationError("loading_half_widths has " + std::to_string(loading_half_widths.size()) +
                              " entries, expected r = " + std::to_string(r));
    }
    for (std::size_t j = 0; j < loading_half_widths.size(); ++j) {
        const double w = loading_half_widths[j];
        if (!std::isfinite(w) || w <= 0.0) {
            throw ValidationError("loading_half_widths[" + std::to_string(j) + "] must be positive, got " +
                                  std::to_string(w));
        }
    }
    if (!std::isfinite(idio_rho) || idio_rho < 0.0 || idio_rho >= 1.0) {
        throw ValidationError("idio_rho must lie in [0, 1), got " + std::to_string(idio_rho));
    }
    if (!std::isfinite(idio_sigma) || idio_sigma < 0.0) {
        throw ValidationError("idio_sigma must be nonnegative, got " + std::to_string(idio_sigma));
    }
    if (loading_rotation.size() != 0) {
        if (loading_rotation.rows() != r || loading_rotation.cols() != r) {
            throw ValidationError("loading_rotation must be r x r");
        }
        const Eigen::MatrixXd gram = loading_rotation.transpose() * loading_rotation;
        if ((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-10) {
            throw ValidationError("loading_rotation must be orthonormal");
        }
    }
}

Eigen::MatrixXd ModelConfig::limit_loadings_gram() const {
    Eigen::VectorXd variances(r);
    for (int j = 0; j < r; ++j) variances(j) = loading_half_widths[j] * loading_half_widths[j] / 3.0;
    Eigen::MatrixXd gram = variances.asDiagonal();
    if (loading_rotation.size() != 0) gram = loading_rotation.transpose() * gram * loading_rotation;
    return gram;
}

double ModelConfig::idio_eigenvalue_bound() const {
    return idio_sigma * idio_sigma * (1.0 + idio_rho) / (1.0 - idio_rho);
}

ModelConfig ModelConfig::canonical(std::uint64_t seed) {
    ModelConfig config;
    config.r = 2;
    config.n_max = 3200;
    config.loading_half_widths = {std::sqrt(6.0), std::sqrt(3.0)};
    config.idio_rho = 0.5;
    config.idio_sigma = 1.0;
    config.seed = seed;
    return config;
}

Eigen::MatrixXd draw_loadings(const ModelConfig& config, Index n) {
    config.validate();
    check_counter_range(n, "n");
    if (n > config.n_max) {
        throw ConfigError("n = " + std::to_string(n) + " exceeds n_max = " + std::to_string(config.n_max));
    }
    const rng::KeyedStream stream(config.seed, rng::Stream::loadings);
    Eigen::MatrixXd uniform(n, config.r);
    for (int j = 0; j < config.r; ++j) {
        const double w = config.loading_half_widths[j];
        for (Index i = 0; i < n; ++i) {
            const double u = stream.uniform(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0);
            uniform(i, j) = w * (2.0 * u - 1.0);
        }
    }
    if (config.loading_rotation.size() == 0) return uniform;
    return uniform * config.loading_rotation;
}

Eigen::MatrixXd idio_covariance(const ModelConfig& config, Index n) {
    config.validate();
    check_counter_range(n, "n");
    const double variance = config.idio_sigma * config.idio_sigma;
    Eigen::VectorXd decay(n);
    decay(0) = variance;
    for (Index k = 1; k < n; ++k) decay(k) = decay(k - 1) * config.idio_rho;
    Eigen::MatrixXd gamma(n, n);
    for (Index col = 0; col < n; ++col) {
        for (Index row = 0; row < n; ++row) gamma(row, col) = decay(std::abs(row - col));
    }
    return gamma;
}

double idio_top_eigenvalue(const ModelConfig& config, Index n) {
    config.validate();
    check_counter_range(n, "n");
    const double variance = config.idio_sigma * config.idio_sigma;
    if (variance == 0.0) return 0.0;
    const double rho = config.idio_rho;
    if (n == 1 || rho == 0.0) return variance;
    // Gamma_e^{-1} = tridiag(-rho, [1, 1+rho^2, ..., 1+rho^2, 1], -rho) / (sigma^2 (1 - rho^2)).
    Eigen::VectorXd diagonal = Eigen::VectorXd::Constant(n, 1.0 + rho * rho);
    diagonal(0) = 1.0;
    diagonal(n - 1) = 1.0;
    Eigen::VectorXd off_diagonal = Eigen::VectorXd::Constant(n - 1, -rho);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diagonal, off_diagonal, Eigen::EigenvaluesOnly);
    const double smallest = solver.eigenvalues()(0);
    return variance * (1.0 - rho * rho) / smallest;
}

Eigen::MatrixXd draw_factors(const ModelConfig& config, Index T, std::uint32_t replicate) {
    config.validate();
    check_counter_range(T, "T");
    const rng::KeyedStream stream(config.seed, rng::Stream::factors);
    Eigen::MatrixXd factors(T, config.r);
    for (Index t = 0; t < T; ++t) {
        for (int j = 0; j < config.r; j += 2) {
            const auto [z0, z1] = stream.normal_pair(replicate, static_cast<std::uint32_t>(t),
                                                     static_cast<std::uint32_t>(j / 2));
            factors(t, j) = z0;
            if (j + 1 < config.r) factors(t, j + 1) = z1;
        }
    }
    return factors;
}

Eigen::MatrixXd draw_idiosyncratic(const ModelConfig& config, Index n, Index T, std::uint32_t replicate) {
    config.validate();
    check_counter_range(n, "n");
    check_counter_range(T, "T");
    Eigen::MatrixXd idio(T, n);
    if (config.idio_sigma == 0.0) {
        idio.setZero();
        return idio;
    }
    const rng::KeyedStream stream(config.seed, rng::Stream::idiosyncratic);
    const double rho = config.idio_rho;
    const double sigma = config.idio_sigma;
    const double innovation_scale = sigma * std::sqrt(1.0 - rho * rho);
    // Columns are filled in pairs sharing one Philox block; the AR(1) recursion
    // runs across the cross-section, so column i never depends on n.
    for (Index i = 0; i < n; i += 2) {
        const auto pair = static_cast<std::uint32_t>(i / 2);
        for (Index t = 0; t < T; ++t) {
            const auto [z0, z1] = stream.normal_pair(replicate, static_cast<std::uint32_t>(t), pair);
            const double first = i == 0 ? sigma * z0 : rho * idio(t, i - 1) + innovation_scale * z0;
            idio(t, i) = first;
            if (i + 1 < n) idio(t, i + 1) = rho * first + innovation_scale * z1;
        }
    }
    return idio;
}

SyntheticPanel simulate_panel(const ModelConfig& config, Index n, Index T, std::uint32_t replicate) {
    config.validate();
    if (n > config.n_max) {
        throw ConfigError("n = " + std::to_string(n) + " exceeds n_max = " + std::to_string(config.n_max));
    }
    if (static_cast<double>(n) * static_cast<double>(T) > 4.0e9) {
        throw ValidationError("panel of " + std::to_string(T) + " x " + std::to_string(n) + " is too large");
    }
    SyntheticPanel panel;
    panel.config = config;
    panel.replicate = replicate;
    panel.loadings = draw_loadings(config, n);
    panel.factors = draw_factors(config, T, replicate);
    panel.idio = draw_idiosyncratic(config, n, T, replicate);
    panel.observations.noalias() = panel.factors * panel.loadings.transpose();
    panel.observations += panel.idio;
    return panel;
}

}  // namespace afm
