#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace afm {

using Index = Eigen::Index;

/// Default seed. Its first two loadings rows have a positive diagonal, so the
/// canonical P_Lambda is exactly I_2 under the sign convention.
inline constexpr std::uint64_t kDefaultSeed = 9;

/**
 * @brief Parametrization of the synthetic factor-model DGP.
 *
 * Loadings are U * R with U_ij ~ Uniform[-w_j, w_j] and R an optional fixed
 * orthonormal r x r rotation (identity when empty). Factors are i.i.d.
 * N(0, I_r); the idiosyncratic vector has covariance
 * sigma^2 * rho^|i-k| (a stationary AR(1) across the cross-section).
 */
struct ModelConfig {
    int r = 2;
    Index n_max = 3200;
    std::vector<double> loading_half_widths{2.449489742783178, 1.7320508075688772};
    double idio_rho = 0.5;
    double idio_sigma = 1.0;
    std::uint64_t seed = kDefaultSeed;
    Eigen::MatrixXd loading_rotation;  ///< empty means identity

    /// Throws ValidationError on malformed fields.
    void validate() const;

    /// Limit loadings gram Gamma_Lambda = R' diag(w_j^2 / 3) R.
    Eigen::MatrixXd limit_loadings_gram() const;

    /// Upper bound sigma^2 (1 + rho) / (1 - rho) on the top idiosyncratic eigenvalue.
    double idio_eigenvalue_bound() const;

    /// r=2, w=(sqrt 6, sqrt 3), rho=0.5, sigma=1: Gamma_Lambda = diag(2, 1).
    static ModelConfig canonical(std::uint64_t seed = kDefaultSeed);
};

struct SyntheticPanel {
    Eigen::MatrixXd loadings;      ///< n x r, the first n rows of the seed's loadings
    Eigen::MatrixXd factors;       ///< T x r
    Eigen::MatrixXd idio;          ///< T x n
    Eigen::MatrixXd observations;  ///< T x n, factors * loadings' + idio
    ModelConfig config;
    std::uint32_t replicate = 0;
};

/// n x r loadings; row i depends only on (seed, i), never on n.
Eigen::MatrixXd draw_loadings(const ModelConfig& config, Index n);

/// Gamma_e with entries sigma^2 rho^|i-k|.
Eigen::MatrixXd idio_covariance(const ModelConfig& config, Index n);

/// mu_1(Gamma_e), computed from the tridiagonal inverse of the AR(1) covariance.
double idio_top_eigenvalue(const ModelConfig& config, Index n);

/// T x r standard normal factors for a replicate.
Eigen::MatrixXd draw_factors(const ModelConfig& config, Index T, std::uint32_t replicate);

/// T x n idiosyncratic draws; column i depends only on (seed, replicate, columns <= i).
Eigen::MatrixXd draw_idiosyncratic(const ModelConfig& config, Index n, Index T, std::uint32_t replicate);

SyntheticPanel simulate_panel(const ModelConfig& config, Index n, Index T, std::uint32_t replicate);

}  // namespace afm
