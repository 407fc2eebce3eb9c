#pragma once

#include <Eigen/Dense>

#include "afm/dgp.hpp"
#include "afm/spectra.hpp"

namespace afm {

enum class Source { population, sample };

/// Normalized principal components together with their loadings.
struct FactorEstimate {
    Eigen::MatrixXd factors;   ///< T x r
    Eigen::MatrixXd loadings;  ///< n x r, row i = P^i M^{1/2}
    EigenSystem eigen;
    Source source = Source::sample;
};

/// Limits of the normalized principal components and their loadings as n grows.
struct LimitObjects {
    Eigen::MatrixXd p_lambda;         ///< r x r orthonormal rows, sign-fixed
    Eigen::VectorXd d_lambda;         ///< descending eigenvalues of Gamma_Lambda
    Eigen::MatrixXd f_infinity;       ///< T x r, F * p_lambda'
    Eigen::MatrixXd lambda_infinity;  ///< n x r, Lambda * p_lambda'
};

/// The r x n coefficient matrix M^{-1/2} P; row j maps y_t to the j-th NPC.
Eigen::MatrixXd npc_coefficients(const EigenSystem& eigen);

/// Row t is M^{-1/2} P y_t.
Eigen::MatrixXd normalized_pcs(const EigenSystem& eigen, const Eigen::MatrixXd& data);

/// n x r matrix P' M^{1/2}.
Eigen::MatrixXd pc_loadings(const EigenSystem& eigen);

/**
 * Eigendecomposes the configuration's limit gram and maps the simulated
 * loadings and factors onto the limit representation. Rows of P_Lambda are
 * signed so the leading r x r block of Lambda P_Lambda' has a positive diagonal,
 * matching fix_signs() applied to eigenvectors of Gamma_y.
 */
LimitObjects limit_objects(const ModelConfig& config, const Eigen::MatrixXd& loadings, const Eigen::MatrixXd& factors);

/// Sample NPC estimator: eigensystem of the (non-demeaned) sample covariance.
FactorEstimate estimate_from_panel(const Eigen::MatrixXd& panel, int r);

/// (T^{-1} sum F_hat F') (T^{-1} sum F F')^{-1}.
Eigen::MatrixXd rotation_h(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& true_factors);

/**
 * Column signs (+1/-1) that align `path` with `reference` by the sign of their
 * in-sample inner product; multiply path columns by the result.
 */
Eigen::VectorXd alignment_signs(const Eigen::MatrixXd& path, const Eigen::MatrixXd& reference);

/// Mean over rows of the squared Euclidean row distance, after sign alignment.
double mean_squared_row_distance(const Eigen::MatrixXd& path, const Eigen::MatrixXd& reference);

}  // namespace afm
