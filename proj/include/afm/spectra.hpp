#pragma once

#include <limits>

#include <Eigen/Dense>

namespace afm {

/**
 * @brief Leading eigenpairs of a symmetric matrix.
 *
 * `vectors` holds orthonormal row eigenvectors (r x n), ordered so that
 * `values` is descending. After fix_signs() the diagonal of the leading
 * r x r block of vectors' * diag(values)^{1/2} is nonnegative.
 */
struct EigenSystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Eigen::Index dimension = 0;
    /// (r+1)-th eigenvalue, or NaN when r == n. Iterative paths report the
    /// Ritz estimate, which can only underestimate it.
    double next_value = std::numeric_limits<double>::quiet_NaN();
    /// Smallest consecutive difference among values and values[r-1] - next_value.
    double gap = std::numeric_limits<double>::quiet_NaN();
    /// Set when two of the top r+1 eigenvalues agree within 1e-10 (relative).
    bool degenerate = false;

    int rank() const { return static_cast<int>(values.size()); }
};

/// All eigenpairs, descending; row l of `vectors` is p_l.
/// Each row's first entry of largest modulus is positive.
struct FullEigenSystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

/// Threshold on |A - A'|_max above which a matrix is rejected as non-symmetric.
inline constexpr double kSymmetryTolerance = 1e-8;

/// Relative eigenvalue separation below which two eigenvalues count as equal.
inline constexpr double kDegeneracyTolerance = 1e-10;

/// Top r eigenpairs of symmetric `a`, sign-fixed. Deterministic.
EigenSystem top_r_eigs(const Eigen::MatrixXd& a, int r);

/**
 * Top r eigenpairs of data' data / T without necessarily forming it.
 * Mathematically identical to top_r_eigs(sample_covariance(data), r).
 */
EigenSystem top_r_eigs_of_sample_covariance(const Eigen::MatrixXd& data, int r);

/// Applies the sign convention; idempotent and invariant to row sign flips of the input.
EigenSystem fix_signs(EigenSystem system);

/**
 * Per-column signs (+1/-1) making the diagonal of the leading block of
 * `loadings` positive; a diagonal entry within 1e-12 of zero defers to the
 * first entry of largest modulus in its column.
 */
Eigen::VectorXd convention_signs(const Eigen::MatrixXd& loadings);

/// Dense full eigendecomposition.
FullEigenSystem full_eigs(const Eigen::MatrixXd& a);

/// First-order change of p_j under a -> a + delta (j is 0-based).
Eigen::VectorXd wilkinson_vector_shift(const FullEigenSystem& base, const Eigen::MatrixXd& delta, Eigen::Index j);

/// First-order change p_j delta p_j' of mu_j (j is 0-based).
double wilkinson_value_shift(const FullEigenSystem& base, const Eigen::MatrixXd& delta, Eigen::Index j);

/// max |P P' - I|.
double orthonormality_defect(const Eigen::MatrixXd& rows);

}  // namespace afm
