#include "afm/pca.hpp"

#include <cmath>
#include <string>

#include "afm/error.hpp"
#include "afm/moments.hpp"

namespace afm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd npc_coefficients(const EigenSystem& eigen) {
    const int r = eigen.rank();
    VectorXd inv_root(r);
    for (int j = 0; j < r; ++j) {
        if (!(eigen.values(j) > 0.0)) {
            throw NumericalError("eigenvalue " + std::to_string(j) + " is not positive; NPCs undefined",
                                 std::numeric_limits<double>::infinity());
        }
        inv_root(j) = 1.0 / std::sqrt(eigen.values(j));
    }
    return inv_root.asDiagonal() * eigen.vectors;
}

MatrixXd normalized_pcs(const EigenSystem& eigen, const MatrixXd& data) {
    if (data.cols() != eigen.dimension) {
        throw ValidationError("data has " + std::to_string(data.cols()) + " series but the eigen system has dimension " +
                              std::to_string(eigen.dimension));
    }
    return data * npc_coefficients(eigen).transpose();
}

MatrixXd pc_loadings(const EigenSystem& eigen) {
    const int r = eigen.rank();
    VectorXd root(r);
    for (int j = 0; j < r; ++j) root(j) = std::sqrt(std::max(eigen.values(j), 0.0));
    return eigen.vectors.transpose() * root.asDiagonal();
}

LimitObjects limit_objects(const ModelConfig& config, const MatrixXd& loadings, const MatrixXd& factors) {
    config.validate();
    const int r = config.r;
    if (loadings.cols() != r || factors.cols() != r) throw ValidationError("loadings and factors need r columns");
    if (loadings.rows() < r) throw ValidationError("limit_objects needs at least r loadings rows");

    const MatrixXd gram = config.limit_loadings_gram();
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(gram);
    LimitObjects limit;
    limit.d_lambda = solver.eigenvalues().reverse();
    limit.p_lambda = solver.eigenvectors().rowwise().reverse().transpose();
    const double scale = limit.d_lambda.cwiseAbs().maxCoeff();
    for (int j = 0; j + 1 < r; ++j) {
        if (limit.d_lambda(j) - limit.d_lambda(j + 1) < kDegeneracyTolerance * scale) {
            throw ConfigError("limit loadings gram has repeated eigenvalue " + std::to_string(limit.d_lambda(j)));
        }
    }
    const VectorXd signs = convention_signs(loadings * limit.p_lambda.transpose());
    limit.p_lambda = signs.asDiagonal() * limit.p_lambda;
    // Exact (unsigned) zeros keep the canonical diagonal case exactly diagonal.
    limit.p_lambda = (limit.p_lambda.array().abs() < 1e-15).select(0.0, limit.p_lambda);
    limit.f_infinity = factors * limit.p_lambda.transpose();
    limit.lambda_infinity = loadings * limit.p_lambda.transpose();
    return limit;
}

FactorEstimate estimate_from_panel(const MatrixXd& panel, int r) {
    const Index T = panel.rows();
    const Index n = panel.cols();
    if (r < 1 || r > std::min(n, T)) {
        throw ValidationError("r = " + std::to_string(r) + " must lie in [1, min(n, T)] = [1, " +
                              std::to_string(std::min(n, T)) + "]");
    }
    FactorEstimate estimate;
    estimate.source = Source::sample;
    estimate.eigen = top_r_eigs_of_sample_covariance(panel, r);
    estimate.factors = normalized_pcs(estimate.eigen, panel);
    estimate.loadings = pc_loadings(estimate.eigen);
    return estimate;
}

MatrixXd rotation_h(const MatrixXd& estimated, const MatrixXd& true_factors) {
    if (estimated.rows() != true_factors.rows()) throw ValidationError("rotation_h: paths differ in T");
    const Index T = true_factors.rows();
    const Index r = true_factors.cols();
    if (T < r) {
        throw ValidationError("rotation_h: T = " + std::to_string(T) + " < r = " + std::to_string(r) +
                              " makes the factor gram singular");
    }
    const MatrixXd cross = sample_cross_moment(estimated, true_factors);
    const MatrixXd gram = sample_covariance(true_factors);
    Eigen::JacobiSVD<MatrixXd> svd(gram);
    const VectorXd singular = svd.singularValues();
    const double condition = singular(singular.size() - 1) > 0.0
                                 ? singular(0) / singular(singular.size() - 1)
                                 : std::numeric_limits<double>::infinity();
    if (!(condition < 1e12)) {
        throw NumericalError("rotation_h: factor gram is singular (condition number " + std::to_string(condition) + ")",
                             condition);
    }
    // cross * gram^{-1} via a solve on the symmetric gram.
    return gram.ldlt().solve(cross.transpose()).transpose();
}

VectorXd alignment_signs(const MatrixXd& path, const MatrixXd& reference) {
    if (path.rows() != reference.rows() || path.cols() != reference.cols()) {
        throw ValidationError("alignment_signs: shape mismatch");
    }
    VectorXd signs(path.cols());
    for (Index j = 0; j < path.cols(); ++j) signs(j) = path.col(j).dot(reference.col(j)) < 0.0 ? -1.0 : 1.0;
    return signs;
}

double mean_squared_row_distance(const MatrixXd& path, const MatrixXd& reference) {
    const VectorXd signs = alignment_signs(path, reference);
    return (path * signs.asDiagonal() - reference).rowwise().squaredNorm().mean();
}

}  // namespace afm
