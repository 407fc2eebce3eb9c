#pragma once

#include <Eigen/Dense>

namespace afm {

/// Population second moments of y = C + e with F independent of e and E[F F'] = I.
struct CovariancePair {
    Eigen::MatrixXd gamma_y;
    Eigen::MatrixXd gamma_c;
    Eigen::MatrixXd gamma_e;
    Eigen::Index n = 0;
};

/// gamma_c = L L', gamma_y = gamma_c + gamma_e.
CovariancePair population_covariances(const Eigen::MatrixXd& loadings, const Eigen::MatrixXd& gamma_e);

/// L' L / n.
Eigen::MatrixXd loadings_gram(const Eigen::MatrixXd& loadings);

/// True iff every off-diagonal entry is at most tol in modulus.
bool is_gram_diagonal(const Eigen::MatrixXd& gram, double tol);

/// X' X / T without demeaning.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data);

/// A' B / T.
Eigen::MatrixXd sample_cross_moment(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Subtracts column means in place; only for ingested panels.
void demean_columns(Eigen::MatrixXd& data);

/// max |M - M'|.
double asymmetry(const Eigen::MatrixXd& m);

}  // namespace afm
