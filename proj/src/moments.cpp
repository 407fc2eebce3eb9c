#include "afm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afm/error.hpp"

namespace afm {

namespace {

std::string shape(const Eigen::MatrixXd& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

double asymmetry(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ValidationError("matrix is not square: " + shape(m));
    if (m.size() == 0) return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

CovariancePair population_covariances(const Eigen::MatrixXd& loadings, const Eigen::MatrixXd& gamma_e) {
    const Eigen::Index n = loadings.rows();
    if (gamma_e.rows() != n || gamma_e.cols() != n) {
        throw ValidationError("gamma_e is " + shape(gamma_e) + " but loadings have " + std::to_string(n) + " rows");
    }
    if (asymmetry(gamma_e) > 1e-12 * std::max(1.0, gamma_e.cwiseAbs().maxCoeff())) {
        throw ValidationError("gamma_e is not symmetric");
    }
    CovariancePair pair;
    pair.n = n;
    pair.gamma_c.resize(n, n);
    // Rank-r product, formed symmetric by construction.
    pair.gamma_c.setZero();
    pair.gamma_c.selfadjointView<Eigen::Lower>().rankUpdate(loadings);
    pair.gamma_c.triangularView<Eigen::StrictlyUpper>() = pair.gamma_c.transpose();
    pair.gamma_e = gamma_e;
    pair.gamma_y = pair.gamma_c + pair.gamma_e;
    return pair;
}

Eigen::MatrixXd loadings_gram(const Eigen::MatrixXd& loadings) {
    if (loadings.rows() < 1) throw ValidationError("loadings_gram needs at least one row");
    Eigen::MatrixXd gram = loadings.transpose() * loadings;
    gram /= static_cast<double>(loadings.rows());
    return 0.5 * (gram + gram.transpose());
}

bool is_gram_diagonal(const Eigen::MatrixXd& gram, double tol) {
    if (gram.rows() != gram.cols()) throw ValidationError("gram is not square: " + shape(gram));
    for (Eigen::Index col = 0; col < gram.cols(); ++col) {
        for (Eigen::Index row = 0; row < gram.rows(); ++row) {
            if (row != col && std::abs(gram(row, col)) > tol) return false;
        }
    }
    return true;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data) {
    if (data.rows() < 1 || data.cols() < 1) throw ValidationError("sample_covariance on empty data " + shape(data));
    const Eigen::Index n = data.cols();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(data.transpose(), 1.0 / static_cast<double>(data.rows()));
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    return cov;
}

Eigen::MatrixXd sample_cross_moment(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows()) {
        throw ValidationError("sample_cross_moment: " + shape(a) + " and " + shape(b) + " differ in T");
    }
    if (a.rows() < 1) throw ValidationError("sample_cross_moment on empty data");
    Eigen::MatrixXd cross = a.transpose() * b;
    cross /= static_cast<double>(a.rows());
    return cross;
}

void demean_columns(Eigen::MatrixXd& data) {
    if (data.rows() < 1) return;
    data.rowwise() -= data.colwise().mean();
}

}  // namespace afm
