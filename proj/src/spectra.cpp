#include "afm/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "afm/error.hpp"
#include "afm/moments.hpp"
#include "afm/rng.hpp"

namespace afm {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense solver below this dimension; block subspace iteration above.
constexpr Index kDenseLimit = 400;
constexpr int kMaxIterations = 2000;
constexpr double kResidualTolerance = 1e-11;

using Operator = std::function<MatrixXd(const MatrixXd&)>;

void check_rank(Index n, int r) {
    if (r < 1) throw ValidationError("r must be positive, got " + std::to_string(r));
    if (r > n) throw ValidationError("r = " + std::to_string(r) + " exceeds dimension " + std::to_string(n));
}

void finalize(EigenSystem& system) {
    const int r = system.rank();
    const double scale = std::max(1.0, std::abs(system.values(0)));
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j + 1 < r; ++j) gap = std::min(gap, system.values(j) - system.values(j + 1));
    if (!std::isnan(system.next_value)) gap = std::min(gap, system.values(r - 1) - system.next_value);
    system.gap = gap;
    system.degenerate = std::isfinite(gap) && gap < kDegeneracyTolerance * scale;
}

EigenSystem from_dense(const MatrixXd& a, int r) {
    const Index n = a.rows();
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed", 0.0);
    EigenSystem system;
    system.dimension = n;
    system.values.resize(r);
    system.vectors.resize(r, n);
    for (int j = 0; j < r; ++j) {
        system.values(j) = solver.eigenvalues()(n - 1 - j);
        system.vectors.row(j) = solver.eigenvectors().col(n - 1 - j).transpose();
    }
    if (r < n) system.next_value = solver.eigenvalues()(n - 1 - r);
    return system;
}

MatrixXd start_block(Index n, Index k) {
    const rng::KeyedStream stream(0x5EED0F5Bu, rng::Stream::solver_start);
    MatrixXd start(n, k);
    for (Index col = 0; col < k; ++col) {
        for (Index row = 0; row < n; ++row) {
            start(row, col) = stream.normal_pair(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(col),
                                                 static_cast<std::uint32_t>(row))
                                  .first;
        }
    }
    return start;
}

MatrixXd orthonormalize(const MatrixXd& block) {
    Eigen::HouseholderQR<MatrixXd> qr(block);
    return qr.householderQ() * MatrixXd::Identity(block.rows(), block.cols());
}

// Block subspace iteration with Rayleigh-Ritz extraction. Returns false when
// the top r residuals fail to converge.
bool subspace_iteration(const Operator& apply, Index n, int r, EigenSystem& out) {
    const Index block = std::min<Index>(n, std::max<Index>(2 * r, r + 8));
    MatrixXd basis = orthonormalize(start_block(n, block));
    VectorXd ritz;
    MatrixXd image;
    double best = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int iteration = 0; iteration < kMaxIterations; ++iteration) {
        image = apply(basis);
        MatrixXd projected = basis.transpose() * image;
        projected = 0.5 * (projected + projected.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> small(projected);
        // Descending order.
        const MatrixXd rotation = small.eigenvectors().rowwise().reverse();
        ritz = small.eigenvalues().reverse();
        basis = basis * rotation;
        image = image * rotation;

        const double scale = std::max(std::abs(ritz(0)), std::numeric_limits<double>::min());
        double worst = 0.0;
        for (int j = 0; j < r; ++j) {
            worst = std::max(worst, (image.col(j) - ritz(j) * basis.col(j)).norm());
        }
        // Rounding can floor the residual just above tolerance; accept a
        // stalled residual once it is small enough for 1e-8 relative accuracy.
        if (worst < 0.5 * best) {
            best = worst;
            stalled = 0;
        } else {
            ++stalled;
        }
        const bool stagnated = stalled >= 20 && worst <= 1e-8 * scale;
        if (worst <= kResidualTolerance * scale || stagnated || ritz(0) == 0.0) {
            out.dimension = n;
            out.values = ritz.head(r);
            out.vectors = basis.leftCols(r).transpose();
            out.next_value = r < n ? ritz(r) : std::numeric_limits<double>::quiet_NaN();
            return true;
        }
        basis = orthonormalize(image);
    }
    return false;
}

}  // namespace

double orthonormality_defect(const MatrixXd& rows) {
    return (rows * rows.transpose() - MatrixXd::Identity(rows.rows(), rows.rows())).cwiseAbs().maxCoeff();
}

Eigen::VectorXd convention_signs(const MatrixXd& loadings) {
    const Index r = loadings.cols();
    if (loadings.rows() < r) throw ValidationError("sign convention needs at least r rows");
    VectorXd signs = VectorXd::Ones(r);
    for (Index j = 0; j < r; ++j) {
        double pivot = loadings(j, j);
        if (std::abs(pivot) <= 1e-12) {
            Index best = 0;
            loadings.col(j).cwiseAbs().maxCoeff(&best);
            pivot = loadings(best, j);
        }
        if (pivot < 0.0) signs(j) = -1.0;
    }
    return signs;
}

EigenSystem fix_signs(EigenSystem system) {
    const int r = system.rank();
    if (system.vectors.rows() != r) throw ValidationError("eigen system has inconsistent shapes");
    VectorXd root(r);
    for (int j = 0; j < r; ++j) root(j) = std::sqrt(std::max(system.values(j), 0.0));
    const MatrixXd loadings = system.vectors.transpose() * root.asDiagonal();
    const VectorXd signs = convention_signs(loadings);
    for (int j = 0; j < r; ++j) {
        if (signs(j) < 0.0) system.vectors.row(j) *= -1.0;
    }
    return system;
}

EigenSystem top_r_eigs(const MatrixXd& a, int r) {
    if (a.rows() != a.cols()) throw ValidationError("top_r_eigs needs a square matrix");
    const Index n = a.rows();
    check_rank(n, r);
    const double skew = asymmetry(a);
    if (skew > kSymmetryTolerance) {
        throw ValidationError("matrix is not symmetric: max |A - A'| = " + std::to_string(skew));
    }
    EigenSystem system;
    if (n <= kDenseLimit) {
        system = from_dense(a, r);
    } else {
        const Operator apply = [&a](const MatrixXd& x) -> MatrixXd {
            return a.selfadjointView<Eigen::Lower>() * x;
        };
        if (!subspace_iteration(apply, n, r, system)) system = from_dense(a, r);
    }
    finalize(system);
    return fix_signs(std::move(system));
}

EigenSystem top_r_eigs_of_sample_covariance(const MatrixXd& data, int r) {
    const Index T = data.rows();
    const Index n = data.cols();
    if (T < 1 || n < 1) throw ValidationError("empty panel");
    check_rank(n, r);
    const double inv_t = 1.0 / static_cast<double>(T);
    EigenSystem system;
    bool done = false;
    if (n <= kDenseLimit) {
        system = from_dense(sample_covariance(data), r);
        done = true;
    } else if (T <= kDenseLimit && T > r) {
        // Dual problem: the nonzero spectrum of Y'Y/T equals that of YY'/T.
        MatrixXd dual = MatrixXd::Zero(T, T);
        dual.selfadjointView<Eigen::Lower>().rankUpdate(data, inv_t);
        dual.triangularView<Eigen::StrictlyUpper>() = dual.transpose();
        const EigenSystem small = from_dense(dual, r);
        const double floor = 1e-10 * std::max(std::abs(small.values(0)), std::numeric_limits<double>::min());
        if (small.values(r - 1) > floor) {
            system.dimension = n;
            system.values = small.values;
            system.vectors.resize(r, n);
            for (int j = 0; j < r; ++j) {
                VectorXd primal = data.transpose() * small.vectors.row(j).transpose();
                primal /= std::sqrt(static_cast<double>(T) * small.values(j));
                // One Gram-Schmidt pass removes rounding drift.
                for (int l = 0; l < j; ++l) primal -= system.vectors.row(l).dot(primal) * system.vectors.row(l).transpose();
                system.vectors.row(j) = primal.normalized().transpose();
            }
            system.next_value = std::max(small.next_value, 0.0);
            done = true;
        }
    }
    if (!done) {
        const Operator apply = [&data, inv_t](const MatrixXd& x) -> MatrixXd {
            MatrixXd scores = data * x;
            MatrixXd image = data.transpose() * scores;
            image *= inv_t;
            return image;
        };
        if (!subspace_iteration(apply, n, r, system)) system = from_dense(sample_covariance(data), r);
    }
    finalize(system);
    return fix_signs(std::move(system));
}

FullEigenSystem full_eigs(const MatrixXd& a) {
    if (a.rows() != a.cols()) throw ValidationError("full_eigs needs a square matrix");
    const double skew = asymmetry(a);
    if (skew > kSymmetryTolerance) {
        throw ValidationError("matrix is not symmetric: max |A - A'| = " + std::to_string(skew));
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed", 0.0);
    FullEigenSystem full;
    full.values = solver.eigenvalues().reverse();
    full.vectors = solver.eigenvectors().rowwise().reverse().transpose();
    for (Index l = 0; l < full.vectors.rows(); ++l) {
        Index best = 0;
        full.vectors.row(l).cwiseAbs().maxCoeff(&best);
        if (full.vectors(l, best) < 0.0) full.vectors.row(l) *= -1.0;
    }
    return full;
}

namespace {

void check_wilkinson_inputs(const FullEigenSystem& base, const MatrixXd& delta, Index j) {
    const Index n = base.values.size();
    if (base.vectors.rows() != n || base.vectors.cols() != n) {
        throw ValidationError("full eigen system must hold all n eigenvectors");
    }
    if (delta.rows() != n || delta.cols() != n) throw ValidationError("delta has the wrong dimension");
    if (asymmetry(delta) > kSymmetryTolerance) throw ValidationError("delta is not symmetric");
    if (j < 0 || j >= n) throw ValidationError("eigen index " + std::to_string(j) + " out of range");
    const double scale = std::max(1.0, base.values.cwiseAbs().maxCoeff());
    for (Index l = 0; l < n; ++l) {
        if (l != j && std::abs(base.values(j) - base.values(l)) < kDegeneracyTolerance * scale) {
            throw DegeneracyError("eigenvalue " + std::to_string(j) + " is not simple (coincides with " +
                                  std::to_string(l) + ")");
        }
    }
}

}  // namespace

VectorXd wilkinson_vector_shift(const FullEigenSystem& base, const MatrixXd& delta, Index j) {
    check_wilkinson_inputs(base, delta, j);
    const Index n = base.values.size();
    const VectorXd pj = base.vectors.row(j).transpose();
    // Coupling coefficients p_l delta p_j' for every l at once.
    const VectorXd coupling = base.vectors * (delta * pj);
    VectorXd shift = VectorXd::Zero(n);
    for (Index l = 0; l < n; ++l) {
        if (l == j) continue;
        shift += coupling(l) / (base.values(j) - base.values(l)) * base.vectors.row(l).transpose();
    }
    return shift;
}

double wilkinson_value_shift(const FullEigenSystem& base, const MatrixXd& delta, Index j) {
    check_wilkinson_inputs(base, delta, j);
    const VectorXd pj = base.vectors.row(j).transpose();
    return pj.dot(delta * pj);
}

}  // namespace afm
