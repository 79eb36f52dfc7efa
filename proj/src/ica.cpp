#include "misc/ica.hpp"

#include <cmath>
#include <stdexcept>

#include "misc/rng.hpp"

namespace misc {

namespace {

// Symmetric inverse square root of a symmetric positive definite matrix.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& M, double ridge, double min_eig,
                             const char* context) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    if (eig.info() != Eigen::Success) throw std::runtime_error(std::string(context) + ": eigendecomposition failed");
    Eigen::VectorXd vals = eig.eigenvalues().array() + ridge;
    if (vals.minCoeff() < min_eig) {
        throw std::runtime_error(std::string(context) +
                                 ": covariance is numerically rank deficient; reduce dimensionality "
                                 "(e.g. PCA) before whitening");
    }
    return eig.eigenvectors() * vals.array().rsqrt().matrix().asDiagonal() *
           eig.eigenvectors().transpose();
}

Eigen::MatrixXd symmetric_decorrelate(const Eigen::MatrixXd& W) {
    return inverse_sqrt(W * W.transpose(), 0.0, 1e-14, "fast_ica") * W;
}

}  // namespace

WhitenResult whiten(const DataMatrix& X) {
    X.validate();
    const Eigen::Index n = X.num_samples();
    WhitenResult result;
    result.mean = X.values.rowwise().mean();
    Eigen::MatrixXd centered = X.values.colwise() - result.mean;
    const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(n);
    result.transform = inverse_sqrt(cov, 1e-12, 1e-10, "whiten");
    result.whitened.values = result.transform * centered;
    result.whitened.feature_names = X.feature_names;
    return result;
}

SourceDecomposition fast_ica(const WhitenResult& whitened, int max_iter, double tol,
                             std::uint64_t seed) {
    if (max_iter < 1) throw std::invalid_argument("fast_ica: max_iter must be >= 1");
    if (tol <= 0.0 || tol >= 1.0) throw std::invalid_argument("fast_ica: tol must be in (0, 1)");
    const Eigen::MatrixXd& Xw = whitened.whitened.values;
    const Eigen::Index d = Xw.rows();
    const Eigen::Index n = Xw.cols();

    Rng rng = Rng::stream(seed, 0x1ca);
    Eigen::MatrixXd W(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) W(i, j) = rng.normal();
    }
    W = symmetric_decorrelate(W);

    SourceDecomposition dec;
    dec.converged = false;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        const Eigen::MatrixXd Y = W * Xw;                       // d x n projections
        const Eigen::MatrixXd G = Y.array().tanh();             // contrast g(y)
        const Eigen::VectorXd gprime_mean =
            (1.0 - G.array().square()).rowwise().mean();        // E[g'(y)] per row
        Eigen::MatrixXd W_new =
            (G * Xw.transpose()) / static_cast<double>(n) - gprime_mean.asDiagonal() * W;
        W_new = symmetric_decorrelate(W_new);

        double delta = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            delta = std::max(delta, std::abs(1.0 - std::abs(W_new.row(i).dot(W.row(i)))));
        }
        W = W_new;
        if (delta < tol) {
            dec.converged = true;
            ++iter;
            break;
        }
    }

    dec.unmixing = W;
    dec.mixing = W.transpose();  // rows are orthonormal in whitened coordinates
    dec.sources = W * Xw;
    dec.whitening_mean = whitened.mean;
    dec.whitening_transform = whitened.transform;
    dec.iterations = iter;
    return dec;
}

double amari_error(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("amari_error: matrix must be square");
    const Eigen::Index d = M.rows();
    const Eigen::MatrixXd P = M.cwiseAbs();
    for (Eigen::Index i = 0; i < d; ++i) {
        if (P.row(i).maxCoeff() <= 0.0) throw std::invalid_argument("amari_error: zero row");
        if (P.col(i).maxCoeff() <= 0.0) throw std::invalid_argument("amari_error: zero column");
    }
    if (d == 1) return 0.0;

    double acc = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        acc += P.row(i).sum() / P.row(i).maxCoeff() - 1.0;
        acc += P.col(i).sum() / P.col(i).maxCoeff() - 1.0;
    }
    return acc / (2.0 * static_cast<double>(d) * static_cast<double>(d - 1));
}

}  // namespace misc
