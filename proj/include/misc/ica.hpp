#ifndef MISC_ICA_HPP
#define MISC_ICA_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "misc/data_model.hpp"

namespace misc {

struct WhitenResult {
    DataMatrix whitened;
    Eigen::MatrixXd transform;  // d x d, symmetric inverse square root of the covariance
    Eigen::VectorXd mean;       // d
};

// Decorrelates the features of a standardized matrix so the population
// covariance becomes the identity. Throws when the covariance is numerically
// rank deficient (eigenvalue < 1e-10 after a 1e-12 ridge).
WhitenResult whiten(const DataMatrix& X);

struct SourceDecomposition {
    Eigen::MatrixXd mixing;    // d x d, maps sources back to the whitened data
    Eigen::MatrixXd sources;   // d x n, unit-variance rows
    Eigen::MatrixXd unmixing;  // d x d, orthonormal rows in whitened coordinates
    Eigen::VectorXd whitening_mean;
    Eigen::MatrixXd whitening_transform;
    bool converged = false;
    int iterations = 0;
};

// Fixed-point ICA with the tanh contrast and symmetric decorrelation per
// sweep. Stops when the largest absolute change of the unmixing-row inner
// products drops below `tol`; hitting `max_iter` first is reported through
// the converged flag, not an error.
SourceDecomposition fast_ica(const WhitenResult& whitened, int max_iter = 500, double tol = 1e-6,
                             std::uint64_t seed = 0);

// Permutation/scale-invariant recovery index normalized to [0, 1]; zero iff
// M is a scaled permutation matrix. Throws on an all-zero row or column.
double amari_error(const Eigen::MatrixXd& M);

}  // namespace misc

#endif  // MISC_ICA_HPP
