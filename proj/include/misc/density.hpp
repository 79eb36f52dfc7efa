#ifndef MISC_DENSITY_HPP
#define MISC_DENSITY_HPP

#include <Eigen/Dense>

namespace misc {

// Product-Gaussian kernel density model over the columns of an m x n sample
// block, one Silverman bandwidth per dimension.
struct DensityModel {
    Eigen::MatrixXd support;     // m x n
    Eigen::VectorXd bandwidths;  // m, all > 0
};

// Bandwidths follow h_i = 1.06 * std_i * n^(-1/(4+m)) with the population
// standard deviation; rows with zero spread fall back to a 1e-6 floor.
// Requires n >= 2.
DensityModel fit_kde(const Eigen::MatrixXd& S_sub);

// log2 of the KDE density at each query column.
Eigen::VectorXd log2_density(const DensityModel& model, const Eigen::MatrixXd& points);

// log2 density at each support column with the self-kernel excluded.
Eigen::VectorXd log2_density_loo(const DensityModel& model);

// Entropy coding cost in bits: m/2 * log2(n) + sum_j log2(1 / f(S_.j)) with
// leave-one-out evaluation at the support points.
double entropy_cost(const Eigen::MatrixXd& S_sub);

}  // namespace misc

#endif  // MISC_DENSITY_HPP
