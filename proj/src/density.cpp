#include "misc/density.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace misc {

namespace {

constexpr double kBandwidthFloor = 1e-6;
const double kLog2E = std::numbers::log2e;

// Natural-log kernel weights of one query column against every support
// column, including the per-dimension normalization constants.
void log_kernel_weights(const DensityModel& model, const Eigen::VectorXd& point,
                        Eigen::VectorXd& out) {
    const Eigen::Index m = model.support.rows();
    const Eigen::Index n = model.support.cols();
    double log_norm = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        log_norm -= std::log(model.bandwidths(i) * std::sqrt(2.0 * std::numbers::pi));
    }
    out.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double expo = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double z = (point(i) - model.support(i, j)) / model.bandwidths(i);
            expo -= 0.5 * z * z;
        }
        out(j) = log_norm + expo;
    }
}

// log(sum exp(w_j) for j != skip) - stable via the running maximum.
double log_sum_exp(const Eigen::VectorXd& w, Eigen::Index skip) {
    double wmax = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (j == skip) continue;
        wmax = std::max(wmax, w(j));
    }
    double acc = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (j == skip) continue;
        acc += std::exp(w(j) - wmax);
    }
    return wmax + std::log(acc);
}

}  // namespace

DensityModel fit_kde(const Eigen::MatrixXd& S_sub) {
    const Eigen::Index m = S_sub.rows();
    const Eigen::Index n = S_sub.cols();
    if (m < 1) throw std::invalid_argument("fit_kde: empty sample block");
    if (n < 2) throw std::invalid_argument("fit_kde: need at least 2 samples");

    DensityModel model;
    model.support = S_sub;
    model.bandwidths.resize(m);
    const double n_factor = std::pow(static_cast<double>(n), -1.0 / (4.0 + static_cast<double>(m)));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double mean = S_sub.row(i).mean();
        const double sd = std::sqrt((S_sub.row(i).array() - mean).square().mean());
        const double h = 1.06 * sd * n_factor;
        model.bandwidths(i) = std::max(h, kBandwidthFloor);
    }
    return model;
}

Eigen::VectorXd log2_density(const DensityModel& model, const Eigen::MatrixXd& points) {
    if (points.rows() != model.support.rows()) {
        throw std::invalid_argument("log2_density: point dimension " + std::to_string(points.rows()) +
                                    " does not match model dimension " +
                                    std::to_string(model.support.rows()));
    }
    const Eigen::Index q = points.cols();
    const double log_n = std::log(static_cast<double>(model.support.cols()));
    Eigen::VectorXd out(q);
    Eigen::VectorXd w;
    for (Eigen::Index j = 0; j < q; ++j) {
        log_kernel_weights(model, points.col(j), w);
        out(j) = (log_sum_exp(w, -1) - log_n) * kLog2E;
    }
    return out;
}

Eigen::VectorXd log2_density_loo(const DensityModel& model) {
    const Eigen::Index n = model.support.cols();
    if (n < 2) throw std::invalid_argument("log2_density_loo: need at least 2 support points");
    const double log_n1 = std::log(static_cast<double>(n - 1));
    Eigen::VectorXd out(n);
    Eigen::VectorXd w;
    for (Eigen::Index j = 0; j < n; ++j) {
        log_kernel_weights(model, model.support.col(j), w);
        out(j) = (log_sum_exp(w, j) - log_n1) * kLog2E;
    }
    return out;
}

double entropy_cost(const Eigen::MatrixXd& S_sub) {
    const DensityModel model = fit_kde(S_sub);
    const double m = static_cast<double>(S_sub.rows());
    const double n = static_cast<double>(S_sub.cols());
    return 0.5 * m * std::log2(n) - log2_density_loo(model).sum();
}

}  // namespace misc
