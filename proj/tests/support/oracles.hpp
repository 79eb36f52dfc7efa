// Brute-force reference implementations used to cross-check the library.
// Everything here is written with plain loops, independent of the code paths
// under test.
#ifndef MISC_TESTS_ORACLES_HPP
#define MISC_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <vector>

namespace oracle {

inline double silverman_bandwidth(const Eigen::VectorXd& row, int block_rows) {
    const double n = static_cast<double>(row.size());
    const double mean = row.mean();
    double var = 0.0;
    for (Eigen::Index j = 0; j < row.size(); ++j) var += (row(j) - mean) * (row(j) - mean);
    var /= n;
    const double h = 1.06 * std::sqrt(var) * std::pow(n, -1.0 / (4.0 + block_rows));
    return h > 1e-6 ? h : 1e-6;
}

// Leave-one-out product-Gaussian KDE at support column q, natural density.
inline double kde_loo_density(const Eigen::MatrixXd& block, Eigen::Index q,
                              const std::vector<double>& bandwidths) {
    const Eigen::Index m = block.rows();
    const Eigen::Index n = block.cols();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == q) continue;
        double k = 1.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double z = (block(i, q) - block(i, j)) / bandwidths[static_cast<std::size_t>(i)];
            k *= std::exp(-0.5 * z * z) / (bandwidths[static_cast<std::size_t>(i)] * std::sqrt(2.0 * M_PI));
        }
        sum += k;
    }
    return sum / static_cast<double>(n - 1);
}

// Sum over samples of log2(1 / f_loo) for one row block.
inline double neg_log2_density_sum(const Eigen::MatrixXd& block) {
    const Eigen::Index m = block.rows();
    std::vector<double> bw;
    for (Eigen::Index i = 0; i < m; ++i) {
        bw.push_back(silverman_bandwidth(block.row(i), static_cast<int>(m)));
    }
    double acc = 0.0;
    for (Eigen::Index q = 0; q < block.cols(); ++q) {
        acc -= std::log2(kde_loo_density(block, q, bw));
    }
    return acc;
}

inline double entropy_cost(const Eigen::MatrixXd& block) {
    return 0.5 * static_cast<double>(block.rows()) * std::log2(static_cast<double>(block.cols())) +
           neg_log2_density_sum(block);
}

inline Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& S, const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), S.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = S.row(rows[r]);
    return out;
}

// L(D, M) = L(M) + L(D|M) evaluated from scratch.
inline double mdl_total(const Eigen::MatrixXd& S, const std::vector<std::vector<int>>& groups) {
    const double d = static_cast<double>(S.rows());
    const double n = static_cast<double>(S.cols());
    const double v = static_cast<double>(groups.size());
    const double model = 0.5 * d * d * std::log2(n) + (v + 1.0) * std::log2(d);
    double data = 0.5 * d * std::log2(n);
    for (const auto& g : groups) data += neg_log2_density_sum(gather_rows(S, g));
    return model + data;
}

// Contingency-table NMI with natural-log entropies.
inline double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    const double n = static_cast<double>(a.size());
    std::map<int, double> pa, pb;
    std::map<std::pair<int, int>, double> pab;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += 1.0;
        pb[b[i]] += 1.0;
        pab[{a[i], b[i]}] += 1.0;
    }
    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (auto& [k, c] : pa) ha -= c / n * std::log(c / n);
    for (auto& [k, c] : pb) hb -= c / n * std::log(c / n);
    for (auto& [k, c] : pab) {
        mi += c / n * std::log((c / n) / ((pa[k.first] / n) * (pb[k.second] / n)));
    }
    if (ha == 0.0 && hb == 0.0) return 1.0;
    if (ha == 0.0 || hb == 0.0) return 0.0;
    return mi / std::sqrt(ha * hb);
}

// Pair-counting F1 by enumerating all O(n^2) pairs.
inline double f1_pairs(const std::vector<int>& a, const std::vector<int>& b) {
    long long in_a = 0, in_b = 0, in_both = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const bool sa = a[i] == a[j];
            const bool sb = b[i] == b[j];
            in_a += sa;
            in_b += sb;
            in_both += (sa && sb);
        }
    }
    if (in_a == 0 || in_b == 0) return 0.0;
    const double p = static_cast<double>(in_both) / static_cast<double>(in_a);
    const double r = static_cast<double>(in_both) / static_cast<double>(in_b);
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

inline double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double mx = x.mean(), my = y.mean();
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        sxy += (x(i) - mx) * (y(i) - my);
        sxx += (x(i) - mx) * (x(i) - mx);
        syy += (y(i) - my) * (y(i) - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle

#endif
