#include "misc/model_selection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "misc/rng.hpp"

namespace misc {

namespace {

constexpr int kLloydMaxIter = 300;

Eigen::MatrixXd plus_plus_init(const Eigen::MatrixXd& X, int k, Rng& rng) {
    const Eigen::Index n = X.cols();
    Eigen::MatrixXd centers(X.rows(), k);
    centers.col(0) = X.col(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
    Eigen::VectorXd dist2 = (X.colwise() - centers.col(0)).colwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = dist2.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            chosen = n - 1;
            for (Eigen::Index j = 0; j < n; ++j) {
                acc += dist2(j);
                if (acc >= target) {
                    chosen = j;
                    break;
                }
            }
        } else {
            // All remaining points coincide with a center; any choice works.
            chosen = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        }
        centers.col(c) = X.col(chosen);
        dist2 = dist2.cwiseMin((X.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
    }
    return centers;
}

struct LloydResult {
    std::vector<int> labels;
    double inertia;
    std::vector<double> trace;
};

LloydResult lloyd(const Eigen::MatrixXd& X, int k, Rng& rng) {
    const Eigen::Index n = X.cols();
    Eigen::MatrixXd centers = plus_plus_init(X, k, rng);
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    LloydResult result;
    double prev_inertia = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < kLloydMaxIter; ++iter) {
        // Assignment.
        bool changed = false;
        double inertia = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            int best = 0;
            double best_d = (X.col(j) - centers.col(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (X.col(j) - centers.col(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[static_cast<std::size_t>(j)] != best) changed = true;
            labels[static_cast<std::size_t>(j)] = best;
            inertia += best_d;
        }

        // Repair empty clusters with the point farthest from its centroid.
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int l : labels) counts[static_cast<std::size_t>(l)]++;
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            Eigen::Index farthest = 0;
            double far_d = -1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const int l = labels[static_cast<std::size_t>(j)];
                if (counts[static_cast<std::size_t>(l)] <= 1) continue;
                const double d = (X.col(j) - centers.col(l)).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    farthest = j;
                }
            }
            counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(farthest)])]--;
            labels[static_cast<std::size_t>(farthest)] = c;
            counts[static_cast<std::size_t>(c)]++;
            centers.col(c) = X.col(farthest);
            changed = true;
        }

        // Update step.
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(X.rows(), k);
        for (Eigen::Index j = 0; j < n; ++j) sums.col(labels[static_cast<std::size_t>(j)]) += X.col(j);
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.col(c) = sums.col(c) / counts[static_cast<std::size_t>(c)];
            }
        }

        result.trace.push_back(inertia);
        if (!changed && inertia >= prev_inertia - 1e-12) break;
        prev_inertia = inertia;
    }

    // Final inertia against the updated centroids.
    double inertia = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        inertia += (X.col(j) - centers.col(labels[static_cast<std::size_t>(j)])).squaredNorm();
    }
    result.trace.push_back(inertia);
    result.labels = std::move(labels);
    result.inertia = inertia;
    return result;
}

}  // namespace

Clustering kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed, int restarts,
                  std::vector<double>* inertia_trace) {
    const Eigen::Index n = X.cols();
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (k > n) throw std::invalid_argument("kmeans: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
    if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");

    LloydResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng = Rng::stream(seed, 0x6d0000 + static_cast<std::uint64_t>(r));
        LloydResult run = lloyd(X, k, rng);
        if (run.inertia < best.inertia) best = std::move(run);
    }

    // Relabel so cluster ids appear in order of first occurrence; output is
    // then invariant to centroid numbering.
    std::vector<int> remap(static_cast<std::size_t>(k), -1);
    int next = 0;
    for (int& l : best.labels) {
        if (remap[static_cast<std::size_t>(l)] < 0) remap[static_cast<std::size_t>(l)] = next++;
        l = remap[static_cast<std::size_t>(l)];
    }

    if (inertia_trace) *inertia_trace = best.trace;
    return Clustering{std::move(best.labels), k, best.inertia};
}

int select_k(const Eigen::MatrixXd& X, int k_min, int k_max, std::uint64_t seed) {
    const Eigen::Index n = X.cols();
    const Eigen::Index m = X.rows();
    if (k_min < 1 || k_min > k_max || k_max > n) {
        throw std::invalid_argument("select_k: need 1 <= k_min <= k_max <= n");
    }

    // Gaussian-mixture BIC with a full covariance per cluster. A shared
    // spherical variance keeps rewarding splits of whichever cluster holds
    // the largest variance share (the gain n*m*ln(1 - 0.64*share) outruns
    // the k*(m+1)*ln(n) penalty), so it drifts to k_max on well-separated
    // or unequal-variance clusters; per-cluster covariances remove that.
    int best_k = k_min;
    double best_bic = std::numeric_limits<double>::infinity();
    for (int k = k_min; k <= k_max; ++k) {
        const Clustering c = kmeans(X, k, derive_seed(seed, static_cast<std::uint64_t>(k)));
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int l : c.labels) counts[static_cast<std::size_t>(l)]++;

        double loglik2 = 0.0;  // -2 * log-likelihood, dropping constants
        for (int cl = 0; cl < k; ++cl) {
            const int cnt = counts[static_cast<std::size_t>(cl)];
            if (cnt == 0) continue;
            Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (c.labels[static_cast<std::size_t>(j)] == cl) mean += X.col(j);
            }
            mean /= static_cast<double>(cnt);
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (c.labels[static_cast<std::size_t>(j)] != cl) continue;
                const Eigen::VectorXd d = X.col(j) - mean;
                cov += d * d.transpose();
            }
            cov /= static_cast<double>(cnt);
            cov.diagonal().array() += 1e-9 * (1.0 + cov.trace());
            loglik2 += static_cast<double>(cnt) * std::log(cov.determinant());
            loglik2 -= 2.0 * static_cast<double>(cnt) *
                       std::log(static_cast<double>(cnt) / static_cast<double>(n));
        }
        const double params_per_cluster =
            static_cast<double>(m) + 0.5 * static_cast<double>(m) * static_cast<double>(m + 1) + 1.0;
        const double penalty = static_cast<double>(k) * params_per_cluster *
                               std::log(static_cast<double>(n));
        const double bic = loglik2 + penalty;
        if (bic < best_bic) {  // strict: ties stay with the smaller k
            best_bic = bic;
            best_k = k;
        }
    }
    return best_k;
}

}  // namespace misc
