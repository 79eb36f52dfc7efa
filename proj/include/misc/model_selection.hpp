#ifndef MISC_MODEL_SELECTION_HPP
#define MISC_MODEL_SELECTION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace misc {

struct Clustering {
    std::vector<int> labels;  // one id in 0..k-1 per sample, every id used
    int k = 0;
    double inertia = 0.0;
};

// Best-of-restarts Lloyd's algorithm with k-means++ seeding over the columns
// of X (m features x n samples). Empty clusters are repaired by reassigning
// the point farthest from its centroid. `inertia_trace`, when given, records
// the winning restart's per-iteration inertia.
Clustering kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed, int restarts = 10,
                  std::vector<double>* inertia_trace = nullptr);

// Sweeps k over [k_min, k_max] and returns the k minimizing a spherical
// Gaussian BIC score; ties go to the smaller k.
int select_k(const Eigen::MatrixXd& X, int k_min, int k_max, std::uint64_t seed);

}  // namespace misc

#endif  // MISC_MODEL_SELECTION_HPP
