#ifndef MISC_SUBSPACE_MERGE_HPP
#define MISC_SUBSPACE_MERGE_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

namespace misc {

// Disjoint, nonempty groups of source-row indices covering 0..d-1 exactly.
struct SubspacePartition {
    std::vector<std::vector<int>> groups;

    int num_groups() const { return static_cast<int>(groups.size()); }
    void validate(int d) const;
};

struct MergeStep {
    SubspacePartition partition;
    double mdl = 0.0;  // bits, L(D, M) of this partition
    std::optional<std::pair<int, int>> merged_pair;  // group indices merged to reach this step
    std::optional<double> pair_cost;                 // that pair's C_I
};

struct MergeTrace {
    std::vector<MergeStep> steps;  // first step is the all-singletons partition
};

// C_I(g_i, g_j) = C_H(g_i u g_j) - C_H(g_i) - C_H(g_j), in bits. Negative
// values signal dependence worth merging. Throws when the groups overlap.
double independence_cost(const Eigen::MatrixXd& S, const std::vector<int>& g_i,
                         const std::vector<int>& g_j);

// Greedy agglomeration from singletons: each step merges the pair with the
// smallest C_I (ties to the lexicographically smallest group-index pair) and
// stops once one group remains or every pairwise C_I is positive. Every
// visited partition is recorded with its MDL.
MergeTrace merge_subspaces(const Eigen::MatrixXd& S);

// Same greedy merging but driven to exactly `target_v` groups, ignoring the
// positive-cost stop rule; serves explicit subspace-count overrides.
SubspacePartition merge_to_target(const Eigen::MatrixXd& S, int target_v);

// L(M) = d^2/2 * log2(n) + (v+1) * log2(d), bits.
double mdl_model_cost(int d, int n, int v);

// L(D|M) = d/2 * log2(n) + per-group sums of log2(1/f), bits.
double mdl_data_cost(const Eigen::MatrixXd& S, const SubspacePartition& partition);

// Partition with minimal L(D, M); ties break toward fewer groups.
const SubspacePartition& select_partition(const MergeTrace& trace);

nlohmann::json trace_to_json(const MergeTrace& trace);

}  // namespace misc

#endif  // MISC_SUBSPACE_MERGE_HPP
