#include "misc/subspace_merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "misc/density.hpp"

namespace misc {

void SubspacePartition::validate(int d) const {
    if (groups.empty() || static_cast<int>(groups.size()) > d) {
        throw std::invalid_argument("SubspacePartition: need 1..d groups");
    }
    std::vector<int> seen(static_cast<std::size_t>(d), 0);
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("SubspacePartition: empty group");
        for (int idx : g) {
            if (idx < 0 || idx >= d) throw std::invalid_argument("SubspacePartition: index out of range");
            if (seen[static_cast<std::size_t>(idx)]++) {
                throw std::invalid_argument("SubspacePartition: groups overlap at index " + std::to_string(idx));
            }
        }
    }
    for (int c : seen) {
        if (c != 1) throw std::invalid_argument("SubspacePartition: groups do not cover 0..d-1");
    }
}

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& S, const std::vector<int>& rows) {
    Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), S.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        block.row(static_cast<Eigen::Index>(r)) = S.row(rows[r]);
    }
    return block;
}

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> u;
    u.reserve(a.size() + b.size());
    u.insert(u.end(), a.begin(), a.end());
    u.insert(u.end(), b.begin(), b.end());
    std::sort(u.begin(), u.end());
    return u;
}

// Caches per-group sums of log2(1/f) so a group's cost is computed once per
// trace; identical on recomputation since the cached double is returned as
// stored.
class EntropyCache {
public:
    explicit EntropyCache(const Eigen::MatrixXd& S) : S_(S) {}

    // Sum over samples of log2(1/f) for the group's joint KDE (no m/2*log2 n
    // parameter term).
    double neg_log2_density_sum(const std::vector<int>& group) {
        auto it = cache_.find(group);
        if (it != cache_.end()) return it->second;
        const Eigen::MatrixXd block = gather_rows(S_, group);
        const double value = -log2_density_loo(fit_kde(block)).sum();
        cache_.emplace(group, value);
        return value;
    }

    double entropy_cost(const std::vector<int>& group) {
        const double m = static_cast<double>(group.size());
        return 0.5 * m * std::log2(static_cast<double>(S_.cols())) + neg_log2_density_sum(group);
    }

    double independence_cost(const std::vector<int>& g_i, const std::vector<int>& g_j) {
        // Grouped so the value is bit-identical under argument swap.
        return entropy_cost(sorted_union(g_i, g_j)) - (entropy_cost(g_i) + entropy_cost(g_j));
    }

private:
    const Eigen::MatrixXd& S_;
    std::map<std::vector<int>, double> cache_;
};

void check_disjoint(const std::vector<int>& g_i, const std::vector<int>& g_j) {
    if (g_i.empty() || g_j.empty()) throw std::invalid_argument("independence_cost: empty group");
    for (int a : g_i) {
        for (int b : g_j) {
            if (a == b) throw std::invalid_argument("independence_cost: groups overlap at index " + std::to_string(a));
        }
    }
}

SubspacePartition singletons(int d) {
    SubspacePartition p;
    p.groups.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) p.groups[static_cast<std::size_t>(i)] = {i};
    return p;
}

void sort_groups(SubspacePartition& p) {
    std::sort(p.groups.begin(), p.groups.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) { return a.front() < b.front(); });
}

double mdl_of(EntropyCache& cache, const SubspacePartition& p, int d, int n) {
    double data = 0.5 * static_cast<double>(d) * std::log2(static_cast<double>(n));
    for (const auto& g : p.groups) data += cache.neg_log2_density_sum(g);
    return mdl_model_cost(d, n, p.num_groups()) + data;
}

// One greedy pass; `respect_stop_rule` controls whether merging halts when
// every pairwise C_I turns positive. With a target_v >= 1 merging also halts
// at that group count.
MergeTrace run_merge(const Eigen::MatrixXd& S, bool respect_stop_rule, int target_v) {
    const int d = static_cast<int>(S.rows());
    const int n = static_cast<int>(S.cols());
    if (d < 1) throw std::invalid_argument("merge_subspaces: empty source matrix");

    EntropyCache cache(S);
    MergeTrace trace;
    SubspacePartition current = singletons(d);
    trace.steps.push_back({current, mdl_of(cache, current, d, n), std::nullopt, std::nullopt});

    while (current.num_groups() > std::max(1, target_v)) {
        double best_cost = std::numeric_limits<double>::infinity();
        int best_i = -1, best_j = -1;
        const int v = current.num_groups();
        for (int i = 0; i < v; ++i) {
            for (int j = i + 1; j < v; ++j) {
                const double cost = cache.independence_cost(current.groups[static_cast<std::size_t>(i)],
                                                            current.groups[static_cast<std::size_t>(j)]);
                if (cost < best_cost) {  // strict: ties keep the lexicographically first pair
                    best_cost = cost;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (respect_stop_rule && best_cost > 0.0) break;

        SubspacePartition merged;
        merged.groups.reserve(static_cast<std::size_t>(v - 1));
        for (int g = 0; g < v; ++g) {
            if (g == best_j) continue;
            if (g == best_i) {
                merged.groups.push_back(sorted_union(current.groups[static_cast<std::size_t>(best_i)],
                                                     current.groups[static_cast<std::size_t>(best_j)]));
            } else {
                merged.groups.push_back(current.groups[static_cast<std::size_t>(g)]);
            }
        }
        sort_groups(merged);
        current = merged;
        trace.steps.push_back({current, mdl_of(cache, current, d, n), std::make_pair(best_i, best_j), best_cost});
    }
    return trace;
}

}  // namespace

double independence_cost(const Eigen::MatrixXd& S, const std::vector<int>& g_i,
                         const std::vector<int>& g_j) {
    check_disjoint(g_i, g_j);
    EntropyCache cache(S);
    return cache.independence_cost(g_i, g_j);
}

MergeTrace merge_subspaces(const Eigen::MatrixXd& S) {
    return run_merge(S, true, 1);
}

SubspacePartition merge_to_target(const Eigen::MatrixXd& S, int target_v) {
    const int d = static_cast<int>(S.rows());
    if (target_v < 1 || target_v > d) {
        throw std::invalid_argument("merge_to_target: target v must be in 1.." + std::to_string(d));
    }
    return run_merge(S, false, target_v).steps.back().partition;
}

double mdl_model_cost(int d, int n, int v) {
    if (d < 1 || n < 2 || v < 1 || v > d) {
        throw std::invalid_argument("mdl_model_cost: requires d >= 1, n >= 2, 1 <= v <= d");
    }
    const double dd = static_cast<double>(d);
    return 0.5 * dd * dd * std::log2(static_cast<double>(n)) +
           static_cast<double>(v + 1) * std::log2(dd);
}

double mdl_data_cost(const Eigen::MatrixXd& S, const SubspacePartition& partition) {
    const int d = static_cast<int>(S.rows());
    partition.validate(d);
    EntropyCache cache(S);
    double total = 0.5 * static_cast<double>(d) * std::log2(static_cast<double>(S.cols()));
    for (const auto& g : partition.groups) total += cache.neg_log2_density_sum(g);
    return total;
}

const SubspacePartition& select_partition(const MergeTrace& trace) {
    if (trace.steps.empty()) throw std::invalid_argument("select_partition: empty trace");
    std::size_t best = 0;
    for (std::size_t t = 1; t < trace.steps.size(); ++t) {
        // Later steps have fewer groups, so <= breaks ties toward fewer.
        if (trace.steps[t].mdl <= trace.steps[best].mdl) best = t;
    }
    return trace.steps[best].partition;
}

nlohmann::json trace_to_json(const MergeTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const auto& step = trace.steps[t];
        nlohmann::json js{{"step", t}, {"groups", step.partition.groups}, {"mdl_bits", step.mdl}};
        if (step.merged_pair) js["merged_pair"] = {step.merged_pair->first, step.merged_pair->second};
        if (step.pair_cost) js["pair_cost_bits"] = *step.pair_cost;
        steps.push_back(std::move(js));
    }
    return steps;
}

}  // namespace misc
