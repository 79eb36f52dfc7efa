#ifndef MISC_PIPELINE_HPP
#define MISC_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "misc/data_model.hpp"
#include "misc/factorization.hpp"
#include "misc/metrics.hpp"
#include "misc/model_selection.hpp"
#include "misc/subspace_merge.hpp"

namespace misc {

struct KRange {
    int k_min = 2;
    int k_max = 10;
};

struct PipelineConfig {
    std::optional<std::string> input_path;
    CsvOrientation orientation = CsvOrientation::samples_as_rows;
    std::optional<GeneratorSpec> generator;

    double lambda = 10.0;
    int eps_neighbors = 5;
    KernelSpec kernel;  // gaussian with automatic width

    std::optional<std::vector<int>> k_override;  // one value broadcasts, else one per subspace
    std::optional<int> v_override;
    std::optional<KRange> k_range;  // default: [2, min(10, n/10)]

    int max_iter = 500;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    int kmeans_restarts = 10;

    std::string output_dir = ".";
    bool parallel = false;
};

// Applies one flat key=value entry (the config-file vocabulary); throws on
// unknown keys or unparseable values.
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);

// INI-style file: key = value lines, '#' or ';' comments, blank lines ignored.
void load_config_file(PipelineConfig& cfg, const std::string& path);

nlohmann::json config_to_json(const PipelineConfig& cfg);

struct SubspaceResult {
    std::vector<int> components;  // source-row indices of this subspace
    int k = 0;
    bool converged = false;
    int iterations = 0;
    double final_objective = 0.0;
    std::vector<double> objective_trace;
    Clustering clustering;
};

struct RunReport {
    int v = 0;
    SubspacePartition partition;
    MergeTrace trace;
    std::vector<SubspaceResult> subspaces;
    std::optional<ViewReport> metrics;
    std::map<std::string, double> timings_ms;
    std::vector<Eigen::Index> dropped_features;
    nlohmann::json config_echo;

    std::vector<std::vector<int>> clusterings() const;
};

// Full pipeline: standardize, whiten, ICA, agglomerative subspace merging
// with MDL selection, then per-subspace cluster-count selection, kernel
// graph-regularized factorization, and k-means on the soft assignments.
// Deterministic for a fixed config; `views`, when given, adds a
// clusterings-by-views score matrix to the report.
RunReport run_misc(const DataMatrix& X, const PipelineConfig& cfg,
                   const std::vector<LabelView>* views = nullptr);

nlohmann::json report_to_json(const RunReport& report);

}  // namespace misc

#endif  // MISC_PIPELINE_HPP
