#ifndef MISC_METRICS_HPP
#define MISC_METRICS_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "misc/data_model.hpp"

namespace misc {

// Normalized mutual information I(a;b) / sqrt(H(a) H(b)) with natural-log
// entropies. Two single-cluster partitions score 1.0; exactly one scores 0.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

// Pair-counting F1: precision over same-cluster pairs of `a`, recall over
// those of `b`, harmonic mean; zero when either side has no same-cluster
// pair.
double f1_pairs(const std::vector<int>& a, const std::vector<int>& b);

// Adjusted Rand index; reported as an extra diagnostic.
double adjusted_rand(const std::vector<int>& a, const std::vector<int>& b);

struct ViewCell {
    double f1 = 0.0;
    double nmi = 0.0;
};

// Clusterings-by-views score matrix.
struct ViewReport {
    std::vector<std::string> row_names;  // clusterings
    std::vector<std::string> col_names;  // ground-truth views
    std::vector<std::vector<ViewCell>> cells;
};

ViewReport evaluate_views(const std::vector<std::vector<int>>& clusterings,
                          const std::vector<LabelView>& views);

nlohmann::json view_report_to_json(const ViewReport& report);
std::string view_report_to_table(const ViewReport& report);

}  // namespace misc

#endif  // MISC_METRICS_HPP
