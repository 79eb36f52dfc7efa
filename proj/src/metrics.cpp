#include "misc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace misc {

namespace {

void check_lengths(const std::vector<int>& a, const std::vector<int>& b, std::size_t min_len,
                   const char* who) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(who) + ": label vectors differ in length (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    if (a.size() < min_len) {
        throw std::invalid_argument(std::string(who) + ": need at least " + std::to_string(min_len) +
                                    " samples");
    }
}

// Remaps arbitrary ids to dense 0..k-1 so metrics stay relabeling-invariant.
std::vector<int> densify(const std::vector<int>& labels, int& k_out) {
    std::unordered_map<int, int> remap;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = remap.emplace(labels[i], static_cast<int>(remap.size()));
        out[i] = it->second;
    }
    k_out = static_cast<int>(remap.size());
    return out;
}

struct Contingency {
    std::vector<std::vector<long long>> counts;  // ka x kb
    std::vector<long long> row_sums, col_sums;
    long long n = 0;
};

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
    int ka = 0, kb = 0;
    const std::vector<int> da = densify(a, ka);
    const std::vector<int> db = densify(b, kb);
    Contingency c;
    c.counts.assign(static_cast<std::size_t>(ka), std::vector<long long>(static_cast<std::size_t>(kb), 0));
    c.row_sums.assign(static_cast<std::size_t>(ka), 0);
    c.col_sums.assign(static_cast<std::size_t>(kb), 0);
    c.n = static_cast<long long>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        c.counts[static_cast<std::size_t>(da[i])][static_cast<std::size_t>(db[i])]++;
        c.row_sums[static_cast<std::size_t>(da[i])]++;
        c.col_sums[static_cast<std::size_t>(db[i])]++;
    }
    return c;
}

double entropy(const std::vector<long long>& sums, long long n) {
    double h = 0.0;
    for (long long s : sums) {
        if (s > 0) {
            const double p = static_cast<double>(s) / static_cast<double>(n);
            h -= p * std::log(p);
        }
    }
    return h;
}

long long choose2(long long x) { return x * (x - 1) / 2; }

}  // namespace

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    check_lengths(a, b, 1, "nmi");
    const Contingency c = contingency(a, b);
    const double ha = entropy(c.row_sums, c.n);
    const double hb = entropy(c.col_sums, c.n);
    if (ha == 0.0 && hb == 0.0) return 1.0;
    if (ha == 0.0 || hb == 0.0) return 0.0;

    double mi = 0.0;
    for (std::size_t i = 0; i < c.counts.size(); ++i) {
        for (std::size_t j = 0; j < c.counts[i].size(); ++j) {
            const long long nij = c.counts[i][j];
            if (nij == 0) continue;
            const double pij = static_cast<double>(nij) / static_cast<double>(c.n);
            mi += pij * std::log(static_cast<double>(nij) * static_cast<double>(c.n) /
                                 (static_cast<double>(c.row_sums[i]) * static_cast<double>(c.col_sums[j])));
        }
    }
    return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

double f1_pairs(const std::vector<int>& a, const std::vector<int>& b) {
    check_lengths(a, b, 2, "f1_pairs");
    const Contingency c = contingency(a, b);
    long long pairs_a = 0, pairs_b = 0, pairs_both = 0;
    for (long long s : c.row_sums) pairs_a += choose2(s);
    for (long long s : c.col_sums) pairs_b += choose2(s);
    for (const auto& row : c.counts) {
        for (long long nij : row) pairs_both += choose2(nij);
    }
    if (pairs_a == 0 || pairs_b == 0) return 0.0;
    const double precision = static_cast<double>(pairs_both) / static_cast<double>(pairs_a);
    const double recall = static_cast<double>(pairs_both) / static_cast<double>(pairs_b);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double adjusted_rand(const std::vector<int>& a, const std::vector<int>& b) {
    check_lengths(a, b, 2, "adjusted_rand");
    const Contingency c = contingency(a, b);
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& row : c.counts) {
        for (long long nij : row) sum_ij += static_cast<double>(choose2(nij));
    }
    for (long long s : c.row_sums) sum_a += static_cast<double>(choose2(s));
    for (long long s : c.col_sums) sum_b += static_cast<double>(choose2(s));
    const double total = static_cast<double>(choose2(c.n));
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // both partitions trivial in the same way
    return (sum_ij - expected) / (max_index - expected);
}

ViewReport evaluate_views(const std::vector<std::vector<int>>& clusterings,
                          const std::vector<LabelView>& views) {
    ViewReport report;
    report.cells.resize(clusterings.size());
    for (std::size_t i = 0; i < clusterings.size(); ++i) {
        report.row_names.push_back("C" + std::to_string(i + 1));
        report.cells[i].resize(views.size());
        for (std::size_t j = 0; j < views.size(); ++j) {
            report.cells[i][j] = {f1_pairs(clusterings[i], views[j].labels),
                                  nmi(clusterings[i], views[j].labels)};
        }
    }
    for (const auto& view : views) report.col_names.push_back(view.name);
    return report;
}

nlohmann::json view_report_to_json(const ViewReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& row : report.cells) {
        nlohmann::json jrow = nlohmann::json::array();
        for (const auto& cell : row) {
            jrow.push_back({{"f1", cell.f1}, {"nmi", cell.nmi}});
        }
        cells.push_back(std::move(jrow));
    }
    return {{"clusterings", report.row_names}, {"views", report.col_names}, {"cells", cells}};
}

std::string view_report_to_table(const ViewReport& report) {
    std::ostringstream out;
    const int name_w = 12, cell_w = 16;
    out << std::left << std::setw(name_w) << "";
    for (const auto& col : report.col_names) out << std::setw(cell_w) << col;
    out << "\n";
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        out << std::setw(name_w) << report.row_names[i];
        for (const auto& cell : report.cells[i]) {
            std::ostringstream v;
            v << std::fixed << std::setprecision(3) << cell.f1 << "/" << cell.nmi;
            out << std::setw(cell_w) << v.str();
        }
        out << "\n";
    }
    out << std::setw(name_w) << "" << "(cells are F1/NMI)\n";
    return out.str();
}

}  // namespace misc
