// Command-line front end for the misc shared library. Talks to the core
// exclusively through the C API in misc.h; file formats for labels and views
// are owned here.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "misc.h"

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(misc_status status, const std::string& context) {
    if (status != MISC_OK) throw CliError(context + ": " + misc_last_error());
}

// RAII wrappers over the opaque handles.
using MatrixPtr = std::unique_ptr<misc_matrix, decltype(&misc_matrix_free)>;
using DatasetPtr = std::unique_ptr<misc_dataset, decltype(&misc_dataset_free)>;
using ConfigPtr = std::unique_ptr<misc_config, decltype(&misc_config_free)>;
using ReportPtr = std::unique_ptr<misc_report, decltype(&misc_report_free)>;
using AblationPtr = std::unique_ptr<misc_ablation, decltype(&misc_ablation_free)>;

std::string take_string(char* s) {
    std::string out = s ? s : "";
    misc_string_free(s);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t b = cell.find_first_not_of(" \t");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b));
    }
    return cells;
}

bool is_number(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

// Labels file: optional "sample_index,label" header, one row per sample.
std::vector<uint32_t> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError("cannot open labels file '" + path + "'");
    std::vector<std::pair<long, long>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (first && !cells.empty() && !is_number(cells[0])) {
            first = false;
            continue;  // header
        }
        first = false;
        if (cells.size() != 2) throw CliError(path + ": expected two columns (sample_index, label)");
        rows.emplace_back(std::stol(cells[0]), std::stol(cells[1]));
    }
    if (rows.empty()) throw CliError(path + ": no label rows");
    std::vector<uint32_t> labels(rows.size(), 0);
    for (const auto& [idx, label] : rows) {
        if (idx < 0 || idx >= static_cast<long>(rows.size())) {
            throw CliError(path + ": sample_index " + std::to_string(idx) + " out of range");
        }
        labels[static_cast<std::size_t>(idx)] = static_cast<uint32_t>(label);
    }
    return labels;
}

struct ViewsFile {
    std::vector<std::string> names;
    std::vector<std::vector<uint32_t>> columns;
};

// Views file: header row with view names, then one label per view per sample.
ViewsFile read_views_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError("cannot open views file '" + path + "'");
    ViewsFile views;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (first) {
            first = false;
            if (!cells.empty() && !is_number(cells[0])) {
                views.names = cells;
                views.columns.resize(cells.size());
                continue;
            }
            views.columns.resize(cells.size());
            for (std::size_t v = 0; v < cells.size(); ++v) views.names.push_back("view" + std::to_string(v + 1));
        }
        if (cells.size() != views.columns.size()) throw CliError(path + ": inconsistent column count");
        for (std::size_t v = 0; v < cells.size(); ++v) {
            views.columns[v].push_back(static_cast<uint32_t>(std::stol(cells[v])));
        }
    }
    if (views.columns.empty() || views.columns[0].empty()) throw CliError(path + ": no view rows");
    return views;
}

void write_labels_csv(const std::string& path, const std::vector<uint32_t>& labels) {
    std::ofstream out(path);
    if (!out) throw CliError("cannot write '" + path + "'");
    out << "sample_index,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << "," << labels[i] << "\n";
}

void write_matrix_csv(const std::string& path, const misc_matrix* matrix) {
    const std::size_t d = misc_matrix_num_features(matrix);
    const std::size_t n = misc_matrix_num_samples(matrix);
    std::vector<double> values(d * n);
    check(misc_matrix_copy_values(matrix, values.data(), values.size()), "copy matrix");
    std::ofstream out(path);
    if (!out) throw CliError("cannot write '" + path + "'");
    out.precision(17);
    for (std::size_t j = 0; j < n; ++j) {  // samples as rows
        for (std::size_t i = 0; i < d; ++i) {
            if (i) out << ",";
            out << values[i + j * d];
        }
        out << "\n";
    }
}

void write_views_csv(const std::string& path, const ViewsFile& views) {
    std::ofstream out(path);
    if (!out) throw CliError("cannot write '" + path + "'");
    for (std::size_t v = 0; v < views.names.size(); ++v) {
        if (v) out << ",";
        out << views.names[v];
    }
    out << "\n";
    for (std::size_t j = 0; j < views.columns[0].size(); ++j) {
        for (std::size_t v = 0; v < views.columns.size(); ++v) {
            if (v) out << ",";
            out << views.columns[v][j];
        }
        out << "\n";
    }
}

ViewsFile dataset_views(const misc_dataset* ds) {
    ViewsFile views;
    const std::size_t n = misc_matrix_num_samples(misc_dataset_matrix(ds));
    for (std::size_t v = 0; v < misc_dataset_num_views(ds); ++v) {
        views.names.push_back(misc_dataset_view_name(ds, v));
        std::vector<uint32_t> labels(n);
        check(misc_dataset_view_labels(ds, v, labels.data(), labels.size()), "read view labels");
        views.columns.push_back(std::move(labels));
    }
    return views;
}

// Shared flags for commands that load or synthesize a dataset.
struct InputOptions {
    std::string input_path;
    std::string orientation = "samples_as_rows";
    std::string kind;
    std::size_t n = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_params;

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", input_path, "CSV dataset to load");
        cmd->add_option("--orientation", orientation, "samples_as_rows | features_as_rows")
            ->check(CLI::IsMember({"samples_as_rows", "features_as_rows"}));
        cmd->add_option("--kind", kind, "synthetic dataset kind (gaussian_blobs|atom|lsun|rings)");
        cmd->add_option("--n", n, "synthetic sample count");
        cmd->add_option("--gen-seed", gen_seed, "synthetic generator seed");
        cmd->add_option("--gen-params", gen_params, "generator parameters as a JSON object");
    }

    // Returns the matrix to work on; fills `dataset` when synthesized.
    MatrixPtr load(DatasetPtr& dataset) const {
        if (!input_path.empty() && !kind.empty()) {
            throw CliError("use either --input or --kind, not both");
        }
        if (!input_path.empty()) {
            misc_matrix* m = nullptr;
            check(misc_matrix_from_csv(input_path.c_str(), orientation == "samples_as_rows" ? 1 : 0, &m),
                  "load '" + input_path + "'");
            return MatrixPtr(m, &misc_matrix_free);
        }
        if (kind.empty()) throw CliError("one of --input or --kind is required");
        misc_dataset* ds = nullptr;
        check(misc_dataset_generate(kind.c_str(), n, gen_seed,
                                    gen_params.empty() ? nullptr : gen_params.c_str(), &ds),
              "generate " + kind);
        dataset.reset(ds);
        const misc_matrix* view = misc_dataset_matrix(ds);
        // Copy into an owned handle so matrix lifetime is independent.
        const std::size_t d = misc_matrix_num_features(view);
        const std::size_t nn = misc_matrix_num_samples(view);
        std::vector<double> values(d * nn);
        check(misc_matrix_copy_values(view, values.data(), values.size()), "copy matrix");
        misc_matrix* m = nullptr;
        check(misc_matrix_create(d, nn, values.data(), &m), "wrap matrix");
        return MatrixPtr(m, &misc_matrix_free);
    }
};

int cmd_run(const InputOptions& input, const std::vector<std::pair<std::string, std::string>>& overrides,
            const std::string& config_path, const std::string& views_path, const std::string& out_dir) {
    ConfigPtr cfg(misc_config_create(), &misc_config_free);
    if (!cfg) throw CliError("cannot allocate config");
    if (const char* env_seed = std::getenv("MISC_SEED")) {
        check(misc_config_set(cfg.get(), "seed", env_seed), "MISC_SEED");
    }
    if (!config_path.empty()) {
        check(misc_config_load_file(cfg.get(), config_path.c_str()), "config file");
    }
    for (const auto& [key, value] : overrides) {
        check(misc_config_set(cfg.get(), key.c_str(), value.c_str()), "flag --" + key);
    }

    DatasetPtr dataset(nullptr, &misc_dataset_free);
    MatrixPtr matrix = input.load(dataset);

    ViewsFile views;
    if (!views_path.empty()) {
        views = read_views_csv(views_path);
    } else if (dataset) {
        views = dataset_views(dataset.get());
    }
    std::vector<const uint32_t*> view_ptrs;
    std::vector<const char*> view_names;
    for (std::size_t v = 0; v < views.columns.size(); ++v) {
        view_ptrs.push_back(views.columns[v].data());
        view_names.push_back(views.names[v].c_str());
    }

    misc_report* raw = nullptr;
    check(misc_run(matrix.get(), cfg.get(), view_ptrs.empty() ? nullptr : view_ptrs.data(),
                   view_names.empty() ? nullptr : view_names.data(), view_ptrs.size(), &raw),
          "run");
    ReportPtr report(raw, &misc_report_free);

    std::filesystem::create_directories(out_dir);
    const std::size_t n = misc_report_num_samples(report.get());
    const std::size_t v = misc_report_num_clusterings(report.get());
    for (std::size_t i = 0; i < v; ++i) {
        std::vector<uint32_t> labels(n);
        check(misc_report_labels(report.get(), i, labels.data(), labels.size()), "labels");
        write_labels_csv(out_dir + "/clustering_" + std::to_string(i + 1) + ".csv", labels);
    }
    char* json = nullptr;
    check(misc_report_json(report.get(), &json), "report json");
    const std::string text = take_string(json);
    std::ofstream out(out_dir + "/report.json");
    if (!out) throw CliError("cannot write report.json in '" + out_dir + "'");
    out << text << "\n";
    std::cout << "wrote " << v << " clusterings and report.json to " << out_dir << "\n";
    return 0;
}

int cmd_generate(const std::string& kind, std::size_t n, std::uint64_t seed,
                 const std::string& params, const std::string& out_path) {
    misc_dataset* raw = nullptr;
    check(misc_dataset_generate(kind.c_str(), n, seed, params.empty() ? nullptr : params.c_str(), &raw),
          "generate " + kind);
    DatasetPtr dataset(raw, &misc_dataset_free);
    write_matrix_csv(out_path, misc_dataset_matrix(dataset.get()));
    const std::filesystem::path p(out_path);
    const std::string views_path = (p.parent_path() / (p.stem().string() + "_views.csv")).string();
    write_views_csv(views_path, dataset_views(dataset.get()));
    std::cout << "wrote " << out_path << " and " << views_path << "\n";
    return 0;
}

int cmd_evaluate(const std::vector<std::string>& label_paths, const std::string& views_path) {
    std::vector<std::vector<uint32_t>> clusterings;
    for (const auto& path : label_paths) clusterings.push_back(read_labels_csv(path));
    const ViewsFile views = read_views_csv(views_path);
    const std::size_t n = clusterings.front().size();
    for (const auto& c : clusterings) {
        if (c.size() != n) throw CliError("label files disagree on sample count");
    }
    for (const auto& col : views.columns) {
        if (col.size() != n) throw CliError("views file has " + std::to_string(col.size()) +
                                            " rows, labels have " + std::to_string(n));
    }
    std::vector<const uint32_t*> cluster_ptrs, view_ptrs;
    std::vector<const char*> names;
    for (const auto& c : clusterings) cluster_ptrs.push_back(c.data());
    for (std::size_t v = 0; v < views.columns.size(); ++v) {
        view_ptrs.push_back(views.columns[v].data());
        names.push_back(views.names[v].c_str());
    }
    char* json = nullptr;
    check(misc_evaluate_views(cluster_ptrs.data(), cluster_ptrs.size(), view_ptrs.data(),
                              names.data(), view_ptrs.size(), n, &json),
          "evaluate");
    std::cout << take_string(json) << "\n";
    return 0;
}

int cmd_ablate(const InputOptions& input, const std::string& variant, int k,
               const std::vector<std::pair<std::string, std::string>>& overrides,
               const std::string& views_path, const std::string& out_dir) {
    ConfigPtr cfg(misc_config_create(), &misc_config_free);
    if (!cfg) throw CliError("cannot allocate config");
    for (const auto& [key, value] : overrides) {
        check(misc_config_set(cfg.get(), key.c_str(), value.c_str()), "flag --" + key);
    }

    DatasetPtr dataset(nullptr, &misc_dataset_free);
    MatrixPtr matrix = input.load(dataset);
    const std::size_t n = misc_matrix_num_samples(matrix.get());

    ViewsFile views;
    if (!views_path.empty()) {
        views = read_views_csv(views_path);
    } else if (dataset) {
        views = dataset_views(dataset.get());
    }

    int effective_k = k;
    if (effective_k <= 0) {
        if (views.columns.empty()) throw CliError("--k is required when no views are available");
        uint32_t max_label = 0;
        for (uint32_t l : views.columns[0]) max_label = std::max(max_label, l);
        effective_k = static_cast<int>(max_label) + 1;
    }

    std::vector<std::string> variants;
    if (variant == "all") {
        variants = {"snmf", "gsnmf", "ksnmf", "kgsnmf"};
    } else {
        variants.push_back(variant);
    }

    std::ostringstream json;
    json << "{\n  \"k\": " << effective_k << ",\n  \"variants\": {";
    bool first_variant = true;
    for (const auto& name : variants) {
        misc_ablation* raw = nullptr;
        check(misc_ablate(matrix.get(), name.c_str(), static_cast<std::size_t>(effective_k),
                          cfg.get(), &raw),
              "ablate " + name);
        AblationPtr result(raw, &misc_ablation_free);

        std::vector<uint32_t> labels(n);
        check(misc_ablation_labels(result.get(), labels.data(), labels.size()), "labels");
        std::vector<double> trace(misc_ablation_trace_len(result.get()));
        check(misc_ablation_objective_trace(result.get(), trace.data(), trace.size()), "trace");

        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            write_labels_csv(out_dir + "/" + name + "_labels.csv", labels);
        }

        json << (first_variant ? "\n" : ",\n");
        first_variant = false;
        json << "    \"" << name << "\": {\n";
        json << "      \"iterations\": " << misc_ablation_iterations(result.get()) << ",\n";
        json << "      \"converged\": " << (misc_ablation_converged(result.get()) ? "true" : "false");
        if (!views.columns.empty()) {
            json << ",\n      \"scores\": {";
            for (std::size_t v = 0; v < views.columns.size(); ++v) {
                double nmi_value = 0.0, f1_value = 0.0;
                check(misc_nmi(labels.data(), views.columns[v].data(), n, &nmi_value), "nmi");
                check(misc_f1_pairs(labels.data(), views.columns[v].data(), n, &f1_value), "f1");
                json << (v ? ", " : "") << "\"" << views.names[v] << "\": {\"nmi\": " << nmi_value
                     << ", \"f1\": " << f1_value << "}";
            }
            json << "}";
        }
        json << ",\n      \"objective_trace\": [";
        for (std::size_t t = 0; t < trace.size(); ++t) json << (t ? ", " : "") << trace[t];
        json << "]\n    }";
    }
    json << "\n  }\n}";
    std::cout << json.str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiple independent subspace clusterings"};
    app.require_subcommand(1);

    // run ------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run the full pipeline and write clusterings + report.json");
    InputOptions run_input;
    run_input.attach(run);
    std::string run_config, run_views, run_out = ".";
    run->add_option("--config", run_config, "INI-style config file (flags override file values)");
    run->add_option("--views", run_views, "ground-truth views CSV for scoring");
    run->add_option("--out", run_out, "output directory");
    // Flat overrides forwarded to the config vocabulary.
    std::map<std::string, std::string> run_flags;
    for (const char* key : {"lambda", "eps_neighbors", "kernel", "kernel_width", "k_override",
                            "v_override", "k_min", "k_max", "max_iter", "rel_tol", "seed",
                            "restarts", "parallel"}) {
        run->add_option("--" + std::string(key), run_flags[key]);
    }

    // generate ---------------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "emit a synthetic dataset CSV plus its views file");
    std::string gen_kind, gen_params, gen_out;
    std::size_t gen_n = 0;
    std::uint64_t gen_seed = 0;
    gen->add_option("--kind", gen_kind, "gaussian_blobs|atom|lsun|rings")->required();
    gen->add_option("--n", gen_n, "sample count")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--params", gen_params, "generator parameters as a JSON object");
    gen->add_option("--out", gen_out, "output CSV path")->required();

    // evaluate ----------------------------------------------------------------
    auto* eval = app.add_subcommand("evaluate", "score label files against ground-truth views");
    std::vector<std::string> eval_labels;
    std::string eval_views;
    eval->add_option("--labels", eval_labels, "clustering labels CSV (repeatable)")->required();
    eval->add_option("--views", eval_views, "views CSV")->required();

    // ablate -------------------------------------------------------------------
    auto* abl = app.add_subcommand("ablate", "run factorization variants, emit scores + traces");
    InputOptions abl_input;
    abl_input.attach(abl);
    std::string abl_variant = "all", abl_views, abl_out;
    int abl_k = 0;
    abl->add_option("--variant", abl_variant, "snmf|gsnmf|ksnmf|kgsnmf|all");
    abl->add_option("--k", abl_k, "cluster count (default: from first view)");
    abl->add_option("--views", abl_views, "ground-truth views CSV");
    abl->add_option("--out", abl_out, "directory for per-variant label files");
    std::map<std::string, std::string> abl_flags;
    for (const char* key : {"lambda", "eps_neighbors", "kernel", "kernel_width", "max_iter",
                            "rel_tol", "seed", "restarts"}) {
        abl->add_option("--" + std::string(key), abl_flags[key]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // 0 is --help / --version
    }

    try {
        auto collect = [](const CLI::App* cmd, const std::map<std::string, std::string>& flags) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& [key, value] : flags) {
                if (cmd->count("--" + key) > 0) out.emplace_back(key, value);
            }
            return out;
        };
        if (run->parsed()) {
            return cmd_run(run_input, collect(run, run_flags), run_config, run_views, run_out);
        }
        if (gen->parsed()) return cmd_generate(gen_kind, gen_n, gen_seed, gen_params, gen_out);
        if (eval->parsed()) return cmd_evaluate(eval_labels, eval_views);
        if (abl->parsed()) {
            return cmd_ablate(abl_input, abl_variant, abl_k, collect(abl, abl_flags), abl_views, abl_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
