#include "misc/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "misc/errors.hpp"
#include "misc/ica.hpp"
#include "misc/rng.hpp"

namespace misc {

namespace {

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse number from '" + value + "'");
    }
}

long parse_integer(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    const long i = static_cast<long>(v);
    if (static_cast<double>(i) != v) {
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "input") {
        cfg.input_path = value;
    } else if (key == "orientation") {
        if (value == "samples_as_rows") {
            cfg.orientation = CsvOrientation::samples_as_rows;
        } else if (value == "features_as_rows") {
            cfg.orientation = CsvOrientation::features_as_rows;
        } else {
            throw std::invalid_argument("config key 'orientation': unknown value '" + value + "'");
        }
    } else if (key == "generator") {
        if (!cfg.generator) cfg.generator.emplace();
        cfg.generator->kind = generator_kind_from_string(value);
    } else if (key == "generator_n") {
        if (!cfg.generator) cfg.generator.emplace();
        const long n = parse_integer(key, value);
        if (n < 2) throw std::invalid_argument("config key 'generator_n': must be >= 2");
        cfg.generator->n = static_cast<std::size_t>(n);
    } else if (key == "generator_seed") {
        if (!cfg.generator) cfg.generator.emplace();
        cfg.generator->seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else if (key == "generator_params") {
        if (!cfg.generator) cfg.generator.emplace();
        try {
            cfg.generator->params = nlohmann::json::parse(value);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("config key 'generator_params': invalid JSON: " + std::string(e.what()));
        }
    } else if (key == "lambda") {
        cfg.lambda = parse_number(key, value);
        if (cfg.lambda < 0.0) throw std::invalid_argument("config key 'lambda': must be >= 0");
    } else if (key == "eps_neighbors") {
        cfg.eps_neighbors = static_cast<int>(parse_integer(key, value));
        if (cfg.eps_neighbors < 1) throw std::invalid_argument("config key 'eps_neighbors': must be >= 1");
    } else if (key == "kernel") {
        cfg.kernel.kind = kernel_kind_from_string(value);
    } else if (key == "kernel_width") {
        if (value == "auto") {
            cfg.kernel.width.reset();
        } else {
            const double w = parse_number(key, value);
            if (w <= 0.0) throw std::invalid_argument("config key 'kernel_width': must be positive");
            cfg.kernel.width = w;
        }
    } else if (key == "k_override") {
        std::vector<int> ks;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            ks.push_back(static_cast<int>(parse_integer(key, trim(item))));
            if (ks.back() < 1) throw std::invalid_argument("config key 'k_override': entries must be >= 1");
        }
        if (ks.empty()) throw std::invalid_argument("config key 'k_override': empty list");
        cfg.k_override = std::move(ks);
    } else if (key == "v_override") {
        const long v = parse_integer(key, value);
        if (v < 1) throw std::invalid_argument("config key 'v_override': must be >= 1");
        cfg.v_override = static_cast<int>(v);
    } else if (key == "k_min") {
        if (!cfg.k_range) cfg.k_range.emplace();
        cfg.k_range->k_min = static_cast<int>(parse_integer(key, value));
    } else if (key == "k_max") {
        if (!cfg.k_range) cfg.k_range.emplace();
        cfg.k_range->k_max = static_cast<int>(parse_integer(key, value));
    } else if (key == "max_iter") {
        cfg.max_iter = static_cast<int>(parse_integer(key, value));
        if (cfg.max_iter < 1) throw std::invalid_argument("config key 'max_iter': must be >= 1");
    } else if (key == "rel_tol") {
        cfg.rel_tol = parse_number(key, value);
        if (cfg.rel_tol <= 0.0) throw std::invalid_argument("config key 'rel_tol': must be positive");
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else if (key == "restarts") {
        cfg.kmeans_restarts = static_cast<int>(parse_integer(key, value));
        if (cfg.kmeans_restarts < 1) throw std::invalid_argument("config key 'restarts': must be >= 1");
    } else if (key == "output_dir") {
        cfg.output_dir = value;
    } else if (key == "parallel") {
        cfg.parallel = parse_bool(key, value);
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

void load_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        apply_config_entry(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    if (cfg.input_path) j["input"] = *cfg.input_path;
    j["orientation"] =
        cfg.orientation == CsvOrientation::samples_as_rows ? "samples_as_rows" : "features_as_rows";
    if (cfg.generator) {
        j["generator"] = {{"kind", to_string(cfg.generator->kind)},
                          {"n", cfg.generator->n},
                          {"seed", cfg.generator->seed},
                          {"params", cfg.generator->params}};
    }
    j["lambda"] = cfg.lambda;
    j["eps_neighbors"] = cfg.eps_neighbors;
    j["kernel"] = cfg.kernel.kind == KernelSpec::Kind::gaussian ? "gaussian" : "linear";
    j["kernel_width"] = cfg.kernel.width ? nlohmann::json(*cfg.kernel.width) : nlohmann::json("auto");
    if (cfg.k_override) j["k_override"] = *cfg.k_override;
    if (cfg.v_override) j["v_override"] = *cfg.v_override;
    if (cfg.k_range) j["k_range"] = {{"k_min", cfg.k_range->k_min}, {"k_max", cfg.k_range->k_max}};
    j["max_iter"] = cfg.max_iter;
    j["rel_tol"] = cfg.rel_tol;
    j["seed"] = cfg.seed;
    j["restarts"] = cfg.kmeans_restarts;
    j["parallel"] = cfg.parallel;
    return j;
}

std::vector<std::vector<int>> RunReport::clusterings() const {
    std::vector<std::vector<int>> out;
    out.reserve(subspaces.size());
    for (const auto& s : subspaces) out.push_back(s.clustering.labels);
    return out;
}

namespace {

class StageClock {
public:
    explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}

    template <typename F>
    auto time(const std::string& stage, F&& fn) -> decltype(fn()) {
        const auto start = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                record(stage, start);
            } else {
                auto result = fn();
                record(stage, start);
                return result;
            }
        } catch (const std::exception& e) {
            record(stage, start);
            throw std::runtime_error("[stage " + stage + "] " + e.what());
        }
    }

private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
        const auto end = std::chrono::steady_clock::now();
        sink_[stage] = std::chrono::duration<double, std::milli>(end - start).count();
    }

    std::map<std::string, double>& sink_;
};

Eigen::MatrixXd subspace_rows(const Eigen::MatrixXd& S, const std::vector<int>& components) {
    Eigen::MatrixXd block(static_cast<Eigen::Index>(components.size()), S.cols());
    for (std::size_t r = 0; r < components.size(); ++r) {
        block.row(static_cast<Eigen::Index>(r)) = S.row(components[r]);
    }
    return block;
}

SubspaceResult cluster_subspace(const Eigen::MatrixXd& S, const std::vector<int>& components,
                                std::size_t index, const PipelineConfig& cfg,
                                const std::optional<int> forced_k) {
    SubspaceResult result;
    result.components = components;
    const Eigen::MatrixXd block = subspace_rows(S, components);
    const Eigen::Index n = block.cols();

    int k;
    if (forced_k) {
        k = *forced_k;
        if (k > n) throw std::invalid_argument("k override " + std::to_string(k) + " exceeds n");
    } else {
        KRange range;
        if (cfg.k_range) {
            range = *cfg.k_range;
        } else {
            range.k_min = 2;
            range.k_max = std::max(2, std::min(10, static_cast<int>(n / 10)));
        }
        range.k_min = std::min<int>(range.k_min, static_cast<int>(n));
        range.k_max = std::min<int>(range.k_max, static_cast<int>(n));
        k = select_k(block, range.k_min, range.k_max, derive_seed(cfg.seed, 100 + index));
    }
    result.k = k;

    const Eigen::MatrixXd K = gram(block, cfg.kernel);
    SolverConfig solver;
    solver.lambda = cfg.lambda;
    solver.max_iter = cfg.max_iter;
    solver.rel_tol = cfg.rel_tol;
    solver.seed = derive_seed(cfg.seed, 200 + index);

    FactorizationState state;
    if (cfg.lambda > 0.0) {
        const NeighborhoodGraph graph = knn_graph(block, std::min<int>(cfg.eps_neighbors, static_cast<int>(n - 1)));
        state = kgsnmf(K, &graph, k, solver);
    } else {
        state = kgsnmf(K, nullptr, k, solver);
    }

    result.converged = state.converged;
    result.iterations = state.iterations;
    result.final_objective = state.objective_trace.back();
    result.objective_trace = state.objective_trace;
    result.clustering = kmeans(state.H, k, derive_seed(cfg.seed, 300 + index), cfg.kmeans_restarts);
    return result;
}

}  // namespace

RunReport run_misc(const DataMatrix& X, const PipelineConfig& cfg,
                   const std::vector<LabelView>* views) {
    RunReport report;
    report.config_echo = config_to_json(cfg);
    StageClock clock(report.timings_ms);
    const auto t_start = std::chrono::steady_clock::now();

    const DataMatrix standardized =
        clock.time("standardize", [&] { return standardize(X, &report.dropped_features); });
    const WhitenResult whitened = clock.time("whiten", [&] { return whiten(standardized); });
    const SourceDecomposition dec = clock.time("ica", [&] {
        return fast_ica(whitened, cfg.max_iter, 1e-6, derive_seed(cfg.seed, 1));
    });

    report.trace = clock.time("merge", [&] { return merge_subspaces(dec.sources); });
    report.partition = clock.time("select_partition", [&]() -> SubspacePartition {
        if (cfg.v_override) {
            const int v = *cfg.v_override;
            for (const auto& step : report.trace.steps) {
                if (step.partition.num_groups() == v) return step.partition;
            }
            // The recorded trace stopped before reaching v groups; drive the
            // same greedy merge past the stop rule.
            return merge_to_target(dec.sources, v);
        }
        return select_partition(report.trace);
    });
    report.v = report.partition.num_groups();

    std::vector<std::optional<int>> forced(report.partition.groups.size());
    if (cfg.k_override) {
        const auto& ks = *cfg.k_override;
        if (ks.size() == 1) {
            std::fill(forced.begin(), forced.end(), ks.front());
        } else if (ks.size() == forced.size()) {
            for (std::size_t i = 0; i < ks.size(); ++i) forced[i] = ks[i];
        } else {
            throw std::runtime_error("[stage subspace_clustering] k_override has " +
                                     std::to_string(ks.size()) + " entries for v=" +
                                     std::to_string(forced.size()) + " subspaces");
        }
    }

    clock.time("subspace_clustering", [&] {
        report.subspaces.resize(report.partition.groups.size());
        auto task = [&](std::size_t j) {
            report.subspaces[j] =
                cluster_subspace(dec.sources, report.partition.groups[j], j, cfg, forced[j]);
        };
        if (cfg.parallel && report.partition.groups.size() > 1) {
            std::vector<std::thread> workers;
            std::vector<std::exception_ptr> errors(report.partition.groups.size());
            for (std::size_t j = 0; j < report.partition.groups.size(); ++j) {
                workers.emplace_back([&, j] {
                    try {
                        task(j);
                    } catch (...) {
                        errors[j] = std::current_exception();
                    }
                });
            }
            for (auto& w : workers) w.join();
            for (const auto& err : errors) {
                if (err) std::rethrow_exception(err);
            }
        } else {
            for (std::size_t j = 0; j < report.partition.groups.size(); ++j) task(j);
        }
    });

    if (views) {
        clock.time("metrics", [&] { report.metrics = evaluate_views(report.clusterings(), *views); });
    }

    report.timings_ms["total"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

nlohmann::json report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["v"] = report.v;
    j["partition"] = report.partition.groups;
    j["merge_trace"] = trace_to_json(report.trace);
    nlohmann::json subspaces = nlohmann::json::array();
    for (const auto& s : report.subspaces) {
        subspaces.push_back({{"components", s.components},
                             {"k", s.k},
                             {"iterations", s.iterations},
                             {"converged", s.converged},
                             {"objective", s.final_objective}});
    }
    j["subspaces"] = std::move(subspaces);
    j["clusterings"] = report.clusterings();
    if (report.metrics) j["metrics"] = view_report_to_json(*report.metrics);
    j["dropped_features"] = report.dropped_features;
    j["config"] = report.config_echo;
    nlohmann::json timings;
    for (const auto& [stage, ms] : report.timings_ms) timings[stage] = ms;
    j["timings_ms"] = std::move(timings);
    return j;
}

}  // namespace misc
