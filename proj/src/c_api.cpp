#include "misc.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include <memory>

#include "misc/data_model.hpp"
#include "misc/errors.hpp"
#include "misc/factorization.hpp"
#include "misc/metrics.hpp"
#include "misc/model_selection.hpp"
#include "misc/pipeline.hpp"
#include "misc/rng.hpp"

struct misc_matrix {
    misc::DataMatrix data;
};

struct misc_dataset {
    misc::LabeledDataset dataset;
    misc_matrix matrix_view;  // borrowed view handed out by misc_dataset_matrix
};

struct misc_config {
    misc::PipelineConfig config;
};

struct misc_report {
    misc::RunReport report;
    size_t num_samples = 0;
};

struct misc_ablation {
    misc::FactorizationState state;
    std::vector<int> labels;
};

namespace {

thread_local std::string g_last_error;

misc_status fail(misc_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Runs `fn` and maps C++ failures onto status codes.
template <typename F>
misc_status guarded(F&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(MISC_ERR_INVALID_ARGUMENT, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(MISC_ERR_PARSE, e.what());
    } catch (const misc::ParseError& e) {
        return fail(MISC_ERR_PARSE, e.what());
    } catch (const misc::IoError& e) {
        return fail(MISC_ERR_IO, e.what());
    } catch (const std::runtime_error& e) {
        return fail(MISC_ERR_NUMERIC, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MISC_ERR_UNKNOWN, "out of memory");
    } catch (const std::exception& e) {
        return fail(MISC_ERR_UNKNOWN, e.what());
    } catch (...) {
        return fail(MISC_ERR_UNKNOWN, "unknown error");
    }
}

misc_status require(bool cond, const char* message) {
    return cond ? MISC_OK : fail(MISC_ERR_INVALID_ARGUMENT, message);
}

std::vector<int> to_int_labels(const uint32_t* labels, size_t n) {
    std::vector<int> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = static_cast<int>(labels[i]);
    return out;
}

misc_status copy_labels_out(const std::vector<int>& labels, uint32_t* buffer, size_t len,
                            const char* who) {
    if (buffer == nullptr || len < labels.size()) {
        return fail(MISC_ERR_INVALID_ARGUMENT, std::string(who) + ": buffer too small");
    }
    for (size_t i = 0; i < labels.size(); ++i) buffer[i] = static_cast<uint32_t>(labels[i]);
    return MISC_OK;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<misc::LabelView> collect_views(const uint32_t* const* views,
                                           const char* const* view_names, size_t num_views,
                                           size_t n) {
    std::vector<misc::LabelView> out;
    out.reserve(num_views);
    for (size_t v = 0; v < num_views; ++v) {
        if (views[v] == nullptr) throw std::invalid_argument("views: null label vector");
        misc::LabelView view;
        view.name = (view_names && view_names[v]) ? view_names[v] : "view" + std::to_string(v + 1);
        view.labels = to_int_labels(views[v], n);
        out.push_back(std::move(view));
    }
    return out;
}

}  // namespace

extern "C" {

const char* misc_version(void) { return "1.0.0"; }

const char* misc_last_error(void) { return g_last_error.c_str(); }

void misc_string_free(char* s) { delete[] s; }

misc_status misc_matrix_create(size_t d, size_t n, const double* values, misc_matrix** out) {
    if (misc_status s = require(values && out, "misc_matrix_create: null argument")) return s;
    return guarded([&] {
        auto m = std::make_unique<misc_matrix>();
        m->data.values = Eigen::Map<const Eigen::MatrixXd>(values, static_cast<Eigen::Index>(d),
                                                           static_cast<Eigen::Index>(n));
        m->data.validate();
        *out = m.release();
        return MISC_OK;
    });
}

misc_status misc_matrix_from_csv(const char* path, int samples_as_rows, misc_matrix** out) {
    if (misc_status s = require(path && out, "misc_matrix_from_csv: null argument")) return s;
    return guarded([&] {
        auto m = std::make_unique<misc_matrix>();
        m->data = misc::load_csv(path, samples_as_rows ? misc::CsvOrientation::samples_as_rows
                                                       : misc::CsvOrientation::features_as_rows);
        *out = m.release();
        return MISC_OK;
    });
}

size_t misc_matrix_num_features(const misc_matrix* m) {
    return m ? static_cast<size_t>(m->data.num_features()) : 0;
}

size_t misc_matrix_num_samples(const misc_matrix* m) {
    return m ? static_cast<size_t>(m->data.num_samples()) : 0;
}

misc_status misc_matrix_copy_values(const misc_matrix* m, double* buffer, size_t len) {
    if (misc_status s = require(m && buffer, "misc_matrix_copy_values: null argument")) return s;
    const size_t need = static_cast<size_t>(m->data.values.size());
    if (misc_status s = require(len >= need, "misc_matrix_copy_values: buffer too small")) return s;
    Eigen::Map<Eigen::MatrixXd>(buffer, m->data.values.rows(), m->data.values.cols()) = m->data.values;
    return MISC_OK;
}

void misc_matrix_free(misc_matrix* m) { delete m; }

namespace {

misc_dataset* wrap_dataset(misc::LabeledDataset&& ds) {
    auto out = std::make_unique<misc_dataset>();
    out->dataset = std::move(ds);
    out->matrix_view.data = out->dataset.data;
    return out.release();
}

}  // namespace

misc_status misc_dataset_generate(const char* kind, size_t n, uint64_t seed,
                                  const char* params_json, misc_dataset** out) {
    if (misc_status s = require(kind && out, "misc_dataset_generate: null argument")) return s;
    return guarded([&] {
        misc::GeneratorSpec spec;
        spec.kind = misc::generator_kind_from_string(kind);
        spec.n = n;
        spec.seed = seed;
        if (params_json && *params_json) spec.params = nlohmann::json::parse(params_json);
        *out = wrap_dataset(misc::generate(spec));
        return MISC_OK;
    });
}

misc_status misc_dataset_compose(const misc_dataset* const* parts, size_t num_parts, uint64_t seed,
                                 misc_dataset** out) {
    if (misc_status s = require(parts && out && num_parts > 0, "misc_dataset_compose: null argument"))
        return s;
    return guarded([&] {
        std::vector<misc::LabeledDataset> inputs;
        inputs.reserve(num_parts);
        for (size_t i = 0; i < num_parts; ++i) {
            if (!parts[i]) throw std::invalid_argument("misc_dataset_compose: null part");
            inputs.push_back(parts[i]->dataset);
        }
        *out = wrap_dataset(misc::compose_multiview(inputs, seed));
        return MISC_OK;
    });
}

const misc_matrix* misc_dataset_matrix(const misc_dataset* ds) {
    return ds ? &ds->matrix_view : nullptr;
}

size_t misc_dataset_num_views(const misc_dataset* ds) { return ds ? ds->dataset.views.size() : 0; }

const char* misc_dataset_view_name(const misc_dataset* ds, size_t view) {
    if (!ds || view >= ds->dataset.views.size()) return nullptr;
    return ds->dataset.views[view].name.c_str();
}

misc_status misc_dataset_view_labels(const misc_dataset* ds, size_t view, uint32_t* buffer,
                                     size_t len) {
    if (misc_status s = require(ds, "misc_dataset_view_labels: null dataset")) return s;
    if (misc_status s = require(view < ds->dataset.views.size(), "misc_dataset_view_labels: view index out of range"))
        return s;
    return copy_labels_out(ds->dataset.views[view].labels, buffer, len, "misc_dataset_view_labels");
}

void misc_dataset_free(misc_dataset* ds) { delete ds; }

misc_config* misc_config_create(void) { return new (std::nothrow) misc_config(); }

misc_status misc_config_set(misc_config* cfg, const char* key, const char* value) {
    if (misc_status s = require(cfg && key && value, "misc_config_set: null argument")) return s;
    return guarded([&] {
        misc::apply_config_entry(cfg->config, key, value);
        return MISC_OK;
    });
}

misc_status misc_config_load_file(misc_config* cfg, const char* path) {
    if (misc_status s = require(cfg && path, "misc_config_load_file: null argument")) return s;
    return guarded([&] {
        misc::load_config_file(cfg->config, path);
        return MISC_OK;
    });
}

void misc_config_free(misc_config* cfg) { delete cfg; }

misc_status misc_run(const misc_matrix* X, const misc_config* cfg, const uint32_t* const* views,
                     const char* const* view_names, size_t num_views, misc_report** out) {
    if (misc_status s = require(X && cfg && out, "misc_run: null argument")) return s;
    if (misc_status s = require(num_views == 0 || views, "misc_run: num_views > 0 but views is null"))
        return s;
    return guarded([&] {
        auto r = std::make_unique<misc_report>();
        r->num_samples = static_cast<size_t>(X->data.num_samples());
        if (num_views > 0) {
            const auto label_views = collect_views(views, view_names, num_views, r->num_samples);
            r->report = misc::run_misc(X->data, cfg->config, &label_views);
        } else {
            r->report = misc::run_misc(X->data, cfg->config, nullptr);
        }
        *out = r.release();
        return MISC_OK;
    });
}

size_t misc_report_num_clusterings(const misc_report* r) {
    return r ? r->report.subspaces.size() : 0;
}

size_t misc_report_num_samples(const misc_report* r) { return r ? r->num_samples : 0; }

misc_status misc_report_k(const misc_report* r, size_t idx, size_t* out) {
    if (misc_status s = require(r && out, "misc_report_k: null argument")) return s;
    if (misc_status s = require(idx < r->report.subspaces.size(), "misc_report_k: index out of range"))
        return s;
    *out = static_cast<size_t>(r->report.subspaces[idx].k);
    return MISC_OK;
}

misc_status misc_report_labels(const misc_report* r, size_t idx, uint32_t* buffer, size_t len) {
    if (misc_status s = require(r, "misc_report_labels: null report")) return s;
    if (misc_status s = require(idx < r->report.subspaces.size(), "misc_report_labels: index out of range"))
        return s;
    return copy_labels_out(r->report.subspaces[idx].clustering.labels, buffer, len,
                           "misc_report_labels");
}

misc_status misc_report_json(const misc_report* r, char** out) {
    if (misc_status s = require(r && out, "misc_report_json: null argument")) return s;
    return guarded([&] {
        *out = dup_string(misc::report_to_json(r->report).dump(2));
        return MISC_OK;
    });
}

void misc_report_free(misc_report* r) { delete r; }

misc_status misc_ablate(const misc_matrix* X, const char* variant, size_t k,
                        const misc_config* cfg, misc_ablation** out) {
    if (misc_status s = require(X && variant && cfg && out, "misc_ablate: null argument")) return s;
    return guarded([&] {
        const misc::SolverVariant v = misc::solver_variant_from_string(variant);
        misc::SolverConfig solver;
        solver.lambda = cfg->config.lambda;
        solver.max_iter = cfg->config.max_iter;
        solver.rel_tol = cfg->config.rel_tol;
        solver.seed = misc::derive_seed(cfg->config.seed, 0xab1a7e);
        auto a = std::make_unique<misc_ablation>();
        a->state = misc::ablation_solver(X->data.values, static_cast<int>(k), v, solver,
                                         cfg->config.kernel, cfg->config.eps_neighbors);
        a->labels = misc::kmeans(a->state.H, static_cast<int>(k),
                                 misc::derive_seed(cfg->config.seed, 0xab1a7f),
                                 cfg->config.kmeans_restarts)
                        .labels;
        *out = a.release();
        return MISC_OK;
    });
}

size_t misc_ablation_iterations(const misc_ablation* a) {
    return a ? static_cast<size_t>(a->state.iterations) : 0;
}

int misc_ablation_converged(const misc_ablation* a) { return a && a->state.converged ? 1 : 0; }

size_t misc_ablation_trace_len(const misc_ablation* a) {
    return a ? a->state.objective_trace.size() : 0;
}

misc_status misc_ablation_objective_trace(const misc_ablation* a, double* buffer, size_t len) {
    if (misc_status s = require(a && buffer, "misc_ablation_objective_trace: null argument")) return s;
    if (misc_status s = require(len >= a->state.objective_trace.size(),
                                "misc_ablation_objective_trace: buffer too small"))
        return s;
    std::memcpy(buffer, a->state.objective_trace.data(),
                a->state.objective_trace.size() * sizeof(double));
    return MISC_OK;
}

misc_status misc_ablation_labels(const misc_ablation* a, uint32_t* buffer, size_t len) {
    if (misc_status s = require(a, "misc_ablation_labels: null handle")) return s;
    return copy_labels_out(a->labels, buffer, len, "misc_ablation_labels");
}

void misc_ablation_free(misc_ablation* a) { delete a; }

misc_status misc_nmi(const uint32_t* a, const uint32_t* b, size_t n, double* out) {
    if (misc_status s = require(a && b && out, "misc_nmi: null argument")) return s;
    return guarded([&] {
        *out = misc::nmi(to_int_labels(a, n), to_int_labels(b, n));
        return MISC_OK;
    });
}

misc_status misc_f1_pairs(const uint32_t* a, const uint32_t* b, size_t n, double* out) {
    if (misc_status s = require(a && b && out, "misc_f1_pairs: null argument")) return s;
    return guarded([&] {
        *out = misc::f1_pairs(to_int_labels(a, n), to_int_labels(b, n));
        return MISC_OK;
    });
}

misc_status misc_evaluate_views(const uint32_t* const* clusterings, size_t num_clusterings,
                                const uint32_t* const* views, const char* const* view_names,
                                size_t num_views, size_t n, char** json_out) {
    if (misc_status s = require(clusterings && views && json_out && num_clusterings > 0 && num_views > 0,
                                "misc_evaluate_views: null or empty argument"))
        return s;
    return guarded([&] {
        std::vector<std::vector<int>> cs;
        cs.reserve(num_clusterings);
        for (size_t i = 0; i < num_clusterings; ++i) {
            if (!clusterings[i]) throw std::invalid_argument("misc_evaluate_views: null clustering");
            cs.push_back(to_int_labels(clusterings[i], n));
        }
        const auto label_views = collect_views(views, view_names, num_views, n);
        *json_out = dup_string(misc::view_report_to_json(misc::evaluate_views(cs, label_views)).dump(2));
        return MISC_OK;
    });
}

}  // extern "C"
