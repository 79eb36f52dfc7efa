// Exercises the shared-library surface exactly as an external C client
// would: opaque handles, status codes and misc_last_error only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "misc.h"

namespace {

std::string take(char* s) {
    std::string out = s ? s : "";
    misc_string_free(s);
    return out;
}

struct TempCsv {
    std::string path;
    explicit TempCsv(const std::string& name, const std::string& content) : path(name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("c_api") {

TEST_CASE("matrix create, dims, copy out") {
    const std::vector<double> values{1, 2, 3, 4, 5, 6};  // 2x3 column-major
    misc_matrix* m = nullptr;
    REQUIRE(misc_matrix_create(2, 3, values.data(), &m) == MISC_OK);
    CHECK(misc_matrix_num_features(m) == 2);
    CHECK(misc_matrix_num_samples(m) == 3);
    std::vector<double> out(6, 0.0);
    CHECK(misc_matrix_copy_values(m, out.data(), out.size()) == MISC_OK);
    CHECK(out == values);

    std::vector<double> tiny(2);
    CHECK(misc_matrix_copy_values(m, tiny.data(), tiny.size()) == MISC_ERR_INVALID_ARGUMENT);
    misc_matrix_free(m);

    CHECK(misc_matrix_create(2, 3, nullptr, &m) == MISC_ERR_INVALID_ARGUMENT);
    CHECK(std::string(misc_last_error()).find("null") != std::string::npos);
}

TEST_CASE("csv loading reports parse and io errors") {
    TempCsv good("capi_good.csv", "1,2\n3,4\n5,6\n");
    misc_matrix* m = nullptr;
    REQUIRE(misc_matrix_from_csv(good.path.c_str(), 1, &m) == MISC_OK);
    CHECK(misc_matrix_num_features(m) == 2);
    CHECK(misc_matrix_num_samples(m) == 3);
    misc_matrix_free(m);

    TempCsv bad("capi_bad.csv", "1,2\nx,4\n");
    CHECK(misc_matrix_from_csv(bad.path.c_str(), 1, &m) == MISC_ERR_PARSE);
    CHECK(std::string(misc_last_error()).find("row 2") != std::string::npos);

    CHECK(misc_matrix_from_csv("does_not_exist.csv", 1, &m) == MISC_ERR_IO);
}

TEST_CASE("dataset generation and views") {
    misc_dataset* ds = nullptr;
    REQUIRE(misc_dataset_generate("atom", 100, 3, nullptr, &ds) == MISC_OK);
    const misc_matrix* m = misc_dataset_matrix(ds);
    CHECK(misc_matrix_num_features(m) == 3);
    CHECK(misc_matrix_num_samples(m) == 100);
    REQUIRE(misc_dataset_num_views(ds) == 1);
    CHECK(std::string(misc_dataset_view_name(ds, 0)) == "atom");
    std::vector<uint32_t> labels(100);
    CHECK(misc_dataset_view_labels(ds, 0, labels.data(), labels.size()) == MISC_OK);
    CHECK(misc_dataset_view_labels(ds, 1, labels.data(), labels.size()) ==
          MISC_ERR_INVALID_ARGUMENT);

    misc_dataset* ds2 = nullptr;
    REQUIRE(misc_dataset_generate("gaussian_blobs", 100, 4, "{\"k\": 2, \"dim\": 2}", &ds2) ==
            MISC_OK);
    const misc_dataset* parts[2] = {ds, ds2};
    misc_dataset* composite = nullptr;
    REQUIRE(misc_dataset_compose(parts, 2, 9, &composite) == MISC_OK);
    CHECK(misc_matrix_num_features(misc_dataset_matrix(composite)) == 5);
    CHECK(misc_dataset_num_views(composite) == 2);

    misc_dataset_free(composite);
    misc_dataset_free(ds2);
    misc_dataset_free(ds);

    CHECK(misc_dataset_generate("mystery", 100, 3, nullptr, &ds) == MISC_ERR_INVALID_ARGUMENT);
    CHECK(misc_dataset_generate("atom", 100, 3, "{not json", &ds) == MISC_ERR_PARSE);
}

TEST_CASE("config vocabulary") {
    misc_config* cfg = misc_config_create();
    REQUIRE(cfg != nullptr);
    CHECK(misc_config_set(cfg, "lambda", "5") == MISC_OK);
    CHECK(misc_config_set(cfg, "seed", "11") == MISC_OK);
    CHECK(misc_config_set(cfg, "bogus", "1") == MISC_ERR_INVALID_ARGUMENT);
    CHECK(std::string(misc_last_error()).find("bogus") != std::string::npos);
    CHECK(misc_config_load_file(cfg, "missing.ini") == MISC_ERR_IO);
    misc_config_free(cfg);
}

TEST_CASE("full pipeline run through the C API") {
    misc_dataset* a = nullptr;
    misc_dataset* b = nullptr;
    REQUIRE(misc_dataset_generate(
                "gaussian_blobs", 240, 1,
                "{\"centers\": [[9,0],[-5,7],[-5,-7],[1.5,1]], \"std\": 1.0}", &a) == MISC_OK);
    REQUIRE(misc_dataset_generate(
                "gaussian_blobs", 240, 2,
                "{\"centers\": [[-3,-3],[3,3]], \"std\": [[1.6,0.5],[0.5,1.6]]}", &b) == MISC_OK);
    const misc_dataset* parts[2] = {a, b};
    misc_dataset* composite = nullptr;
    REQUIRE(misc_dataset_compose(parts, 2, 3, &composite) == MISC_OK);

    const misc_matrix* X = misc_dataset_matrix(composite);
    const size_t n = misc_matrix_num_samples(X);

    std::vector<uint32_t> view0(n), view1(n);
    REQUIRE(misc_dataset_view_labels(composite, 0, view0.data(), n) == MISC_OK);
    REQUIRE(misc_dataset_view_labels(composite, 1, view1.data(), n) == MISC_OK);
    const uint32_t* views[2] = {view0.data(), view1.data()};
    const char* names[2] = {misc_dataset_view_name(composite, 0),
                            misc_dataset_view_name(composite, 1)};

    misc_config* cfg = misc_config_create();
    REQUIRE(misc_config_set(cfg, "seed", "5") == MISC_OK);

    misc_report* report = nullptr;
    REQUIRE(misc_run(X, cfg, views, names, 2, &report) == MISC_OK);
    const size_t v = misc_report_num_clusterings(report);
    CHECK(v >= 1);
    CHECK(misc_report_num_samples(report) == n);
    for (size_t i = 0; i < v; ++i) {
        size_t k = 0;
        CHECK(misc_report_k(report, i, &k) == MISC_OK);
        CHECK(k >= 1);
        std::vector<uint32_t> labels(n);
        CHECK(misc_report_labels(report, i, labels.data(), n) == MISC_OK);
    }
    CHECK(misc_report_labels(report, v, nullptr, 0) == MISC_ERR_INVALID_ARGUMENT);

    char* json1 = nullptr;
    REQUIRE(misc_report_json(report, &json1) == MISC_OK);
    const std::string text1 = take(json1);
    auto parsed = nlohmann::json::parse(text1);
    CHECK(parsed.contains("v"));
    CHECK(parsed.contains("metrics"));

    // determinism modulo timings
    misc_report* report2 = nullptr;
    REQUIRE(misc_run(X, cfg, views, names, 2, &report2) == MISC_OK);
    char* json2 = nullptr;
    REQUIRE(misc_report_json(report2, &json2) == MISC_OK);
    auto parsed2 = nlohmann::json::parse(take(json2));
    parsed.erase("timings_ms");
    parsed2.erase("timings_ms");
    CHECK(parsed.dump() == parsed2.dump());

    misc_report_free(report2);
    misc_report_free(report);
    misc_config_free(cfg);
    misc_dataset_free(composite);
    misc_dataset_free(b);
    misc_dataset_free(a);
}

TEST_CASE("ablation and metrics through the C API") {
    misc_dataset* ds = nullptr;
    REQUIRE(misc_dataset_generate("lsun", 100, 5, nullptr, &ds) == MISC_OK);
    const misc_matrix* X = misc_dataset_matrix(ds);
    const size_t n = misc_matrix_num_samples(X);

    misc_config* cfg = misc_config_create();
    REQUIRE(misc_config_set(cfg, "seed", "7") == MISC_OK);

    misc_ablation* abl = nullptr;
    REQUIRE(misc_ablate(X, "kgsnmf", 3, cfg, &abl) == MISC_OK);
    CHECK(misc_ablation_iterations(abl) >= 1);
    const size_t trace_len = misc_ablation_trace_len(abl);
    REQUIRE(trace_len >= 2);
    std::vector<double> trace(trace_len);
    REQUIRE(misc_ablation_objective_trace(abl, trace.data(), trace_len) == MISC_OK);
    for (size_t t = 1; t < trace_len; ++t) CHECK(trace[t] <= trace[t - 1] + 1e-8 * std::abs(trace[t - 1]));

    std::vector<uint32_t> labels(n);
    REQUIRE(misc_ablation_labels(abl, labels.data(), n) == MISC_OK);
    misc_ablation_free(abl);

    CHECK(misc_ablate(X, "qsnmf", 3, cfg, &abl) == MISC_ERR_INVALID_ARGUMENT);

    std::vector<uint32_t> truth(n);
    REQUIRE(misc_dataset_view_labels(ds, 0, truth.data(), n) == MISC_OK);
    double score = -1.0;
    REQUIRE(misc_nmi(labels.data(), truth.data(), n, &score) == MISC_OK);
    CHECK(score >= 0.0);
    CHECK(score <= 1.0);
    REQUIRE(misc_f1_pairs(labels.data(), truth.data(), n, &score) == MISC_OK);
    CHECK(score >= 0.0);

    const uint32_t* clusterings[1] = {labels.data()};
    const uint32_t* views[1] = {truth.data()};
    const char* names[1] = {"truth"};
    char* json = nullptr;
    REQUIRE(misc_evaluate_views(clusterings, 1, views, names, 1, n, &json) == MISC_OK);
    auto parsed = nlohmann::json::parse(take(json));
    CHECK(parsed["views"][0] == "truth");
    CHECK(parsed["cells"].size() == 1);

    misc_config_free(cfg);
    misc_dataset_free(ds);
}

TEST_CASE("version and error text are always available") {
    CHECK(std::string(misc_version()).find('.') != std::string::npos);
    CHECK(misc_last_error() != nullptr);
}

}  // TEST_SUITE
