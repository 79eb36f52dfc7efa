#include <doctest.h>

#include "misc/metrics.hpp"
#include "misc/rng.hpp"

#include "../support/helpers.hpp"
#include "../support/oracles.hpp"

using namespace misc;

TEST_SUITE("metrics") {

TEST_CASE("nmi basics") {
    std::vector<int> a{0, 0, 1, 1, 2, 2};
    CHECK(nmi(a, a) == doctest::Approx(1.0));

    std::vector<int> relabeled{2, 2, 0, 0, 1, 1};
    CHECK(nmi(a, relabeled) == doctest::Approx(1.0));

    std::vector<int> x{0, 0, 1, 1}, y{0, 1, 0, 1};
    CHECK(nmi(x, y) == doctest::Approx(0.0));

    std::vector<int> ones{0, 0, 0, 0};
    CHECK(nmi(ones, ones) == doctest::Approx(1.0));
    CHECK(nmi(ones, x) == doctest::Approx(0.0));
    CHECK(nmi(x, ones) == doctest::Approx(0.0));

    CHECK_THROWS_AS(nmi({0, 1}, {0, 1, 2}), std::invalid_argument);
}

TEST_CASE("f1_pairs basics") {
    std::vector<int> a{0, 0, 1, 1};
    CHECK(f1_pairs(a, a) == doctest::Approx(1.0));

    std::vector<int> singletons{0, 1, 2, 3};
    CHECK(f1_pairs(singletons, a) == doctest::Approx(0.0));

    std::vector<int> all_same{0, 0, 0, 0};
    CHECK(f1_pairs(a, all_same) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK(f1_pairs(a, all_same) == doctest::Approx(f1_pairs(all_same, a)));
    CHECK_THROWS_AS(f1_pairs({0}, {0}), std::invalid_argument);
}

TEST_CASE("metrics are invariant to relabeling") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = testutil::random_labels(10, 3, 100 + trial);
        auto b = testutil::random_labels(10, 3, 200 + trial);
        std::vector<int> remap{2, 0, 1};
        std::vector<int> a2(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) a2[i] = remap[static_cast<std::size_t>(a[i])];
        CHECK(nmi(a, b) == doctest::Approx(nmi(a2, b)).epsilon(1e-12));
        CHECK(f1_pairs(a, b) == doctest::Approx(f1_pairs(a2, b)).epsilon(1e-12));
    }
}

TEST_CASE("metrics match brute-force oracles on 200 random instances") {
    for (int trial = 0; trial < 200; ++trial) {
        Rng rng(static_cast<std::uint64_t>(trial) * 31 + 7);
        const std::size_t n = 2 + rng.index(11);  // 2..12
        const int k = 1 + static_cast<int>(rng.index(4));
        auto a = testutil::random_labels(n, k, 300 + trial);
        auto b = testutil::random_labels(n, k, 900 + trial);
        CHECK(nmi(a, b) == doctest::Approx(std::clamp(oracle::nmi(a, b), 0.0, 1.0)).epsilon(1e-12));
        CHECK(f1_pairs(a, b) == doctest::Approx(oracle::f1_pairs(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("adjusted rand sanity") {
    std::vector<int> a{0, 0, 1, 1};
    CHECK(adjusted_rand(a, a) == doctest::Approx(1.0));
    std::vector<int> b{0, 1, 0, 1};
    CHECK(adjusted_rand(a, b) < 0.2);
}

TEST_CASE("evaluate_views builds the full cross product") {
    std::vector<int> v1{0, 0, 1, 1, 2, 2};
    std::vector<int> v2{0, 1, 0, 1, 0, 1};
    std::vector<LabelView> views{{"first", v1}, {"second", v2}};
    ViewReport report = evaluate_views({v1, v2}, views);

    REQUIRE(report.cells.size() == 2);
    REQUIRE(report.cells[0].size() == 2);
    CHECK(report.cells[0][0].nmi == doctest::Approx(1.0));
    CHECK(report.cells[0][0].f1 == doctest::Approx(1.0));
    CHECK(report.cells[1][1].nmi == doctest::Approx(1.0));
    CHECK(report.cells[0][1].nmi == doctest::Approx(nmi(v1, v2)));
    CHECK(report.col_names == std::vector<std::string>{"first", "second"});

    ViewReport single = evaluate_views({v1}, {views[0]});
    CHECK(single.cells.size() == 1);
    CHECK(single.cells[0].size() == 1);

    nlohmann::json j = view_report_to_json(report);
    CHECK(j["views"].size() == 2);
    CHECK(j["cells"][0][0]["nmi"] == doctest::Approx(1.0));

    const std::string table = view_report_to_table(report);
    CHECK(table.find("first") != std::string::npos);
    CHECK(table.find("C1") != std::string::npos);
}

}  // TEST_SUITE
