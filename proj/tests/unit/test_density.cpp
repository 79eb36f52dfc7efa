#include <doctest.h>

#include <cmath>
#include <numbers>

#include "misc/density.hpp"
#include "misc/rng.hpp"

#include "../support/oracles.hpp"

using namespace misc;

namespace {

Eigen::MatrixXd one_row(std::initializer_list<double> values) {
    Eigen::MatrixXd m(1, static_cast<Eigen::Index>(values.size()));
    Eigen::Index j = 0;
    for (double v : values) m(0, j++) = v;
    return m;
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("silverman bandwidth on a two-point row") {
    DensityModel model = fit_kde(one_row({0.0, 1.0}));
    // 1.06 * 0.5 * 2^(-1/5)
    CHECK(model.bandwidths(0) == doctest::Approx(0.4613918035869458).epsilon(1e-12));
}

TEST_CASE("constant row gets the bandwidth floor") {
    DensityModel model = fit_kde(one_row({2.0, 2.0, 2.0}));
    CHECK(model.bandwidths(0) == doctest::Approx(1e-6));
}

TEST_CASE("fit_kde rejects single samples") {
    Eigen::MatrixXd single(1, 1);
    single << 0.0;
    CHECK_THROWS_AS(fit_kde(single), std::invalid_argument);
}

TEST_CASE("two normal rows score near the true Gaussian density") {
    Rng rng(42);
    Eigen::MatrixXd S(2, 500);
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 500; ++j) S(i, j) = rng.normal();
    }
    DensityModel model = fit_kde(S);
    const double mean_log2 = log2_density(model, S).mean();
    const double mean_ln = mean_log2 * std::numbers::ln2;
    const double entropy_2d = std::log(2.0 * std::numbers::pi * std::numbers::e);  // H of N(0, I2)
    CHECK(std::abs(mean_ln + entropy_2d) < 0.3);
}

TEST_CASE("two-kernel closed form at a symmetric support") {
    DensityModel model;
    model.support = one_row({-1.0, 1.0});
    model.bandwidths = Eigen::VectorXd::Constant(1, 2.0);  // wide: mode at the center

    auto density_at = [&](double x) {
        Eigen::MatrixXd q(1, 1);
        q << x;
        return std::exp2(log2_density(model, q)(0));
    };
    auto expected = [&](double x) {
        const double h = 2.0;
        const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
        return 0.5 * norm * (std::exp(-0.5 * std::pow((x + 1.0) / h, 2)) +
                             std::exp(-0.5 * std::pow((x - 1.0) / h, 2)));
    };
    CHECK(density_at(0.0) == doctest::Approx(expected(0.0)).epsilon(1e-12));
    CHECK(density_at(1.0) == doctest::Approx(density_at(-1.0)).epsilon(1e-12));
    CHECK(density_at(0.0) > density_at(1.0));  // wide bandwidth: maximum in the middle

    model.bandwidths = Eigen::VectorXd::Constant(1, 0.5);  // narrow: modes at the kernels
    CHECK(density_at(0.0) < density_at(1.0));
}

TEST_CASE("leave-one-out matches the brute-force sum on three points") {
    Eigen::MatrixXd S = one_row({0.0, 0.7, 1.1});
    DensityModel model = fit_kde(S);
    Eigen::VectorXd loo = log2_density_loo(model);
    std::vector<double> bw{model.bandwidths(0)};
    for (Eigen::Index q = 0; q < 3; ++q) {
        CHECK(loo(q) == doctest::Approx(std::log2(oracle::kde_loo_density(S, q, bw))).epsilon(1e-12));
    }
}

TEST_CASE("entropy cost: two-point brute force") {
    Eigen::MatrixXd S = one_row({0.0, 1.0});
    const double h = 0.4613918035869458;
    // single leave-one-out kernel per point, distance 1
    const double f = std::exp(-0.5 / (h * h)) / (h * std::sqrt(2.0 * std::numbers::pi));
    const double expected = 0.5 * std::log2(2.0) + 2.0 * (-std::log2(f));
    CHECK(entropy_cost(S) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(entropy_cost(S) == doctest::Approx(oracle::entropy_cost(S)).epsilon(1e-12));
}

TEST_CASE("parameter term doubles with the subspace dimension") {
    Rng rng(7);
    Eigen::MatrixXd S(2, 60);
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 60; ++j) S(i, j) = rng.normal();
    }
    // entropy_cost = m/2*log2(n) + neg-density sum; isolate the parameter term
    const DensityModel model = fit_kde(S);
    const double density_part = -log2_density_loo(model).sum();
    CHECK(entropy_cost(S) - density_part == doctest::Approx(std::log2(60.0)).epsilon(1e-12));
    const Eigen::MatrixXd S1 = S.topRows(1);
    const double density_part_1 = -log2_density_loo(fit_kde(S1)).sum();
    CHECK(entropy_cost(S1) - density_part_1 == doctest::Approx(0.5 * std::log2(60.0)).epsilon(1e-12));
}

TEST_CASE("spread samples cost more bits than tight ones") {
    Rng rng(5);
    Eigen::MatrixXd tight(1, 80), spread(1, 80);
    for (Eigen::Index j = 0; j < 80; ++j) {
        const double z = rng.normal();
        tight(0, j) = 0.1 * z;
        spread(0, j) = 10.0 * z;
    }
    CHECK(entropy_cost(spread) > entropy_cost(tight));
}

TEST_CASE("entropy cost is invariant to sample and row permutations") {
    Rng rng(11);
    Eigen::MatrixXd S(2, 50);
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 50; ++j) S(i, j) = rng.normal();
    }
    const double base = entropy_cost(S);

    auto perm = rng.permutation(50);
    Eigen::MatrixXd cols(2, 50);
    for (Eigen::Index j = 0; j < 50; ++j) cols.col(j) = S.col(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]));
    CHECK(entropy_cost(cols) == doctest::Approx(base).epsilon(1e-9));

    Eigen::MatrixXd rows(2, 50);
    rows.row(0) = S.row(1);
    rows.row(1) = S.row(0);
    CHECK(entropy_cost(rows) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("1D KDE integrates to one") {
    Rng rng(3);
    Eigen::MatrixXd S(1, 40);
    for (Eigen::Index j = 0; j < 40; ++j) S(0, j) = rng.normal();
    DensityModel model = fit_kde(S);

    const double lo = S.minCoeff() - 8.0 * model.bandwidths(0);
    const double hi = S.maxCoeff() + 8.0 * model.bandwidths(0);
    const int steps = 4000;
    const double dx = (hi - lo) / steps;
    Eigen::MatrixXd grid(1, steps + 1);
    for (int t = 0; t <= steps; ++t) grid(0, t) = lo + t * dx;
    const Eigen::VectorXd logd = log2_density(model, grid);
    double integral = 0.0;
    for (int t = 0; t < steps; ++t) {
        integral += 0.5 * (std::exp2(logd(t)) + std::exp2(logd(t + 1))) * dx;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("dimension mismatch is rejected") {
    DensityModel model = fit_kde(one_row({0.0, 1.0}));
    Eigen::MatrixXd wrong(2, 1);
    wrong << 0.0, 0.0;
    CHECK_THROWS_AS(log2_density(model, wrong), std::invalid_argument);
}

}  // TEST_SUITE
