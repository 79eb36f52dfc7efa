#include <doctest.h>

#include <cmath>

#include "misc/data_model.hpp"
#include "misc/ica.hpp"
#include "misc/rng.hpp"

#include "../support/oracles.hpp"
#include "../support/helpers.hpp"

using namespace misc;

namespace {

DataMatrix laplace_mixture(Eigen::MatrixXd& A_out, std::uint64_t seed, int n = 2000) {
    Rng rng(seed);
    Eigen::MatrixXd S(2, n);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < n; ++j) S(i, j) = rng.laplace();
    }
    do {
        for (int i = 0; i < 4; ++i) A_out(i / 2, i % 2) = rng.normal();
    } while (std::abs(A_out.determinant()) < 0.3);
    return DataMatrix{A_out * S, std::nullopt};
}

}  // namespace

TEST_SUITE("ica") {

TEST_CASE("whiten is the identity on already-white data") {
    DataMatrix X;
    X.values.resize(2, 4);
    X.values << 1, -1, 1, -1,
                1, 1, -1, -1;  // population covariance exactly I
    WhitenResult w = whiten(X);
    CHECK((w.transform - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((w.whitened.values - X.values).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("whiten decorrelates a correlated Gaussian") {
    Rng rng(17);
    Eigen::MatrixXd X(2, 1000);
    for (int j = 0; j < 1000; ++j) {
        const double a = rng.normal(), b = rng.normal();
        X(0, j) = a;
        X(1, j) = 0.9 * a + 0.4 * b;
    }
    WhitenResult w = whiten(DataMatrix{X, std::nullopt});
    const Eigen::MatrixXd& Z = w.whitened.values;
    const Eigen::MatrixXd cov = (Z.colwise() - Z.rowwise().mean().eval()) *
                                (Z.colwise() - Z.rowwise().mean().eval()).transpose() / 1000.0;
    CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
    // the transform is invertible
    CHECK(std::abs(w.transform.determinant()) > 1e-8);
}

TEST_CASE("whiten rejects duplicated features") {
    Eigen::MatrixXd X = testutil::random_matrix(1, 50, 5);
    Eigen::MatrixXd dup(2, 50);
    dup.row(0) = X.row(0);
    dup.row(1) = X.row(0);
    CHECK_THROWS_WITH_AS(whiten(DataMatrix{dup, std::nullopt}),
                         doctest::Contains("rank deficient"), std::runtime_error);
}

TEST_CASE("fast_ica separates a Laplace mixture") {
    Eigen::MatrixXd A(2, 2);
    DataMatrix X = laplace_mixture(A, 101);
    WhitenResult w = whiten(X);
    SourceDecomposition dec = fast_ica(w, 500, 1e-6, 7);
    CHECK(amari_error(dec.unmixing * w.transform * A) <= 0.1);
    CHECK(dec.converged);
}

TEST_CASE("fast_ica invariants: reconstruction, orthonormality, unit variance") {
    Eigen::MatrixXd A(2, 2);
    DataMatrix X = laplace_mixture(A, 55, 800);
    WhitenResult w = whiten(X);
    SourceDecomposition dec = fast_ica(w, 500, 1e-6, 3);

    const double rel = (dec.mixing * dec.sources - w.whitened.values).norm() / w.whitened.values.norm();
    CHECK(rel <= 1e-6);

    const Eigen::MatrixXd gram = dec.unmixing * dec.unmixing.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-6);

    for (int i = 0; i < 2; ++i) {
        const auto row = dec.sources.row(i);
        const double var = (row.array() - row.mean()).square().mean();
        CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("fast_ica recovers independent uniform rows") {
    Rng rng(13);
    Eigen::MatrixXd U(2, 2000);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2000; ++j) U(i, j) = rng.uniform(-1.0, 1.0);
    }
    WhitenResult w = whiten(standardize(DataMatrix{U, std::nullopt}));
    SourceDecomposition dec = fast_ica(w, 500, 1e-6, 21);
    for (int i = 0; i < 2; ++i) {
        double best = 0.0;
        for (int t = 0; t < 2; ++t) {
            best = std::max(best, std::abs(oracle::pearson(dec.sources.row(i).transpose(),
                                                           U.row(t).transpose())));
        }
        CHECK(best >= 0.95);
    }
}

TEST_CASE("fast_ica is deterministic given a seed") {
    Eigen::MatrixXd A(2, 2);
    DataMatrix X = laplace_mixture(A, 77, 600);
    WhitenResult w = whiten(X);
    SourceDecomposition d1 = fast_ica(w, 500, 1e-6, 11);
    SourceDecomposition d2 = fast_ica(w, 500, 1e-6, 11);
    CHECK(d1.sources == d2.sources);
    CHECK(d1.unmixing == d2.unmixing);
    CHECK(d1.iterations == d2.iterations);
}

TEST_CASE("fast_ica validates its arguments") {
    Eigen::MatrixXd A(2, 2);
    DataMatrix X = laplace_mixture(A, 5, 100);
    WhitenResult w = whiten(X);
    CHECK_THROWS_AS(fast_ica(w, 0, 1e-6, 1), std::invalid_argument);
    CHECK_THROWS_AS(fast_ica(w, 10, 2.0, 1), std::invalid_argument);
}

TEST_CASE("amari error: permutations score zero, all-ones scores one") {
    CHECK(amari_error(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(0.0));
    Eigen::MatrixXd anti(2, 2);
    anti << 0.0, 3.0, 2.0, 0.0;
    CHECK(amari_error(anti) == doctest::Approx(0.0));
    CHECK(amari_error(Eigen::MatrixXd::Ones(2, 2)) == doctest::Approx(1.0));

    Eigen::MatrixXd zero_row(2, 2);
    zero_row << 0.0, 0.0, 1.0, 2.0;
    CHECK_THROWS_AS(amari_error(zero_row), std::invalid_argument);
    CHECK_THROWS_AS(amari_error(Eigen::MatrixXd::Ones(2, 3)), std::invalid_argument);
}

}  // TEST_SUITE
