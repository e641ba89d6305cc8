#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rtp/spectral.hpp"
#include "rtp/tvbound.hpp"

using namespace rtp;

TEST_CASE("toeplitz layout") {
    CovarianceSequence rho{{1.0, 0.5, 0.25}};
    Eigen::MatrixXd m = toeplitz_from_covariance(rho, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(m(i, j) == rho.at(i - j));
    CHECK_THROWS_AS(toeplitz_from_covariance(rho, 0), std::invalid_argument);
}

TEST_CASE("identical covariances give zero distance exactly") {
    CovarianceSequence rho{{1.0, 0.5, 0.25}};
    ToeplitzPair pair = toeplitz_pair(rho, 8, 2); // m >= support: no truncation
    CHECK(tv_upper_bound(pair) == 0.0);
    ToeplitzPair wider = toeplitz_pair(rho, 8, 6);
    CHECK(tv_upper_bound(wider) == 0.0);
}

TEST_CASE("hand-computable pencils") {
    // Sigma = I, Sigma~ = (1+a) I: every pencil eigenvalue is a, so the
    // bound is 1.5 sqrt(n a^2).
    ToeplitzPair pair;
    pair.full = Eigen::MatrixXd::Identity(4, 4);
    pair.truncated = 1.01 * Eigen::MatrixXd::Identity(4, 4);
    pair.kappa_floor = 1.0;
    CHECK(tv_upper_bound(pair) == doctest::Approx(1.5 * 0.02).epsilon(1e-12));

    // Far apart: the bound saturates at 3/2.
    pair.truncated = 3.0 * Eigen::MatrixXd::Identity(4, 4);
    CHECK(tv_upper_bound(pair) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("whitened pencil agrees with a direct inverse computation") {
    CovarianceSequence rho{{1.0, 0.5, 0.25}};
    const int n = 5, m = 1;
    double mine = tv_upper_bound(toeplitz_pair(rho, n, m));

    Eigen::MatrixXd full = toeplitz_from_covariance(rho, n);
    Eigen::MatrixXd trunc = toeplitz_from_covariance(truncate_covariance(rho, m), n);
    Eigen::MatrixXd pencil =
        full.inverse() * trunc - Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(pencil).eigenvalues();
    double ss = 0.0;
    for (int i = 0; i < n; ++i) ss += std::norm(ev(i));
    double reference = 1.5 * std::min(1.0, std::sqrt(ss));
    CHECK(mine == doctest::Approx(reference).epsilon(1e-10));
}

TEST_CASE("pair validation") {
    ToeplitzPair bad;
    bad.full = Eigen::MatrixXd::Identity(3, 3);
    bad.truncated = Eigen::MatrixXd::Identity(4, 4);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad.truncated = Eigen::MatrixXd::Identity(3, 3);
    bad.full(0, 2) = 0.5; // breaks symmetry
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("singular covariance raises a conditioning error") {
    CovarianceSequence rho{{1.0, 1.0}};
    ToeplitzPair pair = toeplitz_pair(rho, 3, 0);
    CHECK_THROWS_AS(tv_upper_bound(pair), std::runtime_error);
    try {
        tv_upper_bound(pair);
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("singular") != std::string::npos);
    }
}

TEST_CASE("truncation sweep for the exponential covariance") {
    CovarianceSequence rho = closed_form_covariance(ClosedFormKind::Exponential);
    const int n = 96;
    std::vector<int> ms{0, 1, 2, 4, 8, 16, 40};
    std::vector<TruncationRow> rows = truncation_sweep(rho, n, ms);
    REQUIRE(rows.size() == ms.size());

    double kappa_full = kappa(density_from_finite_covariance(rho, 1024));
    CHECK(kappa_full == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const TruncationRow& row = rows[i];
        CHECK(row.m == ms[i]);
        // The dense bound can never beat the scalar trace bound by more than
        // the eigensolver noise floor (~1e-14 on these scales).
        CHECK(row.tv_bound <= row.trace_bound + 1e-12);
        if (i > 0) CHECK(row.tv_bound <= rows[i - 1].tv_bound + 1e-12);

        double tail = 0.0;
        for (int k = row.m + 1; k <= rho.support(); ++k) tail += rho.rho[k] * rho.rho[k];
        double trace = 1.5 * std::min(1.0, std::sqrt(double(n) * n * tail /
                                                      (kappa_full * kappa_full)));
        CHECK(row.trace_bound == doctest::Approx(trace).epsilon(1e-9));
        CHECK(row.valid);
        CHECK(row.kappa_trunc > 0.0);
    }
    CHECK(rows[0].kappa_trunc == doctest::Approx(1.0).epsilon(1e-12)); // m=0: white noise
    CHECK(rows.back().tv_bound == 0.0); // m = support: nothing truncated

    CHECK_THROWS_AS(truncation_sweep(rho, n, {}), std::invalid_argument);
    CHECK_THROWS_AS(truncation_sweep(rho, n, {4, 2}), std::invalid_argument);
    CHECK_THROWS_AS(truncation_sweep(rho, n, {-1, 2}), std::invalid_argument);
}

TEST_CASE("gaussian covariance truncates fast") {
    CovarianceSequence rho = closed_form_covariance(ClosedFormKind::BargmannFock);
    std::vector<TruncationRow> rows = truncation_sweep(rho, 128, {10, 12});
    CHECK(rows[0].tv_bound < 1e-5);
    CHECK(rows[1].tv_bound == 0.0);
}
