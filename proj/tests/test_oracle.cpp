#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rtp/coeffgen.hpp"
#include "rtp/oracle.hpp"
#include "rtp/trigpoly.hpp"
#include "rtp/zeros.hpp"

using namespace rtp;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLimit = 1.1547005383792515; // 2/sqrt(3)

double iid_closed_form(int n) {
    return 2.0 * std::sqrt((n + 1.0) * (2.0 * n + 1.0) / 6.0);
}

TrigPolynomial to_poly(CoefficientSample&& s) {
    TrigPolynomial p;
    p.a = std::move(s.a);
    p.b = std::move(s.b);
    return p;
}
} // namespace

TEST_CASE("independent coefficients: closed form and quadrature agree") {
    CHECK(kac_rice_iid_exact(1) == doctest::Approx(2.0).epsilon(1e-14));
    for (int n : {1, 2, 7, 64, 256, 1024})
        CHECK(kac_rice_iid_exact(n) == doctest::Approx(iid_closed_form(n)).epsilon(1e-13));

    CovarianceSequence white{{1.0}};
    for (int n : {1, 4, 64, 256}) {
        double quad = kac_rice_expected_zeros(white, n);
        CHECK(quad == doctest::Approx(iid_closed_form(n)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(kac_rice_iid_exact(0), std::invalid_argument);
    CHECK_THROWS_AS(kac_rice_expected_zeros(white, 0), std::invalid_argument);
    CHECK_THROWS_AS(kac_rice_expected_zeros(white, 4, -1.0), std::invalid_argument);
}

TEST_CASE("integrand loadings validated by monte carlo covariances") {
    // For stationary coefficients with autocovariance rho the value/derivative
    // pair at a point t has
    //   Var f(t)       = n + 2 sum_h (n-h) rho(h) cos(ht)
    //   Cov(f, f')(t)  = - sum_h h (n-h) rho(h) sin(ht)
    //   Var f'(t)      = sum_k k^2 + 2 sum_h rho(h) cos(ht) sum_{k>h} k(k-h)
    // Dependence enters only through these three numbers, so matching them
    // certifies the integral for dependent rho.
    const int n = 32;
    const double t = 0.7, rho1 = 0.4;
    std::vector<double> kernel{std::sqrt(0.8), std::sqrt(0.2)};
    CoefficientModel model = CoefficientModel::moving_average(kernel, Family::Gaussian);

    double v0 = n + 2.0 * (n - 1) * rho1 * std::cos(t);
    double v1 = -(n - 1.0) * rho1 * std::sin(t);
    double sum_kk = 0.0, sum_k2 = 0.0;
    for (int k = 1; k <= n; ++k) sum_k2 += double(k) * k;
    for (int k = 2; k <= n; ++k) sum_kk += double(k) * (k - 1);
    double v2 = sum_k2 + 2.0 * rho1 * std::cos(t) * sum_kk;

    const int reps = 4000;
    double sf = 0.0, sd = 0.0, sff = 0.0, sdd = 0.0, sfd = 0.0;
    for (int r = 0; r < reps; ++r) {
        TrigPolynomial p = to_poly(sample_coefficients(model, n, 99, r));
        double f = evaluate_at(p, t);
        double fp = evaluate_at(derivative(p), t);
        sf += f; sd += fp; sff += f * f; sdd += fp * fp; sfd += f * fp;
    }
    double mf = sf / reps, md = sd / reps;
    double var_f = sff / reps - mf * mf;
    double var_d = sdd / reps - md * md;
    double cov_fd = sfd / reps - mf * md;

    // Gaussian fourth-moment standard errors.
    double se_v0 = v0 * std::sqrt(2.0 / reps);
    double se_v2 = v2 * std::sqrt(2.0 / reps);
    double se_v1 = std::sqrt((v0 * v2 + v1 * v1) / reps);
    CHECK(std::abs(var_f - v0) < 5.0 * se_v0);
    CHECK(std::abs(var_d - v2) < 5.0 * se_v2);
    CHECK(std::abs(cov_fd - v1) < 5.0 * se_v1);
}

TEST_CASE("dependent coefficients: rice integral matches zero counts") {
    std::vector<double> kernel{std::sqrt(0.8), std::sqrt(0.2)};
    CoefficientModel model = CoefficientModel::moving_average(kernel, Family::Gaussian);
    const int n = 64, reps = 300;
    double expect = kac_rice_expected_zeros(model.covariance(), n);

    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < reps; ++r) {
        TrigPolynomial p = to_poly(sample_coefficients(model, n, 12345, r));
        ZeroCountOptions opt;
        opt.refine = false;
        double c = count_zeros(p, opt).count;
        sum += c;
        sumsq += c * c;
    }
    double mean = sum / reps;
    double sd = std::sqrt((sumsq / reps - mean * mean) * reps / (reps - 1.0));
    double se = sd / std::sqrt(double(reps));
    CHECK(std::abs(mean - expect) < 5.0 * se);
}

TEST_CASE("zero density approaches 2/sqrt(3) for dependent covariances") {
    std::vector<double> kernel{std::sqrt(0.8), std::sqrt(0.2)};
    CovarianceSequence ma = ma_autocovariance(kernel);
    for (int n : {256, 1024})
        CHECK(kac_rice_expected_zeros(ma, n) / n == doctest::Approx(kLimit).epsilon(0.02));

    // Long-range smooth covariance through the sign transfer.
    HermiteExpansion h = hermite_coefficients(FunctionalSpec::sign_functional());
    CovarianceSequence rho_h =
        functional_covariance(h, closed_form_covariance(ClosedFormKind::BargmannFock));
    CHECK(kac_rice_expected_zeros(rho_h, 256) / 256.0 == doctest::Approx(kLimit).epsilon(0.02));
}

TEST_CASE("sinc sampler: determinism and batch layout") {
    SincProcessSampler sampler(64);
    CHECK(sampler.grid_points() == 64);
    CHECK(sampler.grid_step() == doctest::Approx(2.0 * kPi / 63).epsilon(1e-15));

    Philox g1(7, 0), g2(7, 0);
    std::vector<double> p1 = sampler.sample(g1);
    std::vector<double> p2 = sampler.sample(g2);
    REQUIRE(p1.size() == 64);
    CHECK(p1 == p2);

    // Batch columns replay the same draw order as repeated sample() calls.
    Philox g3(7, 0);
    Eigen::MatrixXd batch = sampler.sample_batch(g3, 2);
    REQUIRE(batch.rows() == 64);
    REQUIRE(batch.cols() == 2);
    Philox g4(7, 0);
    std::vector<double> q1 = sampler.sample(g4);
    std::vector<double> q2 = sampler.sample(g4);
    for (int i = 0; i < 64; ++i) {
        CHECK(batch(i, 0) == q1[i]);
        CHECK(batch(i, 1) == q2[i]);
    }

    // Stream-addressed batch: column j is stream first+j, bit for bit.
    Eigen::MatrixXd sb = sampler.sample_batch_streams(11, 5, 3);
    for (int j = 0; j < 3; ++j) {
        Philox g(11, 5 + j);
        std::vector<double> col = sampler.sample(g);
        for (int i = 0; i < 64; ++i) CHECK(sb(i, j) == col[i]);
    }

    CHECK_THROWS_AS(SincProcessSampler(7), std::invalid_argument);
    CHECK_THROWS_AS(SincProcessSampler(2049), std::invalid_argument);
    Philox g5(1, 0);
    CHECK_THROWS_AS(sampler.sample_batch(g5, 0), std::invalid_argument);
}

TEST_CASE("sinc sampler reproduces the sinc covariance") {
    SincProcessSampler sampler(96);
    const int reps = 3000;
    Eigen::MatrixXd batch = sampler.sample_batch_streams(2718, 0, reps);
    double h = sampler.grid_step();
    for (int j : {0, 7, 31}) {
        double target = sinc(j * h);
        double acc = 0.0;
        for (int r = 0; r < reps; ++r) acc += batch(0, r) * batch(j, r);
        acc /= reps;
        double se = std::sqrt((1.0 + target * target) / reps);
        CHECK(std::abs(acc - target) < 5.0 * se);
    }
}

TEST_CASE("sign change counting and the pair-flip expectation") {
    CHECK(SincProcessSampler::sign_changes({1.0, -1.0, -1.0, 2.0}) == 2);
    CHECK(SincProcessSampler::sign_changes({-1.0, 1.0, -1.0}) == 2);
    CHECK(SincProcessSampler::sign_changes({1.0, 0.0, -1.0}) == 0); // strict products only
    CHECK(SincProcessSampler::sign_changes({3.0}) == 0);
    CHECK(SincProcessSampler::sign_changes({}) == 0);

    // Stationary Gaussian pairs flip sign with probability acos(corr)/pi, so
    // the expected number of strict changes along the grid path is exactly
    // (M-1) acos(sinc(h))/pi: an independent check on the whole sampler.
    const int M = 128, reps = 2500;
    SincProcessSampler sampler(M);
    double corr = sinc(sampler.grid_step());
    double expect = (M - 1) * std::acos(corr) / kPi;
    Eigen::MatrixXd batch = sampler.sample_batch_streams(31337, 0, reps);
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> path(M);
    for (int r = 0; r < reps; ++r) {
        for (int i = 0; i < M; ++i) path[i] = batch(i, r);
        double c = SincProcessSampler::sign_changes(path);
        sum += c;
        sumsq += c * c;
    }
    double mean = sum / reps;
    double se = std::sqrt((sumsq / reps - mean * mean) / reps);
    CHECK(std::abs(mean - expect) < 5.0 * se);
}

TEST_CASE("window variance: independent coefficients give exact values") {
    CovarianceSequence white{{1.0}};
    // One point, unit weight: the normalized variance is 1 for every n.
    for (int n : {1, 7, 64, 333})
        CHECK(sigma_n_sq(0.9, {0.0}, {1.0}, white, n) == doctest::Approx(1.0).epsilon(1e-12));

    // Two points spaced pi with unit weights: C_k^2 + D_k^2 collapses to
    // 2 + 2 cos(k pi / n), whose average is exactly 2 - 2/n.
    for (int n : {2, 8, 100, 1001}) {
        double expect = 2.0 - 2.0 / n;
        CHECK(sigma_n_sq(0.3, {0.0, kPi}, {1.0, 1.0}, white, n) ==
              doctest::Approx(expect).epsilon(1e-12));
        // The offset X drops out entirely in the independent case.
        CHECK(sigma_n_sq(5.1, {0.0, kPi}, {1.0, 1.0}, white, n) ==
              doctest::Approx(expect).epsilon(1e-12));
    }

    CHECK_THROWS_AS(sigma_n_sq(0.0, {}, {}, white, 4), std::invalid_argument);
    CHECK_THROWS_AS(sigma_n_sq(0.0, {0.0, 1.0}, {1.0}, white, 4), std::invalid_argument);
    CHECK_THROWS_AS(sigma_n_sq(0.0, {0.0}, {1.0}, white, 0), std::invalid_argument);
}

TEST_CASE("window variance vanishes with the spectral density") {
    // Kernel (1,1)/sqrt(2) has psi(x) = 1 + cos x, zero at x = pi.
    CovarianceSequence rho = ma_autocovariance({std::sqrt(0.5), std::sqrt(0.5)});
    CHECK_THROWS_AS(sigma_n_sq(kPi, {0.0}, {1.0}, rho, 16), std::runtime_error);
    CHECK_NOTHROW(sigma_n_sq(1.0, {0.0}, {1.0}, rho, 16));
}

TEST_CASE("window variance: dependent case validated by monte carlo") {
    std::vector<double> kernel{std::sqrt(0.8), std::sqrt(0.2)};
    CoefficientModel model = CoefficientModel::moving_average(kernel, Family::Gaussian);
    CovarianceSequence rho = model.covariance();

    const int n = 24, reps = 6000;
    const double X = 0.9;
    const std::vector<double> ts{0.0, 1.5, kPi};
    const std::vector<double> xi{1.0, -2.0, 0.5};
    double psi_at_x = 1.0 + 2.0 * rho.rho[1] * std::cos(X);

    double expect = sigma_n_sq(X, ts, xi, rho, n);

    double s1 = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        TrigPolynomial p = to_poly(sample_coefficients(model, n, 555, r));
        LocalField S = local_field(p, X);
        double v = 0.0;
        for (std::size_t l = 0; l < ts.size(); ++l) v += xi[l] * S(ts[l]);
        s1 += v;
        s2 += v * v;
    }
    double mean = s1 / reps;
    double var = (s2 / reps - mean * mean) / psi_at_x;
    double se = expect * std::sqrt(2.0 / reps); // gaussian variance estimator
    CHECK(std::abs(var - expect) < 5.0 * se);
}

TEST_CASE("sinc quadratic form and the large-n limit") {
    std::vector<double> t2{0.0, kPi}, ones{1.0, 1.0};
    CHECK(sinc_quadratic_form(t2, ones) == doctest::Approx(2.0).epsilon(1e-12));
    std::vector<double> t0{0.0, 0.0};
    CHECK(sinc_quadratic_form(t0, ones) == doctest::Approx(4.0).epsilon(1e-14));
    std::vector<double> odd{0.0};
    CHECK_THROWS_AS(sinc_quadratic_form(odd, ones), std::invalid_argument);

    CovarianceSequence white{{1.0}};
    const std::vector<double> ts{0.0, 1.0, 2.5};
    const std::vector<double> xi{0.3, -1.0, 0.7};
    double limit = sinc_quadratic_form(ts, xi);
    double gap512 = std::abs(sigma_n_sq(1.234, ts, xi, white, 512) - limit);
    double gap4096 = std::abs(sigma_n_sq(1.234, ts, xi, white, 4096) - limit);
    CHECK(gap4096 < 0.01);
    CHECK(gap4096 < gap512);
}
