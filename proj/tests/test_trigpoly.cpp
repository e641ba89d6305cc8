#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rtp/rng.hpp"
#include "rtp/trigpoly.hpp"

using namespace rtp;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Term-by-term reference evaluator, independent of the Clenshaw recurrence.
double naive_eval(const TrigPolynomial& p, double t) {
    double s = 0.0;
    for (int k = 1; k <= p.degree(); ++k)
        s += p.a[k - 1] * std::cos(k * t) + p.b[k - 1] * std::sin(k * t);
    return s;
}

TrigPolynomial random_poly(int n, std::uint64_t seed) {
    Philox gen(seed, 0);
    TrigPolynomial p;
    p.a.resize(n);
    p.b.resize(n);
    gen.fill_gaussian(p.a.data(), n);
    gen.fill_gaussian(p.b.data(), n);
    return p;
}
} // namespace

TEST_CASE("validation") {
    TrigPolynomial p;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument); // degree 0
    p.a = {1.0, 2.0};
    p.b = {0.0};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument); // length mismatch
    p.b = {0.0, std::nan("")};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.b = {0.0, 1.0};
    CHECK_NOTHROW(p.validate());
    CHECK(p.degree() == 2);
    CHECK(p.coeff_norm() == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
}

TEST_CASE("clenshaw evaluation matches the term-by-term sum") {
    TrigPolynomial p = random_poly(37, 101);
    double tol = 1e-11 * (1.0 + p.coeff_norm());
    Philox gen(555, 0);
    for (int i = 0; i < 40; ++i) {
        double t = kTwoPi * gen.next_double();
        CHECK(std::abs(evaluate_at(p, t) - naive_eval(p, t)) < tol);
    }
    // endpoints
    CHECK(std::abs(evaluate_at(p, 0.0) - naive_eval(p, 0.0)) < tol);
    CHECK(std::abs(evaluate_at(p, kTwoPi) - naive_eval(p, kTwoPi)) < tol);
}

TEST_CASE("fft grid synthesis matches pointwise evaluation") {
    TrigPolynomial p = random_poly(30, 7);
    const int N = 128;
    std::vector<double> grid = evaluate_on_grid(p, N);
    REQUIRE(static_cast<int>(grid.size()) == N);
    double tol = 1e-11 * (1.0 + p.coeff_norm());
    for (int j = 0; j < N; ++j) {
        double t = kTwoPi * j / N;
        CHECK(std::abs(grid[j] - naive_eval(p, t)) < tol);
    }

    CHECK_THROWS_AS(evaluate_on_grid(p, 96), std::invalid_argument);  // not a power of two
    CHECK_THROWS_AS(evaluate_on_grid(p, 32), std::invalid_argument);  // aliased: < 2n+2
}

TEST_CASE("parseval: grid mean of f^2 equals half the coefficient energy") {
    // f^2 has degree 2n, so a power-of-two grid with N > 2n integrates it
    // exactly; the identity (1/2pi) int f^2 = sum (a_k^2 + b_k^2)/2 is then
    // a pure floating-point check.
    TrigPolynomial p = random_poly(50, 33);
    const int N = 256;
    std::vector<double> grid = evaluate_on_grid(p, N);
    double mean_sq = 0.0;
    for (double v : grid) mean_sq += v * v;
    mean_sq /= N;
    double energy = 0.0;
    for (int k = 0; k < 50; ++k) energy += p.a[k] * p.a[k] + p.b[k] * p.b[k];
    CHECK(mean_sq == doctest::Approx(energy / 2.0).epsilon(1e-12));
}

TEST_CASE("derivative maps coefficients exactly") {
    // d/dt [a cos kt + b sin kt] = kb cos kt - ka sin kt.
    TrigPolynomial p;
    p.a = {0.0, 0.0, 1.0, 0.0, 0.0};
    p.b = {0.0, 0.0, 0.0, 0.0, 2.0};
    TrigPolynomial d = derivative(p); // -3 sin 3t + 10 cos 5t
    CHECK(d.a[4] == 10.0);
    CHECK(d.b[2] == -3.0);
    for (double x : {0.0, 0.5, 1.7, kPi, 5.0}) {
        double expect = -3.0 * std::sin(3 * x) + 10.0 * std::cos(5 * x);
        CHECK(evaluate_at(d, x) == doctest::Approx(expect).epsilon(1e-13));
    }

    TrigPolynomial q = random_poly(12, 9);
    TrigPolynomial dq = derivative(q);
    for (int k = 1; k <= 12; ++k) {
        CHECK(dq.a[k - 1] == k * q.b[k - 1]);
        CHECK(dq.b[k - 1] == -k * q.a[k - 1]);
    }
}

TEST_CASE("local field is the rescaled shifted polynomial") {
    TrigPolynomial p = random_poly(32, 21);
    const int n = 32;
    const double X = 0.7;
    LocalField S = local_field(p, X);
    CHECK(S.n == n);
    double tol = 1e-11 * (1.0 + p.coeff_norm());

    Philox gen(99, 0);
    for (int i = 0; i < 25; ++i) {
        double t = kTwoPi * gen.next_double();
        double direct = naive_eval(p, X + t / n) / std::sqrt(double(n));
        CHECK(std::abs(S(t) - direct) < tol);

        // S'(t) = f'(X + t/n) / (n sqrt(n))
        double dd = naive_eval(derivative(p), X + t / n) / (n * std::sqrt(double(n)));
        CHECK(std::abs(S.derivative_at(t) - dd) < tol);
    }

    // Rotation preserves the per-mode energy a_k^2 + b_k^2.
    for (int k = 0; k < n; ++k) {
        double orig = p.a[k] * p.a[k] + p.b[k] * p.b[k];
        double rot = S.rotated.a[k] * S.rotated.a[k] + S.rotated.b[k] * S.rotated.b[k];
        CHECK(rot == doctest::Approx(orig).epsilon(1e-12));
    }

    CHECK_THROWS_AS(local_field(p, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(local_field(p, kTwoPi), std::invalid_argument);
}

TEST_CASE("sobolev identity against brute-force quadrature") {
    // E_X ||S^(ell)||^2 = (1/2n) sum_k (k/n)^{2 ell} (a_k^2 + b_k^2).
    // The X-average turns the window into the full-circle average of
    // f^(ell) squared, so a grid quadrature of f^(ell) is an independent
    // route to the same number.
    const int n = 8;
    TrigPolynomial p = random_poly(n, 63);
    TrigPolynomial d = p;
    for (int ell = 0; ell <= 2; ++ell) {
        if (ell > 0) d = derivative(d);
        std::vector<double> grid = evaluate_on_grid(d, 64);
        double mean_sq = 0.0;
        for (double v : grid) mean_sq += v * v;
        mean_sq /= grid.size();
        double denom = std::pow(double(n), 2 * ell + 1);
        CHECK(sobolev_norm_sq(p, ell) == doctest::Approx(mean_sq / denom).epsilon(1e-11));
    }
    CHECK_THROWS_AS(sobolev_norm_sq(p, -1), std::invalid_argument);
}
