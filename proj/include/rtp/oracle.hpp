#pragma once
// Reference values independent of the Monte Carlo pipeline: the expected
// zero count of Gaussian-coefficient polynomials (Rice integral), draws of
// the limiting stationary process with sinc covariance, and the exact
// window variance functional.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rtp/rng.hpp"
#include "rtp/spectral.hpp"

namespace rtp {

// E[N(f, [0, 2pi])] for f with centered Gaussian coefficient arrays of
// autocovariance rho (a and b independent).  With
//   v0(t) = Var f(t)      = n + 2 sum_h (n-h) rho(h) cos(ht)
//   v1(t) = Cov(f, f')(t) = - sum_h h (n-h) rho(h) sin(ht)   ( = v0'/2 )
//   v2(t) = Var f'(t)     = sum_k k^2 + 2 sum_h rho(h) cos(ht) sum_{k>h} k(k-h)
// the zero intensity is (1/pi) sqrt(v0 v2 - v1^2) / v0, integrated over the
// period by trapezoid doubling to relative tolerance rel_tol.
// The three loadings are cross-checked against Monte Carlo covariance
// estimates in the test suite before anything downstream trusts them.
double kac_rice_expected_zeros(const CovarianceSequence& rho, int n,
                               double rel_tol = 1e-8);

// Exact closed form for independent coefficients: 2 sqrt(sum k^2 / n).
double kac_rice_iid_exact(int n);

// Stationary centered Gaussian process on [0, 2pi] with covariance
// sinc(t - s) = sin(t-s)/(t-s), sampled on an equispaced grid through a
// symmetric eigendecomposition of the kernel matrix.  The kernel is analytic
// so the spectrum collapses quickly; eigenvalues in [-1e-10, 0) clamp to
// zero, anything lower is a degenerate-grid error.
class SincProcessSampler {
public:
    explicit SincProcessSampler(int grid_points = 512);

    int grid_points() const { return grid_; }
    double grid_step() const; // 2pi / (grid_points - 1)

    // One path (values at the grid points), consuming grid_points normals.
    std::vector<double> sample(Philox& gen) const;
    // Batch of paths as columns; draw order is column-major and matches
    // repeated sample() calls on the same generator.
    Eigen::MatrixXd sample_batch(Philox& gen, int ndraws) const;
    // Batch where column j replays stream first_stream + j of seed exactly,
    // so batched and one-at-a-time runs of a replicate loop agree bitwise.
    Eigen::MatrixXd sample_batch_streams(std::uint64_t seed, std::uint64_t first_stream,
                                         int ndraws) const;

    // Strict sign changes along a sampled path.
    static int sign_changes(const std::vector<double>& path);

private:
    int grid_;
    Eigen::MatrixXd factor_; // V * diag(sqrt(max(lambda, 0)))
};

// Exact variance of the normalized linear statistic
//     sum_l xi_l S(t_l),   S(t) = f(X + t/n)/sqrt(n),
// for coefficient autocovariance rho, divided by the spectral density at X:
//     sigma_n^2 = (1/(n psi_rho(X))) sum_{k,k'} rho(|k-k'|) (C_k C_k' + D_k D_k')
// with C_k = sum_l xi_l cos(k X + k t_l / n), D_k the sine analogue.
// Converges to sum_{l,m} xi_l xi_m sinc(t_l - t_m) as n grows.
double sigma_n_sq(double X, const std::vector<double>& t, const std::vector<double>& xi,
                  const CovarianceSequence& rho, int n);

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// sum_{l,m} xi_l xi_m sinc(t_l - t_m), the limit of sigma_n_sq.
double sinc_quadratic_form(const std::vector<double>& t, const std::vector<double>& xi);

} // namespace rtp
