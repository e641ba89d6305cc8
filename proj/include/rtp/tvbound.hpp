#pragma once
// Total variation upper bound between a stationary Gaussian coefficient
// vector and the vector with truncated covariance, via Toeplitz eigenanalysis.

#include <vector>

#include <Eigen/Dense>

#include "rtp/spectral.hpp"

namespace rtp {

// Sigma(i,j) = rho(|i-j|) alongside its truncated analogue.  kappa_floor
// carries the generating density's spectral floor purely for diagnostics in
// conditioning errors; negative means unknown.
struct ToeplitzPair {
    Eigen::MatrixXd full;
    Eigen::MatrixXd truncated;
    double kappa_floor = -1.0;

    void validate() const; // equal square sizes, symmetric, n <= 4096
};

Eigen::MatrixXd toeplitz_from_covariance(const CovarianceSequence& rho, int n);

// Pair (Sigma, Sigma_m) for truncation point m >= 0.
ToeplitzPair toeplitz_pair(const CovarianceSequence& rho_g, int n, int m);

// (3/2) min(1, l2 norm of the eigenvalues of Sigma^{-1} Sigma~ - Id).  The
// eigenvalues come from the Cholesky-whitened pencil L^{-1} Sigma~ L^{-T},
// which is symmetric, so the spectrum is real by construction.  Identical
// inputs short-circuit to exactly 0.  Requires cond(Sigma) < 1e12.
double tv_upper_bound(const ToeplitzPair& pair);

struct TruncationRow {
    int m = 0;
    double tv_bound = 0.0;
    double trace_bound = 0.0;  // (3/2) min(1, sqrt(n^2 sum_{k>m} rho(k)^2 / kappa^2))
    double kappa_trunc = 0.0;  // spectral floor of the truncated density
    bool valid = false;        // truncated density still positive on the grid
};

// Sweep over ascending truncation points.  The trace bound relaxes the
// eigenvalue bound (Trace((Sigma^{-1} Sigma~ - Id)^2) <= n sp^2(Sigma^{-1})
// max row mass), so tv_bound <= trace_bound row by row; the Toeplitz floor
// enters as sp(Sigma^{-1}) <= 1/kappa, the Szegoe eigenvalue bound
// lambda_min(Sigma) >= kappa.
std::vector<TruncationRow> truncation_sweep(const CovarianceSequence& rho_g, int n,
                                            const std::vector<int>& m_list);

} // namespace rtp
