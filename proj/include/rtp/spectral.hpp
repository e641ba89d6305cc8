#pragma once
// Covariance sequences and spectral densities on the circle.
//
// Single normalization used everywhere in this project:
//     rho(k) = (1/2pi) * integral_{-pi}^{pi} exp(i k x) psi(x) dx
// so rho(0) = 1 forces (1/2pi) * integral psi = 1, i.e. integral psi = 2pi.
// White noise has psi == 1.  A finitely supported covariance synthesizes as
//     psi(x) = 1 + 2 * sum_{h=1..K} rho(h) cos(h x).
// Any factor-of-2pi question in this codebase resolves against this header.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtp {

// rho[h] for h = 0..K with rho[0] == 1.  Zero beyond K.
struct CovarianceSequence {
    std::vector<double> rho;

    int support() const { return static_cast<int>(rho.size()) - 1; }
    double at(int h) const {
        int a = h < 0 ? -h : h;
        return a < static_cast<int>(rho.size()) ? rho[a] : 0.0;
    }
    void validate() const;
};

enum class ClosedFormKind { BargmannFock, Exponential };

inline constexpr int kDefaultDensityGrid = 4096;

// Sampled values on the symmetric grid x_j = -pi + 2pi*j/G, j = 0..G-1.
// When the generating covariance (or closed form) is known it is kept so the
// density can also be evaluated off-grid analytically.
struct SpectralDensity {
    std::vector<double> value;
    std::optional<CovarianceSequence> coeffs;
    std::optional<ClosedFormKind> closed_form;

    int grid_size() const { return static_cast<int>(value.size()); }
    double x(int j) const;
    double min_on_grid() const;
    // Analytic when possible, periodic linear interpolation otherwise.
    double evaluate(double x) const;
    // (1/2pi) * integral psi  via the periodic rectangle rule (spectrally
    // accurate); equals rho(0) = 1 for every valid density.
    double mass() const;
};

// Hermite expansion of a standardized nonlinearity: coefficients c[q] of
// H = sum_q c_q He_q against probabilists' Hermite polynomials, c[0] = 0,
// sum_q c_q^2 q! <= 1 with equality iff the expansion is complete.
struct HermiteExpansion {
    std::vector<double> c;

    int order() const { return static_cast<int>(c.size()) - 1; }
    double mass() const;
    double residual() const { return 1.0 - mass(); }
    // True when more than 5% of the variance lives beyond the kept order.
    bool truncation_coarse() const { return residual() > 0.05; }
};

enum class FunctionalKind { Sign, PointwiseMap, HermiteTruncation };

// A scalar transformation applied to a unit-variance Gaussian sequence.
// moment_bound_eta is declared metadata: the transformed variable is asserted
// to possess a finite (2 + eta)-th absolute moment.
struct FunctionalSpec {
    FunctionalKind kind = FunctionalKind::Sign;
    std::function<double(double)> map;   // PointwiseMap only
    std::vector<double> hermite_coeffs;  // HermiteTruncation only, index = q
    double moment_bound_eta = 1.0;

    static FunctionalSpec sign_functional(double eta = 1e6);
    static FunctionalSpec pointwise(std::function<double(double)> f, double eta);
    static FunctionalSpec hermite(std::vector<double> coeffs, double eta);
};

// --- operations -----------------------------------------------------------

SpectralDensity density_from_finite_covariance(const CovarianceSequence& rho,
                                               int grid = kDefaultDensityGrid);

// Autocovariance of a moving average with the given (already normalized)
// kernel: rho(h) = sum_j c_j c_{j+h}.
CovarianceSequence ma_autocovariance(const std::vector<double>& kernel);
SpectralDensity ma_density(const std::vector<double>& kernel,
                           int grid = kDefaultDensityGrid);

// Hermite coefficients c_q = E[H(N) He_q(N)] / q! for q = 0..Q of the
// standardized functional.  Smooth pointwise maps integrate by Gauss-Hermite
// quadrature of order max(64, 2Q) (or quad_order if larger); the sign
// nonlinearity uses its exact half-Gaussian moments because quadrature of a
// jump converges too slowly to be usable.
HermiteExpansion hermite_coefficients(const FunctionalSpec& spec, int Q = 41,
                                      int quad_order = 0);

// Covariance of the transformed sequence: rho(h) = sum_q c_q^2 q! rho_g(h)^q.
// Lag zero is pinned to 1 (the standardized functional has unit variance);
// lags h >= 1 carry the truncation error of the kept expansion order.
CovarianceSequence functional_covariance(const HermiteExpansion& exp,
                                         const CovarianceSequence& rho_g);

// Same object through the dual route: push the Fourier coefficients of psi_g
// through q-fold convolution powers (coefficientwise rho_g(k)^q) and resum.
SpectralDensity functional_density(const HermiteExpansion& exp,
                                   const SpectralDensity& psi_g,
                                   int grid = kDefaultDensityGrid);

// Closed forms with exactly known Fourier coefficients:
//   BargmannFock: psi(x) = sqrt(2pi) * sum_k exp(-(x+2pi k)^2/2),  rho(k) = exp(-k^2/2)
//   Exponential:  psi(x) = sum_k 2/(1+(x+2pi k)^2),                rho(k) = exp(-|k|)
SpectralDensity closed_form_density(ClosedFormKind kind,
                                    int grid = kDefaultDensityGrid);
// Matching covariance sequences at the project-wide support cutoffs
// (K = 12 for exp(-k^2/2), K = 40 for exp(-|k|); tails < 1e-17).
CovarianceSequence closed_form_covariance(ClosedFormKind kind);

// Essential infimum: grid minimum plus one Newton polish per interior local
// minimizer (analytic derivatives when the covariance is known).
double kappa(const SpectralDensity& psi);

CovarianceSequence truncate_covariance(const CovarianceSequence& rho, int m);

// Fourier coefficients rho(k), k = 0..max_k, of a sampled density via the
// periodic rectangle rule; exact for band-limited psi with K < G/2.
std::vector<double> fourier_coefficients(const SpectralDensity& psi, int max_k);

} // namespace rtp
