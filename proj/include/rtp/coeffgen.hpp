#pragma once
// Coefficient models: i.i.d. families, short moving averages, and stationary
// Gaussian sequences pushed through a standardized nonlinearity.  All models
// produce centered unit-variance weakly stationary coefficient arrays.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rtp/rng.hpp"
#include "rtp/spectral.hpp"

namespace rtp {

enum class Family { Gaussian, Rademacher, Uniform, TwoPoint };

// Two-point law: P(value = hi) = p, P(value = lo) = 1-p; must be centered
// with unit variance, which pins hi = sqrt((1-p)/p), lo = -sqrt(p/(1-p)).
struct TwoPointParams {
    double p = 0.5;
    double hi = 1.0;
    double lo = -1.0;

    static TwoPointParams from_probability(double p);
    void validate() const;
};

struct CoefficientModel {
    enum class Kind { Iid, MovingAverage, GaussianFunctional };

    Kind kind = Kind::Iid;
    Family family = Family::Gaussian;   // Iid / MovingAverage innovations
    std::vector<double> kernel;         // MovingAverage, normalized
    TwoPointParams two_point;           // family == TwoPoint
    CovarianceSequence rho_g;           // GaussianFunctional base covariance
    FunctionalSpec functional;          // GaussianFunctional nonlinearity
    int hermite_order = 41;             // expansion order for implied spectra

    static CoefficientModel iid(Family f);
    static CoefficientModel iid_two_point(TwoPointParams tp);
    static CoefficientModel moving_average(std::vector<double> kernel, Family innovations);
    static CoefficientModel gaussian_functional(CovarianceSequence rho_g, FunctionalSpec spec);

    // Model-implied autocovariance of one coefficient array.
    CovarianceSequence covariance() const;
    SpectralDensity density(int grid = kDefaultDensityGrid) const;
    // Dependence range: coefficients further apart than this are independent
    // (declared support for the Gaussian-functional case).
    int dependence_range() const;
    std::string fingerprint() const;
    void validate() const;
};

struct CoefficientSample {
    std::vector<double> a;
    std::vector<double> b;
    std::uint64_t master_seed = 0;
    std::uint64_t stream = 0;
    std::string fingerprint;
};

// Scale a kernel to unit sum of squares.  Rejects zero and non-finite input.
std::vector<double> normalize_ma_kernel(std::vector<double> kernel);

// Draw the two independent coefficient arrays (a_k), (b_k), k = 1..n.
// A fixed (master_seed, stream) pair replays bit-identically.
CoefficientSample sample_coefficients(const CoefficientModel& model, int n,
                                      std::uint64_t master_seed, std::uint64_t stream);

// One stationary centered Gaussian path with the given autocovariance.
// Circulant embedding of size >= 2(n+K) rounded to a power of two; if the
// embedding spectrum dips below -1e-9 the sampler falls back to dense
// Cholesky with diagonal jitter <= 1e-10.
std::vector<double> sample_stationary_gaussian(const CovarianceSequence& rho, int n,
                                               Philox& gen);

struct StandardizedFunctional {
    std::function<double(double)> fn; // x -> (H(x) - mean)/sd
    double mean = 0.0;
    double sd = 1.0;
};

// Center and scale a functional so E[fn(N)] = 0 and Var[fn(N)] = 1.
// Moments via Gauss-Hermite quadrature (order >= 64); the sign nonlinearity
// is exactly standardized already (odd, |sign| = 1).
StandardizedFunctional standardized_functional(const FunctionalSpec& spec,
                                               int quad_order = 128);

struct CovarianceEstimate {
    std::vector<double> estimate; // index = lag
    std::vector<double> stderr_;  // across replicates
    int replicates = 0;
};

// Empirical autocovariance of the model's a-array over independent replicates
// (products averaged over positions within each replicate, spread measured
// across replicates).
CovarianceEstimate empirical_covariance(const CoefficientModel& model, int n,
                                        int max_lag, int reps, std::uint64_t seed);

} // namespace rtp
