#pragma once
// Monte Carlo engines and deterministic bookkeeping.
//
// Replicate r of any estimator draws from stream index r of the master seed,
// so estimates are independent of thread count and scheduling and any single
// replicate can be replayed alone.  Reductions always run in replicate order.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "rtp/coeffgen.hpp"
#include "rtp/zeros.hpp"

namespace rtp {

struct MCOptions {
    int reps = 1000;
    std::uint64_t seed = 0;
    int threads = 0; // 0: hardware concurrency
};

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    int replicates = 0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
};

// Mean/stderr/ci95 of a per-replicate value vector (replicate order).
MCEstimate summarize(const std::vector<double>& values, std::uint64_t seed,
                     double wall_seconds);

// Run work(r) for r = 0..reps-1 across threads; out[r] = work(r).
void parallel_replicates(int reps, int threads,
                         const std::function<double(int)>& work,
                         std::vector<double>& out);

// --- expected zero density ------------------------------------------------

struct ZeroDensityEstimate {
    MCEstimate estimate;          // of N(f, [0,2pi)) / n  (or the window count)
    double suspicious_fraction = 0.0;
    bool reliability_warning = false; // suspicious fraction above 1%
};

// Full-interval estimator: replicate value N(f_r, [0,2pi)) / n.
// localized = true instead counts zeros of one uniformly placed window
// S(t) = f(X + t/n)/sqrt(n), t in [0,2pi); both target the same mean.
ZeroDensityEstimate mc_expected_zero_density(const CoefficientModel& model, int n,
                                             const MCOptions& opt,
                                             bool localized = false);

// --- small ball -----------------------------------------------------------

enum class SmallBallMode { AtPoint, SupNorm };

// AtPoint: frequency of |S(t)| <= delta at fixed window position X.
// SupNorm: X uniform per replicate, sup over a 16n grid on [0,2pi).
MCEstimate empirical_small_ball(const CoefficientModel& model, int n, double delta,
                                SmallBallMode mode, double t, double X,
                                const MCOptions& opt);

// --- distributional distances ----------------------------------------------

// sup_x |F_hat(x) - Phi(x)| with both one-sided steps at each sample point.
double kolmogorov_distance_to_normal(std::vector<double> samples);

// Normalized one-point marginals S(t)/sqrt(psi_rho(X)).  phase fixes X
// (lattice structure at resonant phases makes convergence rates visible);
// empty phase draws X uniformly per replicate.
std::vector<double> clt_marginal_samples(const CoefficientModel& model, int n,
                                         int reps, std::uint64_t seed,
                                         std::optional<double> phase,
                                         double t = 0.0, int threads = 0);

// --- tightness -------------------------------------------------------------

struct TightnessRow {
    double s = 0.0, t = 0.0;
    double exact = 0.0;      // (2/n) sum_k (1 - cos(k (t-s)/n))
    double empirical = 0.0;  // mean |S(t) - S(s)|^2 over replicates
    double se = 0.0;
    double bound = 0.0;      // (t-s)^2
};

std::vector<TightnessRow> tightness_discrepancy(const CoefficientModel& model, int n,
                                                const std::vector<std::pair<double, double>>& pairs,
                                                const MCOptions& opt);

// Closed form (2/n) sum_{k=1..n} (1 - cos(k dt / n)); always <= dt^2.
double tightness_exact(int n, double dt);

// --- moments of the window zero count --------------------------------------

// E[N(S, [0,2pi))^{1+epsilon}] with X uniform per replicate; 0 < epsilon <= 1
// (0.25 is the usual compromise between tail sensitivity and variance).
ZeroDensityEstimate tail_moment(const CoefficientModel& model, int n, double epsilon,
                                const MCOptions& opt);

// Same moment for the limiting sinc-covariance process (grid sign changes);
// epsilon = 0 gives the plain mean zero count, the 2/sqrt(3) check.
MCEstimate sinc_tail_moment(int grid_points, double epsilon, const MCOptions& opt);

// --- exponent bookkeeping ---------------------------------------------------

// Pure arithmetic in the moment exponent eta > 0 and slack epsilon >= 0:
//   gamma_eps = eta / (2 (5 + 7 eta + 3 eps (4 + 6 eta)))
//   beta_eps  = gamma_eps (1 + 3 eps) / (1 + 2 eps)
//   gamma0    = eta / (2 (5 + 7 eta))          (the eps -> 0 limit, -> 1/14)
//   rate      = ((1+eta)/(4+6eta)) (eta/(2(1+eta)) - gamma_eps)
//                = (1+3 eps) gamma_eps identically
//   d0        = 57/2 + 20/eta
struct ExponentLedger {
    double gamma_eps = 0.0;
    double beta_eps = 0.0;
    double gamma0 = 0.0;
    double rate_exponent = 0.0;
    double d0 = 0.0;
};

ExponentLedger exponent_ledger(double eta, double epsilon = 0.25);

} // namespace rtp
