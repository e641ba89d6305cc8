#include "rtp/stats.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rtp/oracle.hpp"
#include "rtp/trigpoly.hpp"

namespace rtp {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Auxiliary randomness (window position X, ...) keys off a tweaked master
// seed so replicate r can use stream r for the coefficient arrays *and*
// stream r for auxiliary draws without the two colliding.
constexpr std::uint64_t kAuxKeyTweak = 0x9E3779B97F4A7C15ull;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TrigPolynomial to_poly(CoefficientSample&& s) {
    TrigPolynomial p;
    p.a = std::move(s.a);
    p.b = std::move(s.b);
    return p;
}

double uniform_angle(std::uint64_t seed, std::uint64_t stream) {
    Philox aux(seed ^ kAuxKeyTweak, stream);
    return kTwoPi * aux.next_double();
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void require_reps(int reps, const char* who) {
    if (reps < 1) throw std::invalid_argument(std::string(who) + ": reps must be >= 1");
}

} // namespace

MCEstimate summarize(const std::vector<double>& values, std::uint64_t seed,
                     double wall_seconds) {
    if (values.empty()) throw std::invalid_argument("summarize: no replicate values");
    const int r = static_cast<int>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= r;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double se = r > 1 ? std::sqrt(ss / (r - 1) / r) : 0.0;

    MCEstimate e;
    e.mean = mean;
    e.stderr_ = se;
    e.ci95_lo = mean - 1.96 * se;
    e.ci95_hi = mean + 1.96 * se;
    e.replicates = r;
    e.seed = seed;
    e.wall_seconds = wall_seconds;
    return e;
}

void parallel_replicates(int reps, int threads,
                         const std::function<double(int)>& work,
                         std::vector<double>& out) {
    require_reps(reps, "parallel_replicates");
    out.assign(reps, 0.0);

    int t = threads > 0 ? threads
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    t = std::min(t, reps);
    if (t <= 1) {
        for (int r = 0; r < reps; ++r) out[r] = work(r);
        return;
    }

    std::atomic<int> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto runner = [&] {
        for (;;) {
            int r = next.fetch_add(1);
            if (r >= reps) return;
            try {
                out[r] = work(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int i = 0; i < t; ++i) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

ZeroDensityEstimate mc_expected_zero_density(const CoefficientModel& model, int n,
                                             const MCOptions& opt, bool localized) {
    model.validate();
    if (n < 1) throw std::invalid_argument("mc_expected_zero_density: n must be >= 1");
    if (opt.reps < 100)
        throw std::invalid_argument("mc_expected_zero_density: reps must be >= 100");

    auto t0 = std::chrono::steady_clock::now();
    ZeroCountOptions zopt;
    zopt.refine = false; // bracket counts do not depend on root polishing

    std::vector<double> values;
    std::vector<double> susp(opt.reps, 0.0);
    parallel_replicates(opt.reps, opt.threads, [&](int r) {
        auto stream = static_cast<std::uint64_t>(r);
        TrigPolynomial p = to_poly(sample_coefficients(model, n, opt.seed, stream));
        ZeroCountResult z;
        if (localized) {
            double X = uniform_angle(opt.seed, stream);
            z = count_zeros_local(local_field(p, X), zopt);
        } else {
            z = count_zeros(p, zopt);
        }
        susp[r] = z.suspicious_cells > 0 ? 1.0 : 0.0;
        // Window counts already estimate E[N]/n: a uniform window of width
        // 2pi/n catches each zero of f with probability exactly 1/n.
        return localized ? static_cast<double>(z.count)
                         : static_cast<double>(z.count) / n;
    }, values);

    ZeroDensityEstimate out;
    out.estimate = summarize(values, opt.seed, seconds_since(t0));
    double s = 0.0;
    for (double v : susp) s += v;
    out.suspicious_fraction = s / opt.reps;
    out.reliability_warning = out.suspicious_fraction > 0.01;
    return out;
}

MCEstimate empirical_small_ball(const CoefficientModel& model, int n, double delta,
                                SmallBallMode mode, double t, double X,
                                const MCOptions& opt) {
    model.validate();
    if (n < 1) throw std::invalid_argument("empirical_small_ball: n must be >= 1");
    if (delta <= 0.0) throw std::invalid_argument("empirical_small_ball: delta must be > 0");
    require_reps(opt.reps, "empirical_small_ball");

    auto t0 = std::chrono::steady_clock::now();
    const double sqn = std::sqrt(static_cast<double>(n));
    const int grid = 16 * n;

    std::vector<double> values;
    parallel_replicates(opt.reps, opt.threads, [&](int r) {
        auto stream = static_cast<std::uint64_t>(r);
        TrigPolynomial p = to_poly(sample_coefficients(model, n, opt.seed, stream));
        if (mode == SmallBallMode::AtPoint) {
            double s = evaluate_at(p, X + t / n) / sqn;
            return std::abs(s) <= delta ? 1.0 : 0.0;
        }
        LocalField f = local_field(p, uniform_angle(opt.seed, stream));
        double sup = 0.0;
        for (int j = 0; j < grid; ++j)
            sup = std::max(sup, std::abs(f(kTwoPi * j / grid)));
        return sup <= delta ? 1.0 : 0.0;
    }, values);

    return summarize(values, opt.seed, seconds_since(t0));
}

double kolmogorov_distance_to_normal(std::vector<double> samples) {
    if (samples.size() < 100)
        throw std::invalid_argument("kolmogorov_distance_to_normal: need >= 100 samples");
    std::sort(samples.begin(), samples.end());
    const double r = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double phi = normal_cdf(samples[i]);
        d = std::max(d, std::max((i + 1) / r - phi, phi - i / r));
    }
    return d;
}

std::vector<double> clt_marginal_samples(const CoefficientModel& model, int n,
                                         int reps, std::uint64_t seed,
                                         std::optional<double> phase,
                                         double t, int threads) {
    model.validate();
    if (n < 1) throw std::invalid_argument("clt_marginal_samples: n must be >= 1");
    require_reps(reps, "clt_marginal_samples");

    const CovarianceSequence rho = model.covariance();
    auto psi_at = [&rho](double x) {
        double psi = 1.0;
        for (int h = 1; h <= rho.support(); ++h) psi += 2.0 * rho.at(h) * std::cos(h * x);
        return psi;
    };
    if (phase && psi_at(*phase) <= 1e-12)
        throw std::invalid_argument("clt_marginal_samples: spectral density vanishes at phase");

    std::vector<double> values;
    parallel_replicates(reps, threads, [&](int r) {
        auto stream = static_cast<std::uint64_t>(r);
        TrigPolynomial p = to_poly(sample_coefficients(model, n, seed, stream));
        double X = phase ? *phase : uniform_angle(seed, stream);
        double psi = psi_at(X);
        if (psi <= 1e-12) return 0.0; // measure-zero set for admissible densities
        return evaluate_at(p, X + t / n) / std::sqrt(n * psi);
    }, values);
    return values;
}

double tightness_exact(int n, double dt) {
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += 1.0 - std::cos(k * dt / n);
    return 2.0 * s / n;
}

std::vector<TightnessRow> tightness_discrepancy(const CoefficientModel& model, int n,
                                                const std::vector<std::pair<double, double>>& pairs,
                                                const MCOptions& opt) {
    model.validate();
    if (n < 1) throw std::invalid_argument("tightness_discrepancy: n must be >= 1");
    if (pairs.empty()) throw std::invalid_argument("tightness_discrepancy: no pairs");
    if (opt.reps < 1000)
        throw std::invalid_argument("tightness_discrepancy: reps must be >= 1000");

    const std::size_t np = pairs.size();
    std::vector<std::vector<double>> sq(np, std::vector<double>(opt.reps, 0.0));
    std::vector<double> dummy;
    parallel_replicates(opt.reps, opt.threads, [&](int r) {
        auto stream = static_cast<std::uint64_t>(r);
        TrigPolynomial p = to_poly(sample_coefficients(model, n, opt.seed, stream));
        LocalField f = local_field(p, uniform_angle(opt.seed, stream));
        for (std::size_t i = 0; i < np; ++i) {
            double d = f(pairs[i].second) - f(pairs[i].first);
            sq[i][r] = d * d;
        }
        return 0.0;
    }, dummy);

    std::vector<TightnessRow> rows(np);
    for (std::size_t i = 0; i < np; ++i) {
        MCEstimate e = summarize(sq[i], opt.seed, 0.0);
        rows[i].s = pairs[i].first;
        rows[i].t = pairs[i].second;
        rows[i].exact = tightness_exact(n, pairs[i].second - pairs[i].first);
        rows[i].empirical = e.mean;
        rows[i].se = e.stderr_;
        rows[i].bound = (pairs[i].second - pairs[i].first) * (pairs[i].second - pairs[i].first);
    }
    return rows;
}

ZeroDensityEstimate tail_moment(const CoefficientModel& model, int n, double epsilon,
                                const MCOptions& opt) {
    model.validate();
    if (n < 1) throw std::invalid_argument("tail_moment: n must be >= 1");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("tail_moment: need 0 < epsilon <= 1");
    require_reps(opt.reps, "tail_moment");

    auto t0 = std::chrono::steady_clock::now();
    ZeroCountOptions zopt;
    zopt.refine = false;

    std::vector<double> values;
    std::vector<double> susp(opt.reps, 0.0);
    parallel_replicates(opt.reps, opt.threads, [&](int r) {
        auto stream = static_cast<std::uint64_t>(r);
        TrigPolynomial p = to_poly(sample_coefficients(model, n, opt.seed, stream));
        ZeroCountResult z = count_zeros_local(local_field(p, uniform_angle(opt.seed, stream)), zopt);
        susp[r] = z.suspicious_cells > 0 ? 1.0 : 0.0;
        return std::pow(static_cast<double>(z.count), 1.0 + epsilon);
    }, values);

    ZeroDensityEstimate out;
    out.estimate = summarize(values, opt.seed, seconds_since(t0));
    double s = 0.0;
    for (double v : susp) s += v;
    out.suspicious_fraction = s / opt.reps;
    out.reliability_warning = out.suspicious_fraction > 0.01;
    return out;
}

MCEstimate sinc_tail_moment(int grid_points, double epsilon, const MCOptions& opt) {
    if (epsilon < 0.0) throw std::invalid_argument("sinc_tail_moment: epsilon must be >= 0");
    require_reps(opt.reps, "sinc_tail_moment");

    auto t0 = std::chrono::steady_clock::now();
    SincProcessSampler sampler(grid_points);
    std::vector<double> values(opt.reps, 0.0);

    // Chunked GEMM keeps replicate r pinned to stream r while letting the
    // matrix product carry the arithmetic.
    const int chunk = 512;
    for (int start = 0; start < opt.reps; start += chunk) {
        int m = std::min(chunk, opt.reps - start);
        Eigen::MatrixXd paths =
            sampler.sample_batch_streams(opt.seed, static_cast<std::uint64_t>(start), m);
        for (int j = 0; j < m; ++j) {
            int c = 0;
            for (int i = 1; i < paths.rows(); ++i)
                if (paths(i - 1, j) * paths(i, j) < 0.0) ++c;
            values[start + j] = std::pow(static_cast<double>(c), 1.0 + epsilon);
        }
    }
    return summarize(values, opt.seed, seconds_since(t0));
}

ExponentLedger exponent_ledger(double eta, double epsilon) {
    if (!(eta > 0.0)) throw std::invalid_argument("exponent_ledger: eta must be > 0");
    if (epsilon < 0.0) throw std::invalid_argument("exponent_ledger: epsilon must be >= 0");

    ExponentLedger e;
    e.gamma_eps = eta / (2.0 * (5.0 + 7.0 * eta + 3.0 * epsilon * (4.0 + 6.0 * eta)));
    e.beta_eps = e.gamma_eps * (1.0 + 3.0 * epsilon) / (1.0 + 2.0 * epsilon);
    e.gamma0 = eta / (2.0 * (5.0 + 7.0 * eta));
    e.rate_exponent = (1.0 + eta) / (4.0 + 6.0 * eta) *
                      (eta / (2.0 * (1.0 + eta)) - e.gamma_eps);
    e.d0 = 57.0 / 2.0 + 20.0 / eta;
    return e;
}

} // namespace rtp
