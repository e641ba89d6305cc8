#include "rtp/coeffgen.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "rtp/fft.hpp"
#include "rtp/quadrature.hpp"

namespace rtp {

namespace {

double draw_family(Family family, const TwoPointParams& tp, Philox& gen) {
    switch (family) {
    case Family::Gaussian:   return gen.next_gaussian();
    case Family::Rademacher: return gen.next_rademacher();
    case Family::Uniform:    return (2.0 * gen.next_double() - 1.0) * std::sqrt(3.0);
    case Family::TwoPoint:   return gen.next_double() < tp.p ? tp.hi : tp.lo;
    }
    throw std::logic_error("draw_family: unreachable");
}

const char* family_name(Family f) {
    switch (f) {
    case Family::Gaussian:   return "gaussian";
    case Family::Rademacher: return "rademacher";
    case Family::Uniform:    return "uniform";
    case Family::TwoPoint:   return "two-point";
    }
    return "?";
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Draw one array of length n for an i.i.d. or moving-average model.
std::vector<double> draw_linear_array(const CoefficientModel& m, int n, Philox& gen) {
    if (m.kind == CoefficientModel::Kind::Iid) {
        std::vector<double> out(n);
        for (int i = 0; i < n; ++i) out[i] = draw_family(m.family, m.two_point, gen);
        return out;
    }
    // a_k = sum_j c_j eps_{k+j}; needs n + m innovations.
    const int mlen = static_cast<int>(m.kernel.size());
    std::vector<double> eps(n + mlen - 1);
    for (auto& e : eps) e = draw_family(m.family, m.two_point, gen);
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < mlen; ++j) s += m.kernel[j] * eps[i + j];
        out[i] = s;
    }
    return out;
}

} // namespace

TwoPointParams TwoPointParams::from_probability(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("two-point: p must lie strictly inside (0, 1)");
    TwoPointParams tp;
    tp.p = p;
    tp.hi = std::sqrt((1.0 - p) / p);
    tp.lo = -std::sqrt(p / (1.0 - p));
    return tp;
}

void TwoPointParams::validate() const {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("two-point: p must lie strictly inside (0, 1)");
    double mean = p * hi + (1.0 - p) * lo;
    double second = p * hi * hi + (1.0 - p) * lo * lo;
    if (std::abs(mean) > 1e-9 || std::abs(second - 1.0) > 1e-9)
        throw std::invalid_argument("two-point: values must give mean 0 and variance 1");
}

CoefficientModel CoefficientModel::iid(Family f) {
    if (f == Family::TwoPoint)
        throw std::invalid_argument("iid: use iid_two_point for the two-point family");
    CoefficientModel m;
    m.kind = Kind::Iid;
    m.family = f;
    return m;
}

CoefficientModel CoefficientModel::iid_two_point(TwoPointParams tp) {
    tp.validate();
    CoefficientModel m;
    m.kind = Kind::Iid;
    m.family = Family::TwoPoint;
    m.two_point = tp;
    return m;
}

CoefficientModel CoefficientModel::moving_average(std::vector<double> kernel, Family innovations) {
    CoefficientModel m;
    m.kind = Kind::MovingAverage;
    m.family = innovations;
    m.kernel = normalize_ma_kernel(std::move(kernel));
    if (innovations == Family::TwoPoint)
        throw std::invalid_argument("moving_average: set two_point params on the model after construction");
    return m;
}

CoefficientModel CoefficientModel::gaussian_functional(CovarianceSequence rho_g,
                                                       FunctionalSpec spec) {
    rho_g.validate();
    CoefficientModel m;
    m.kind = Kind::GaussianFunctional;
    m.rho_g = std::move(rho_g);
    m.functional = std::move(spec);
    return m;
}

void CoefficientModel::validate() const {
    switch (kind) {
    case Kind::Iid:
        if (family == Family::TwoPoint) two_point.validate();
        break;
    case Kind::MovingAverage: {
        if (kernel.empty()) throw std::invalid_argument("model: moving average needs a kernel");
        double sq = 0.0;
        for (double c : kernel) sq += c * c;
        if (std::abs(sq - 1.0) > 1e-10)
            throw std::invalid_argument("model: kernel must be normalized");
        if (family == Family::TwoPoint) two_point.validate();
        break;
    }
    case Kind::GaussianFunctional:
        rho_g.validate();
        break;
    }
}

CovarianceSequence CoefficientModel::covariance() const {
    switch (kind) {
    case Kind::Iid: {
        CovarianceSequence r;
        r.rho = {1.0};
        return r;
    }
    case Kind::MovingAverage:
        return ma_autocovariance(kernel);
    case Kind::GaussianFunctional:
        return functional_covariance(hermite_coefficients(functional, hermite_order), rho_g);
    }
    throw std::logic_error("covariance: unreachable");
}

SpectralDensity CoefficientModel::density(int grid) const {
    return density_from_finite_covariance(covariance(), grid);
}

int CoefficientModel::dependence_range() const {
    switch (kind) {
    case Kind::Iid:               return 0;
    case Kind::MovingAverage:     return static_cast<int>(kernel.size()) - 1;
    case Kind::GaussianFunctional: return rho_g.support();
    }
    throw std::logic_error("dependence_range: unreachable");
}

std::string CoefficientModel::fingerprint() const {
    std::string s;
    switch (kind) {
    case Kind::Iid:
        s = "iid:";
        s += family_name(family);
        if (family == Family::TwoPoint) s += ":p=" + fmt17(two_point.p);
        break;
    case Kind::MovingAverage:
        s = "ma:[";
        for (std::size_t i = 0; i < kernel.size(); ++i) {
            if (i) s += ",";
            s += fmt17(kernel[i]);
        }
        s += "]:";
        s += family_name(family);
        if (family == Family::TwoPoint) s += ":p=" + fmt17(two_point.p);
        break;
    case Kind::GaussianFunctional: {
        s = "gfun:rho=[";
        for (std::size_t i = 0; i < rho_g.rho.size(); ++i) {
            if (i) s += ",";
            s += fmt17(rho_g.rho[i]);
        }
        s += "]:";
        switch (functional.kind) {
        case FunctionalKind::Sign:              s += "sign"; break;
        case FunctionalKind::PointwiseMap:      s += "map"; break;
        case FunctionalKind::HermiteTruncation: s += "hermite"; break;
        }
        s += ":Q=" + std::to_string(hermite_order);
        break;
    }
    }
    return s;
}

std::vector<double> normalize_ma_kernel(std::vector<double> kernel) {
    if (kernel.empty()) throw std::invalid_argument("normalize_ma_kernel: empty kernel");
    double sq = 0.0;
    for (double c : kernel) {
        if (!std::isfinite(c)) throw std::invalid_argument("normalize_ma_kernel: non-finite entry");
        sq += c * c;
    }
    if (sq < 1e-300) throw std::invalid_argument("normalize_ma_kernel: zero kernel");
    double inv = 1.0 / std::sqrt(sq);
    for (double& c : kernel) c *= inv;
    return kernel;
}

std::vector<double> sample_stationary_gaussian(const CovarianceSequence& rho, int n,
                                               Philox& gen) {
    rho.validate();
    if (n < 1) throw std::invalid_argument("sample_stationary_gaussian: n must be >= 1");
    const int K = rho.support();
    const std::size_t M = next_pow2(2 * static_cast<std::size_t>(n + K));

    // Circulant first row c_j = rho(min(j, M-j)).
    std::vector<std::complex<double>> c(M, {0.0, 0.0});
    for (std::size_t j = 0; j < M; ++j) {
        std::size_t d = std::min(j, M - j);
        c[j] = {rho.at(static_cast<int>(d)), 0.0};
    }
    fft_forward(c);

    bool ok = true;
    std::vector<double> lambda(M);
    for (std::size_t j = 0; j < M; ++j) {
        lambda[j] = c[j].real();
        if (lambda[j] < -1e-9) ok = false;
        if (lambda[j] < 0.0) lambda[j] = 0.0;
    }

    if (ok) {
        // y = FFT(sqrt(lambda_j/M) (u_j + i v_j)): real and imaginary parts
        // are independent stationary paths with covariance rho; the real part
        // is returned, the other half is discarded to keep one path per call.
        std::vector<std::complex<double>> w(M);
        for (std::size_t j = 0; j < M; ++j) {
            double s = std::sqrt(lambda[j] / static_cast<double>(M));
            double u = gen.next_gaussian();
            double v = gen.next_gaussian();
            w[j] = {s * u, s * v};
        }
        fft_forward(w);
        std::vector<double> out(n);
        for (int i = 0; i < n; ++i) out[i] = w[i].real();
        return out;
    }

    // Dense fallback: Toeplitz Cholesky with a diagonal jitter ladder.
    Eigen::MatrixXd sigma(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sigma(i, j) = rho.at(i - j);
    const double jitters[] = {0.0, 1e-12, 1e-10};
    for (double jit : jitters) {
        Eigen::MatrixXd s = sigma + jit * Eigen::MatrixXd::Identity(n, n);
        Eigen::LLT<Eigen::MatrixXd> llt(s);
        if (llt.info() != Eigen::Success) continue;
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z(i) = gen.next_gaussian();
        Eigen::VectorXd y = llt.matrixL() * z;
        return std::vector<double>(y.data(), y.data() + n);
    }
    throw std::runtime_error(
        "sample_stationary_gaussian: covariance not positive definite within jitter 1e-10");
}

StandardizedFunctional standardized_functional(const FunctionalSpec& spec, int quad_order) {
    StandardizedFunctional out;
    switch (spec.kind) {
    case FunctionalKind::Sign:
        out.mean = 0.0;
        out.sd = 1.0;
        out.fn = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
        return out;
    case FunctionalKind::HermiteTruncation: {
        // Mean is the He_0 coefficient; variance sum_{q>=1} c_q^2 q! exactly.
        const auto& cs = spec.hermite_coeffs;
        double var = 0.0, f = 1.0;
        for (std::size_t q = 1; q < cs.size(); ++q) {
            if (q >= 2) f *= q;
            var += cs[q] * cs[q] * f;
        }
        if (var < 1e-14)
            throw std::invalid_argument("standardized_functional: zero variance");
        out.mean = cs.empty() ? 0.0 : cs[0];
        out.sd = std::sqrt(var);
        out.fn = [cs, mean = out.mean, inv = 1.0 / out.sd](double x) {
            // Hermite series via the forward recurrence.
            double acc = 0.0, hm = 1.0, h = x;
            if (!cs.empty()) acc += cs[0];
            if (cs.size() > 1) acc += cs[1] * x;
            for (std::size_t q = 2; q < cs.size(); ++q) {
                double hn = x * h - static_cast<double>(q - 1) * hm;
                hm = h;
                h = hn;
                acc += cs[q] * h;
            }
            return (acc - mean) * inv;
        };
        return out;
    }
    case FunctionalKind::PointwiseMap: {
        const int order = std::max(64, quad_order);
        GaussHermiteRule rule = gauss_hermite(order);
        double mu = 0.0;
        for (int i = 0; i < rule.order(); ++i) mu += rule.weight[i] * spec.map(rule.node[i]);
        double var = 0.0;
        for (int i = 0; i < rule.order(); ++i) {
            double d = spec.map(rule.node[i]) - mu;
            var += rule.weight[i] * d * d;
        }
        if (var < 1e-14)
            throw std::invalid_argument("standardized_functional: zero variance");
        out.mean = mu;
        out.sd = std::sqrt(var);
        out.fn = [f = spec.map, mu, inv = 1.0 / out.sd](double x) { return (f(x) - mu) * inv; };
        return out;
    }
    }
    throw std::logic_error("standardized_functional: unreachable");
}

CoefficientSample sample_coefficients(const CoefficientModel& model, int n,
                                      std::uint64_t master_seed, std::uint64_t stream) {
    model.validate();
    if (n < 1) throw std::invalid_argument("sample_coefficients: n must be >= 1");

    Philox gen(master_seed, stream);
    CoefficientSample s;
    s.master_seed = master_seed;
    s.stream = stream;
    s.fingerprint = model.fingerprint();

    if (model.kind == CoefficientModel::Kind::GaussianFunctional) {
        StandardizedFunctional H = standardized_functional(model.functional);
        s.a = sample_stationary_gaussian(model.rho_g, n, gen);
        s.b = sample_stationary_gaussian(model.rho_g, n, gen);
        for (double& v : s.a) v = H.fn(v);
        for (double& v : s.b) v = H.fn(v);
    } else {
        s.a = draw_linear_array(model, n, gen);
        s.b = draw_linear_array(model, n, gen);
    }
    return s;
}

CovarianceEstimate empirical_covariance(const CoefficientModel& model, int n,
                                        int max_lag, int reps, std::uint64_t seed) {
    if (max_lag < 0 || max_lag >= n)
        throw std::invalid_argument("empirical_covariance: need 0 <= max_lag < n");
    if (reps < 2) throw std::invalid_argument("empirical_covariance: reps must be >= 2");

    std::vector<double> sum(max_lag + 1, 0.0), sumsq(max_lag + 1, 0.0);
    for (int r = 0; r < reps; ++r) {
        CoefficientSample s = sample_coefficients(model, n, seed, static_cast<std::uint64_t>(r));
        for (int h = 0; h <= max_lag; ++h) {
            double acc = 0.0;
            for (int k = 0; k + h < n; ++k) acc += s.a[k] * s.a[k + h];
            double est = acc / (n - h); // known mean zero: plain product average
            sum[h] += est;
            sumsq[h] += est * est;
        }
    }
    CovarianceEstimate out;
    out.replicates = reps;
    out.estimate.resize(max_lag + 1);
    out.stderr_.resize(max_lag + 1);
    for (int h = 0; h <= max_lag; ++h) {
        double mean = sum[h] / reps;
        double var = (sumsq[h] - reps * mean * mean) / (reps - 1);
        out.estimate[h] = mean;
        out.stderr_[h] = std::sqrt(std::max(var, 0.0) / reps);
    }
    return out;
}

} // namespace rtp
