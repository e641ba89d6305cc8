#include "rtp/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rtp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sum_sq(double x) { return x * (x + 1.0) * (2.0 * x + 1.0) / 6.0; }
double sum_lin(double x) { return x * (x + 1.0) / 2.0; }

} // namespace

double kac_rice_iid_exact(int n) {
    if (n < 1) throw std::invalid_argument("kac_rice_iid_exact: n must be >= 1");
    return 2.0 * std::sqrt(sum_sq(n) / n);
}

double kac_rice_expected_zeros(const CovarianceSequence& rho, int n, double rel_tol) {
    rho.validate();
    if (n < 1) throw std::invalid_argument("kac_rice: n must be >= 1");
    if (rel_tol <= 0.0) throw std::invalid_argument("kac_rice: rel_tol must be > 0");

    const int H = std::min(rho.support(), n - 1);
    // Grouped lag weights; see header for the three loading formulas.
    std::vector<double> w0(H + 1, 0.0), w1(H + 1, 0.0), w2(H + 1, 0.0);
    for (int h = 1; h <= H; ++h) {
        w0[h] = (n - h) * rho.rho[h];
        w1[h] = static_cast<double>(h) * (n - h) * rho.rho[h];
        double t2 = (sum_sq(n) - sum_sq(h)) - h * (sum_lin(n) - sum_lin(h));
        w2[h] = rho.rho[h] * t2;
    }
    const double v0_base = n;
    const double v2_base = sum_sq(n);

    auto intensity = [&](double t) {
        double v0 = v0_base, v1 = 0.0, v2 = v2_base;
        for (int h = 1; h <= H; ++h) {
            double ch = std::cos(h * t), sh = std::sin(h * t);
            v0 += 2.0 * w0[h] * ch;
            v1 += -w1[h] * sh;
            v2 += 2.0 * w2[h] * ch;
        }
        if (v0 <= 0.0)
            throw std::runtime_error("kac_rice: nonpositive variance; covariance is invalid");
        double disc = v0 * v2 - v1 * v1;
        if (disc < 0.0) disc = 0.0;
        return std::sqrt(disc) / (kPi * v0);
    };

    // Periodic rectangle rule with doubling; spectrally accurate for the
    // smooth periodic integrand.
    int m = 64;
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += intensity(kTwoPi * j / m);
    double integral = acc * (kTwoPi / m);
    while (m < (1 << 20)) {
        double add = 0.0;
        for (int j = 0; j < m; ++j) add += intensity(kTwoPi * (j + 0.5) / m);
        double refined = 0.5 * integral + add * (kTwoPi / (2 * m));
        m *= 2;
        bool done = std::abs(refined - integral) <= rel_tol * std::abs(refined);
        integral = refined;
        if (done) break;
    }
    return integral;
}

SincProcessSampler::SincProcessSampler(int grid_points) : grid_(grid_points) {
    if (grid_points < 8 || grid_points > 2048)
        throw std::invalid_argument("sinc sampler: grid_points must lie in [8, 2048]");

    Eigen::MatrixXd K(grid_, grid_);
    const double step = grid_step();
    for (int i = 0; i < grid_; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = sinc(step * (i - j));
            K(i, j) = v;
            K(j, i) = v;
        }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("sinc sampler: eigendecomposition failed");
    const double lmax = es.eigenvalues().maxCoeff();
    const double floor = -1e-10 * std::max(1.0, lmax);
    Eigen::VectorXd sq(grid_);
    for (int i = 0; i < grid_; ++i) {
        double l = es.eigenvalues()(i);
        if (l < floor)
            throw std::runtime_error("sinc sampler: kernel eigenvalue below jitter budget; grid degenerate");
        sq(i) = std::sqrt(std::max(l, 0.0));
    }
    factor_ = es.eigenvectors() * sq.asDiagonal();
}

double SincProcessSampler::grid_step() const { return kTwoPi / (grid_ - 1); }

std::vector<double> SincProcessSampler::sample(Philox& gen) const {
    Eigen::VectorXd z(grid_);
    for (int i = 0; i < grid_; ++i) z(i) = gen.next_gaussian();
    Eigen::VectorXd y = factor_ * z;
    return std::vector<double>(y.data(), y.data() + grid_);
}

Eigen::MatrixXd SincProcessSampler::sample_batch(Philox& gen, int ndraws) const {
    if (ndraws < 1) throw std::invalid_argument("sinc sampler: ndraws must be >= 1");
    Eigen::MatrixXd z(grid_, ndraws);
    for (int b = 0; b < ndraws; ++b)
        for (int i = 0; i < grid_; ++i) z(i, b) = gen.next_gaussian();
    return factor_ * z;
}

Eigen::MatrixXd SincProcessSampler::sample_batch_streams(std::uint64_t seed,
                                                         std::uint64_t first_stream,
                                                         int ndraws) const {
    if (ndraws < 1) throw std::invalid_argument("sinc sampler: ndraws must be >= 1");
    Eigen::MatrixXd z(grid_, ndraws);
    for (int b = 0; b < ndraws; ++b) {
        Philox gen(seed, first_stream + static_cast<std::uint64_t>(b));
        for (int i = 0; i < grid_; ++i) z(i, b) = gen.next_gaussian();
    }
    return factor_ * z;
}

int SincProcessSampler::sign_changes(const std::vector<double>& path) {
    int c = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (path[i] * path[i + 1] < 0.0) ++c;
    return c;
}

double sigma_n_sq(double X, const std::vector<double>& t, const std::vector<double>& xi,
                  const CovarianceSequence& rho, int n) {
    rho.validate();
    if (t.empty() || t.size() != xi.size())
        throw std::invalid_argument("sigma_n_sq: t and xi must be nonempty, equal length");
    if (n < 1) throw std::invalid_argument("sigma_n_sq: n must be >= 1");

    double psi = 1.0;
    for (int h = 1; h <= rho.support(); ++h) psi += 2.0 * rho.rho[h] * std::cos(h * X);
    if (psi < 1e-12)
        throw std::runtime_error("sigma_n_sq: spectral density vanishes at X; degenerate");

    const int d = static_cast<int>(t.size());
    std::vector<double> C(n), D(n);
    for (int k = 1; k <= n; ++k) {
        double ck = 0.0, dk = 0.0;
        for (int l = 0; l < d; ++l) {
            double ang = k * X + k * t[l] / n;
            ck += xi[l] * std::cos(ang);
            dk += xi[l] * std::sin(ang);
        }
        C[k - 1] = ck;
        D[k - 1] = dk;
    }

    double num = 0.0;
    for (int k = 0; k < n; ++k) num += C[k] * C[k] + D[k] * D[k];
    const int H = std::min(rho.support(), n - 1);
    for (int h = 1; h <= H; ++h) {
        double cross = 0.0;
        for (int k = 0; k + h < n; ++k) cross += C[k] * C[k + h] + D[k] * D[k + h];
        num += 2.0 * rho.rho[h] * cross;
    }
    return num / (n * psi);
}

double sinc_quadratic_form(const std::vector<double>& t, const std::vector<double>& xi) {
    if (t.size() != xi.size())
        throw std::invalid_argument("sinc_quadratic_form: t and xi must have equal length");
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            s += xi[i] * xi[j] * sinc(t[i] - t[j]);
    return s;
}

} // namespace rtp
