#include "rtp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rtp/quadrature.hpp"

namespace rtp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double factorial(int q) {
    double f = 1.0;
    for (int i = 2; i <= q; ++i) f *= i;
    return f;
}

// He_q(x), probabilists' convention: He_0 = 1, He_1 = x, He_{q+1} = x He_q - q He_{q-1}.
double hermite_he(int q, double x) {
    if (q == 0) return 1.0;
    double hm = 1.0, h = x;
    for (int k = 1; k < q; ++k) {
        double hn = x * h - k * hm;
        hm = h;
        h = hn;
    }
    return h;
}

void check_grid(int grid) {
    if (grid < 16 || (grid & (grid - 1)) != 0)
        throw std::invalid_argument("spectral: grid size must be a power of two >= 16");
}

} // namespace

void CovarianceSequence::validate() const {
    if (rho.empty()) throw std::invalid_argument("covariance: empty sequence");
    if (std::abs(rho[0] - 1.0) > 1e-12)
        throw std::invalid_argument("covariance: rho(0) must equal 1");
    for (double v : rho) {
        if (!std::isfinite(v)) throw std::invalid_argument("covariance: non-finite entry");
        if (std::abs(v) > 1.0 + 1e-12)
            throw std::invalid_argument("covariance: |rho(h)| must not exceed 1");
    }
}

double SpectralDensity::x(int j) const {
    return -kPi + kTwoPi * static_cast<double>(j) / grid_size();
}

double SpectralDensity::min_on_grid() const {
    return *std::min_element(value.begin(), value.end());
}

double SpectralDensity::mass() const {
    double s = 0.0;
    for (double v : value) s += v;
    return s / grid_size();
}

double SpectralDensity::evaluate(double xq) const {
    if (coeffs) {
        double s = 1.0;
        for (int h = 1; h <= coeffs->support(); ++h)
            s += 2.0 * coeffs->rho[h] * std::cos(h * xq);
        return s;
    }
    if (closed_form) {
        if (*closed_form == ClosedFormKind::BargmannFock) {
            double s = 0.0;
            for (int k = -6; k <= 6; ++k) {
                double u = xq + kTwoPi * k;
                s += std::exp(-0.5 * u * u);
            }
            return std::sqrt(kTwoPi) * s;
        }
        // Exponential: periodized Cauchy with midpoint tail correction.
        constexpr int kTerms = 10000;
        double s = 0.0;
        for (int k = -kTerms; k <= kTerms; ++k) {
            double u = xq + kTwoPi * k;
            s += 2.0 / (1.0 + u * u);
        }
        double edge = kTwoPi * (kTerms + 0.5);
        s += (1.0 / kPi) * (kPi / 2.0 - std::atan(xq + edge));
        s += (1.0 / kPi) * (kPi / 2.0 - std::atan(edge - xq));
        return s;
    }
    // Periodic linear interpolation on the stored grid.
    const int G = grid_size();
    double u = (xq + kPi) / kTwoPi;
    u -= std::floor(u);
    double p = u * G;
    int j = static_cast<int>(p);
    if (j >= G) j = 0;
    double frac = p - j;
    return value[j] * (1.0 - frac) + value[(j + 1) % G] * frac;
}

double HermiteExpansion::mass() const {
    double m = 0.0, f = 1.0;
    for (std::size_t q = 0; q < c.size(); ++q) {
        if (q >= 2) f *= q;
        if (q >= 1) m += c[q] * c[q] * f;
    }
    return m;
}

FunctionalSpec FunctionalSpec::sign_functional(double eta) {
    FunctionalSpec s;
    s.kind = FunctionalKind::Sign;
    s.moment_bound_eta = eta; // |sign| <= 1: every moment is finite
    return s;
}

FunctionalSpec FunctionalSpec::pointwise(std::function<double(double)> f, double eta) {
    if (!f) throw std::invalid_argument("functional: pointwise map must be callable");
    FunctionalSpec s;
    s.kind = FunctionalKind::PointwiseMap;
    s.map = std::move(f);
    s.moment_bound_eta = eta;
    return s;
}

FunctionalSpec FunctionalSpec::hermite(std::vector<double> coeffs, double eta) {
    if (coeffs.empty()) throw std::invalid_argument("functional: empty hermite coefficients");
    FunctionalSpec s;
    s.kind = FunctionalKind::HermiteTruncation;
    s.hermite_coeffs = std::move(coeffs);
    s.moment_bound_eta = eta;
    return s;
}

SpectralDensity density_from_finite_covariance(const CovarianceSequence& rho, int grid) {
    rho.validate();
    check_grid(grid);
    if (rho.support() >= grid / 2)
        throw std::invalid_argument("spectral: covariance support must be < grid/2");

    SpectralDensity psi;
    psi.value.resize(grid);
    psi.coeffs = rho;
    // Evaluate on j = 0..G/2 and mirror so psi(x) == psi(-x) holds exactly
    // (grid symmetry j <-> G-j maps x_j to -x_j).
    for (int j = 0; j <= grid / 2; ++j) {
        double xj = -kPi + kTwoPi * static_cast<double>(j) / grid;
        double s = 1.0;
        for (int h = 1; h <= rho.support(); ++h)
            s += 2.0 * rho.rho[h] * std::cos(h * xj);
        psi.value[j] = s;
        if (j > 0 && j < grid / 2) psi.value[grid - j] = s;
    }
    return psi;
}

CovarianceSequence ma_autocovariance(const std::vector<double>& kernel) {
    if (kernel.empty()) throw std::invalid_argument("ma: empty kernel");
    double sq = 0.0;
    for (double c : kernel) {
        if (!std::isfinite(c)) throw std::invalid_argument("ma: non-finite kernel entry");
        sq += c * c;
    }
    if (std::abs(sq - 1.0) > 1e-10)
        throw std::invalid_argument("ma: kernel must be normalized (sum of squares = 1)");
    const int m = static_cast<int>(kernel.size()) - 1;
    CovarianceSequence rho;
    rho.rho.resize(m + 1, 0.0);
    for (int h = 0; h <= m; ++h) {
        double s = 0.0;
        for (int j = 0; j + h <= m; ++j) s += kernel[j] * kernel[j + h];
        rho.rho[h] = s;
    }
    rho.rho[0] = 1.0; // exact by normalization; kill rounding residue
    return rho;
}

SpectralDensity ma_density(const std::vector<double>& kernel, int grid) {
    return density_from_finite_covariance(ma_autocovariance(kernel), grid);
}

HermiteExpansion hermite_coefficients(const FunctionalSpec& spec, int Q, int quad_order) {
    if (Q < 1) throw std::invalid_argument("hermite_coefficients: Q must be >= 1");
    HermiteExpansion exp;
    exp.c.assign(Q + 1, 0.0);

    switch (spec.kind) {
    case FunctionalKind::Sign: {
        // E[sign(N) He_{2j+1}(N)] = 2 phi(0) He_2j(0) = sqrt(2/pi) (-1)^j (2j-1)!!
        // follows from (He_{q-1} phi)' = -He_q phi; even coefficients vanish.
        // Quadrature is useless here (jump at 0 => O(1/order) error), so the
        // exact moments are used.
        double sqrt_2_over_pi = std::sqrt(2.0 / kPi);
        for (int q = 1; q <= Q; q += 2) {
            int j = (q - 1) / 2;
            double dfact = 1.0;
            for (int i = 1; i <= 2 * j - 1; i += 2) dfact *= i;
            double sign = (j % 2 == 0) ? 1.0 : -1.0;
            exp.c[q] = sqrt_2_over_pi * sign * dfact / factorial(q);
        }
        break;
    }
    case FunctionalKind::HermiteTruncation: {
        // Standardize the given expansion: drop the mean term, unit variance.
        double var = 0.0, f = 1.0;
        for (std::size_t q = 1; q < spec.hermite_coeffs.size(); ++q) {
            if (q >= 2) f *= q;
            var += spec.hermite_coeffs[q] * spec.hermite_coeffs[q] * f;
        }
        if (var < 1e-14)
            throw std::invalid_argument("hermite_coefficients: functional has zero variance");
        double scale = 1.0 / std::sqrt(var);
        for (std::size_t q = 1; q < spec.hermite_coeffs.size() && q <= static_cast<std::size_t>(Q); ++q)
            exp.c[q] = spec.hermite_coeffs[q] * scale;
        break;
    }
    case FunctionalKind::PointwiseMap: {
        int order = std::max({64, 2 * Q, quad_order});
        GaussHermiteRule rule = gauss_hermite(order);
        // First standardize: mu = E[H], sd = sqrt(Var[H]).
        double mu = 0.0;
        for (int i = 0; i < rule.order(); ++i) mu += rule.weight[i] * spec.map(rule.node[i]);
        double var = 0.0;
        for (int i = 0; i < rule.order(); ++i) {
            double d = spec.map(rule.node[i]) - mu;
            var += rule.weight[i] * d * d;
        }
        if (var < 1e-14)
            throw std::invalid_argument("hermite_coefficients: functional has zero variance");
        double sd = std::sqrt(var);
        for (int q = 1; q <= Q; ++q) {
            double num = 0.0;
            for (int i = 0; i < rule.order(); ++i) {
                double xs = rule.node[i];
                num += rule.weight[i] * (spec.map(xs) - mu) / sd * hermite_he(q, xs);
            }
            exp.c[q] = num / factorial(q);
        }
        break;
    }
    }
    return exp;
}

CovarianceSequence functional_covariance(const HermiteExpansion& exp,
                                         const CovarianceSequence& rho_g) {
    rho_g.validate();
    CovarianceSequence rho;
    rho.rho.resize(rho_g.support() + 1, 0.0);
    rho.rho[0] = 1.0;
    for (int h = 1; h <= rho_g.support(); ++h) {
        double r = rho_g.rho[h], rp = 1.0, s = 0.0, f = 1.0;
        for (int q = 1; q <= exp.order(); ++q) {
            rp *= r;
            if (q >= 2) f *= q;
            s += exp.c[q] * exp.c[q] * f * rp;
        }
        rho.rho[h] = s;
    }
    return rho;
}

SpectralDensity functional_density(const HermiteExpansion& exp,
                                   const SpectralDensity& psi_g, int grid) {
    // Fourier route: rho_g(k) = k-th coefficient of psi_g; the q-fold
    // convolution power of psi_g has coefficients rho_g(k)^q, so the
    // transformed density has coefficients sum_q c_q^2 q! rho_g(k)^q.
    int max_k;
    std::vector<double> rg;
    if (psi_g.coeffs) {
        max_k = psi_g.coeffs->support();
        rg = psi_g.coeffs->rho;
    } else {
        max_k = psi_g.grid_size() / 2 - 1;
        rg = fourier_coefficients(psi_g, max_k);
        while (max_k > 0 && std::abs(rg[max_k]) < 1e-16) {
            rg.pop_back();
            --max_k;
        }
    }
    for (double v : rg)
        if (std::abs(v) > 1.0 + 1e-9)
            throw std::invalid_argument("functional_density: |rho_g(k)| > 1, not a correlation density");

    CovarianceSequence rho_g;
    rho_g.rho = rg;
    rho_g.rho[0] = 1.0;
    return density_from_finite_covariance(functional_covariance(exp, rho_g), grid);
}

CovarianceSequence closed_form_covariance(ClosedFormKind kind) {
    CovarianceSequence rho;
    if (kind == ClosedFormKind::BargmannFock) {
        rho.rho.resize(13);
        for (int k = 0; k <= 12; ++k) rho.rho[k] = std::exp(-0.5 * k * k);
    } else {
        rho.rho.resize(41);
        for (int k = 0; k <= 40; ++k) rho.rho[k] = std::exp(-static_cast<double>(k));
    }
    return rho;
}

SpectralDensity closed_form_density(ClosedFormKind kind, int grid) {
    check_grid(grid);
    SpectralDensity psi;
    psi.value.resize(grid);
    psi.closed_form = kind;
    for (int j = 0; j <= grid / 2; ++j) {
        double xj = -kPi + kTwoPi * static_cast<double>(j) / grid;
        double v = psi.evaluate(xj);
        psi.value[j] = v;
        if (j > 0 && j < grid / 2) psi.value[grid - j] = v;
    }
    return psi;
}

double kappa(const SpectralDensity& psi) {
    const int G = psi.grid_size();
    if (G == 0) throw std::invalid_argument("kappa: empty density");
    double best = psi.min_on_grid();

    const bool analytic = psi.coeffs.has_value();
    for (int j = 0; j < G; ++j) {
        double prev = psi.value[(j + G - 1) % G];
        double next = psi.value[(j + 1) % G];
        if (psi.value[j] <= prev && psi.value[j] <= next) {
            double xj = psi.x(j);
            double refined;
            if (analytic) {
                // One Newton step on psi' using exact derivatives.
                double d1 = 0.0, d2 = 0.0;
                for (int h = 1; h <= psi.coeffs->support(); ++h) {
                    d1 += -2.0 * h * psi.coeffs->rho[h] * std::sin(h * xj);
                    d2 += -2.0 * h * h * psi.coeffs->rho[h] * std::cos(h * xj);
                }
                if (d2 <= 0.0) continue;
                refined = xj - d1 / d2;
            } else {
                // Vertex of the parabola through the three neighboring values.
                double denom = prev - 2.0 * psi.value[j] + next;
                if (denom <= 0.0) continue;
                refined = xj + 0.5 * (prev - next) / denom * (kTwoPi / G);
            }
            if (std::abs(refined - xj) < kTwoPi / G)
                best = std::min(best, psi.evaluate(refined));
        }
    }
    return best;
}

CovarianceSequence truncate_covariance(const CovarianceSequence& rho, int m) {
    rho.validate();
    if (m < 0) throw std::invalid_argument("truncate_covariance: m must be >= 0");
    CovarianceSequence out;
    int keep = std::min(m, rho.support());
    out.rho.assign(rho.rho.begin(), rho.rho.begin() + keep + 1);
    return out;
}

std::vector<double> fourier_coefficients(const SpectralDensity& psi, int max_k) {
    const int G = psi.grid_size();
    if (max_k < 0 || max_k >= G / 2)
        throw std::invalid_argument("fourier_coefficients: need 0 <= max_k < grid/2");
    std::vector<double> rho(max_k + 1, 0.0);
    for (int k = 0; k <= max_k; ++k) {
        double s = 0.0;
        for (int j = 0; j < G; ++j) s += psi.value[j] * std::cos(k * psi.x(j));
        rho[k] = s / G;
    }
    return rho;
}

} // namespace rtp
