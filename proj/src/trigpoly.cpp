#include "rtp/trigpoly.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "rtp/fft.hpp"

namespace rtp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double TrigPolynomial::coeff_norm() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    for (double v : b) s += v * v;
    return std::sqrt(s);
}

void TrigPolynomial::validate() const {
    if (a.size() != b.size())
        throw std::invalid_argument("trigpoly: a and b must have equal length");
    if (a.empty()) throw std::invalid_argument("trigpoly: degree must be >= 1");
    for (double v : a)
        if (!std::isfinite(v)) throw std::invalid_argument("trigpoly: non-finite coefficient");
    for (double v : b)
        if (!std::isfinite(v)) throw std::invalid_argument("trigpoly: non-finite coefficient");
}

std::vector<double> evaluate_on_grid(const TrigPolynomial& p, int npoints) {
    p.validate();
    const int n = p.degree();
    if (npoints < 2 * n + 2 || (npoints & (npoints - 1)) != 0)
        throw std::invalid_argument("evaluate_on_grid: npoints must be a power of two >= 2n+2");

    // Spectrum of the real signal: F_k = (a_k - i b_k)/2, F_{N-k} = conj(F_k).
    std::vector<std::complex<double>> spec(npoints, {0.0, 0.0});
    for (int k = 1; k <= n; ++k) {
        std::complex<double> c(0.5 * p.a[k - 1], -0.5 * p.b[k - 1]);
        spec[k] = c;
        spec[npoints - k] = std::conj(c);
    }
    fft_inverse_unscaled(spec);
    std::vector<double> out(npoints);
    for (int j = 0; j < npoints; ++j) out[j] = spec[j].real();
    return out;
}

double evaluate_at(const TrigPolynomial& p, double t) {
    const int n = p.degree();
    // Clenshaw for both series at once:
    //   y_k = 2 cos(t) y_{k+1} - y_{k+2} + c_k,
    //   sum c_k cos(kt) (k>=1) = y_1 cos t - y_2,  sum c_k sin(kt) = y_1 sin t.
    const double ct = std::cos(t), st = std::sin(t), two_ct = 2.0 * ct;
    double ya1 = 0.0, ya2 = 0.0, yb1 = 0.0, yb2 = 0.0;
    for (int k = n; k >= 1; --k) {
        double ya0 = two_ct * ya1 - ya2 + p.a[k - 1];
        double yb0 = two_ct * yb1 - yb2 + p.b[k - 1];
        ya2 = ya1; ya1 = ya0;
        yb2 = yb1; yb1 = yb0;
    }
    return (ya1 * ct - ya2) + yb1 * st;
}

TrigPolynomial derivative(const TrigPolynomial& p) {
    p.validate();
    TrigPolynomial d;
    const int n = p.degree();
    d.a.resize(n);
    d.b.resize(n);
    for (int k = 1; k <= n; ++k) {
        d.a[k - 1] = k * p.b[k - 1];
        d.b[k - 1] = -k * p.a[k - 1];
    }
    return d;
}

double LocalField::operator()(double t) const {
    return evaluate_at(rotated, t / n) / std::sqrt(static_cast<double>(n));
}

double LocalField::derivative_at(double t) const {
    // g'(s) with s = t/n, chain rule brings another 1/n.
    const double s = t / n;
    const double ct = std::cos(s), st = std::sin(s), two_ct = 2.0 * ct;
    double ya1 = 0.0, ya2 = 0.0, yb1 = 0.0, yb2 = 0.0;
    for (int k = n; k >= 1; --k) {
        double ya0 = two_ct * ya1 - ya2 + k * rotated.b[k - 1];
        double yb0 = two_ct * yb1 - yb2 - k * rotated.a[k - 1];
        ya2 = ya1; ya1 = ya0;
        yb2 = yb1; yb1 = yb0;
    }
    double gp = (ya1 * ct - ya2) + yb1 * st;
    return gp / (n * std::sqrt(static_cast<double>(n)));
}

LocalField local_field(const TrigPolynomial& p, double X) {
    p.validate();
    if (!std::isfinite(X) || X < 0.0 || X >= kTwoPi)
        throw std::invalid_argument("local_field: X must lie in [0, 2pi)");
    LocalField S;
    S.n = p.degree();
    S.X = X;
    S.rotated.a.resize(S.n);
    S.rotated.b.resize(S.n);
    for (int k = 1; k <= S.n; ++k) {
        double ck = std::cos(k * X), sk = std::sin(k * X);
        S.rotated.a[k - 1] = p.a[k - 1] * ck + p.b[k - 1] * sk;
        S.rotated.b[k - 1] = p.b[k - 1] * ck - p.a[k - 1] * sk;
    }
    return S;
}

double sobolev_norm_sq(const TrigPolynomial& p, int ell) {
    p.validate();
    if (ell < 0) throw std::invalid_argument("sobolev_norm_sq: ell must be >= 0");
    const int n = p.degree();
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
        double ratio = static_cast<double>(k) / n;
        double w = 1.0;
        for (int i = 0; i < 2 * ell; ++i) w *= ratio;
        s += w * (p.a[k - 1] * p.a[k - 1] + p.b[k - 1] * p.b[k - 1]);
    }
    return s / (2.0 * n);
}

} // namespace rtp
