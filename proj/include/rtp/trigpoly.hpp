#pragma once
// Trigonometric polynomials f(t) = sum_{k=1..n} a_k cos(kt) + b_k sin(kt)
// and the rescaled local window S(t) = f(X + t/n) / sqrt(n).

#include <vector>

namespace rtp {

struct TrigPolynomial {
    std::vector<double> a; // a[k-1] multiplies cos(kt)
    std::vector<double> b; // b[k-1] multiplies sin(kt)

    int degree() const { return static_cast<int>(a.size()); }
    double coeff_norm() const; // l2 norm of (a, b)
    void validate() const;
};

// Values f(2pi j / N) for j = 0..N-1 via one inverse FFT.  N must be a power
// of two with N >= 2n + 2 (no aliasing of the +-k lines).
std::vector<double> evaluate_on_grid(const TrigPolynomial& p, int npoints);

// Clenshaw recurrence; O(n) per point, stable for |t| in [0, 2pi].
double evaluate_at(const TrigPolynomial& p, double t);

// Coefficient map of d/dt: (a_k, b_k) -> (k b_k, -k a_k).
TrigPolynomial derivative(const TrigPolynomial& p);

// S(t) = f(X + t/n)/sqrt(n) realized by the angle-addition rewrite: the
// rotated polynomial g with coefficients
//     (a_k cos kX + b_k sin kX,  b_k cos kX - a_k sin kX)
// satisfies g(s) = f(X + s), so S(t) = g(t/n)/sqrt(n).  Rotation preserves
// a_k^2 + b_k^2 per mode.
struct LocalField {
    TrigPolynomial rotated;
    int n = 0;
    double X = 0.0;

    double operator()(double t) const;
    double derivative_at(double t) const; // S'(t) = g'(t/n) / (n sqrt n)
};

LocalField local_field(const TrigPolynomial& p, double X);

// E_X || S^(ell) ||_{L2(dt/2pi)}^2 = (1/2n) sum_k (k/n)^{2 ell} (a_k^2 + b_k^2).
// (Exact: substituting u = X + t/n turns the window average over uniform X
// into the full-circle average of f^(ell) squared.)
double sobolev_norm_sq(const TrigPolynomial& p, int ell);

} // namespace rtp
