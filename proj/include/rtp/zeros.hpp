#pragma once
// Real zero counting on half-open intervals [lo, hi).
//
// Strategy: dense grid, strict sign changes, bisection refinement.  Cells
// whose values dip under abs_tol without changing sign are subdivided once
// and, if still ambiguous, reported as suspicious rather than guessed.

#include <functional>
#include <vector>

#include "rtp/trigpoly.hpp"

namespace rtp {

struct ZeroCountOptions {
    int oversample = 16;    // grid points per degree unit
    double abs_tol = -1.0;  // < 0: auto = 1e-9 * (1 + coefficient l2 norm)
    bool refine = true;     // bisect bracketing cells down to width 1e-12
};

struct ZeroCountResult {
    int count = 0;
    std::vector<double> roots;  // sorted; empty when refine == false
    int suspicious_cells = 0;   // near-zero cells that never bracketed
    int oversample = 0;
    int grid_points = 0;
};

// Zeros of p on [lo, hi) with 0 <= lo < hi <= 2pi.  The full circle goes
// through one FFT synthesis; sub-intervals sample pointwise.
ZeroCountResult count_zeros(const TrigPolynomial& p, double lo, double hi,
                            const ZeroCountOptions& opt = {});
inline ZeroCountResult count_zeros(const TrigPolynomial& p,
                                   const ZeroCountOptions& opt = {}) {
    return count_zeros(p, 0.0, 6.283185307179586476925286766559, opt);
}

// Generic scalar field on [lo, hi); degree_hint sizes the grid as
// max(oversample * degree_hint, 1024).
ZeroCountResult count_zeros_fn(const std::function<double(double)>& f, double lo,
                               double hi, int degree_hint, double abs_tol,
                               const ZeroCountOptions& opt = {});

// Zeros of the local window S over [0, 2pi).  S has effective degree 1 in t,
// so the base grid of max(1024, 64 * oversample) points is already a heavy
// oversampling; abs_tol derives from the rotated coefficient norm / sqrt(n).
ZeroCountResult count_zeros_local(const LocalField& S, const ZeroCountOptions& opt = {});

// Exact small-ball probability P(|S(t)| <= delta) for i.i.d. sign
// coefficients, S(t) = n^{-1/2} sum_k a_k cos(k X + k t / n) + b_k sin(...),
// by full enumeration of the 4^n sign vectors (split into the 2^n cosine and
// 2^n sine halves, counted by two-pointer sweep).  Requires n <= 12.
double rademacher_smallball_exact(int n, double X, double t, double delta);

} // namespace rtp
