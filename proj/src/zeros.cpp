#include "rtp/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rtp/fft.hpp"

namespace rtp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kWidthTol = 1e-12;
constexpr int kMaxBisect = 40;
constexpr int kSubdivide = 8;

using Field = std::function<double(double)>;

double bisect(const Field& f, double la, double lb, double fa) {
    // Precondition: f(la) * f(lb) < 0 strictly, fa = f(la).
    for (int it = 0; it < kMaxBisect && (lb - la) > kWidthTol; ++it) {
        double mid = 0.5 * (la + lb);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fa < 0.0) != (fm < 0.0)) {
            lb = mid;
        } else {
            la = mid;
            fa = fm;
        }
    }
    // Return the endpoint with the smaller residual.
    return std::abs(f(la)) <= std::abs(f(lb)) ? la : lb;
}

// Counting core over precomputed grid values.  pts has G+1 entries covering
// [lo, hi]; the final point is exclusive (its exact zero is not counted).
ZeroCountResult count_on_grid(const Field& f, const std::vector<double>& pts,
                              const std::vector<double>& vals, double abs_tol,
                              bool refine) {
    ZeroCountResult res;
    const int G = static_cast<int>(pts.size()) - 1;
    res.grid_points = G;

    auto emit_root = [&](double r) {
        ++res.count;
        if (refine) res.roots.push_back(r);
    };

    auto handle_bracket = [&](double la, double lb, double fa, double fb) {
        // Guard against evaluator disagreement between the synthesis grid and
        // the refinement evaluator: re-check the bracket with f itself.
        if (fa == 0.0) { emit_root(la); return; }
        if (fb == 0.0) return; // owned by the next cell
        if ((fa < 0.0) == (fb < 0.0)) return;
        emit_root(refine ? bisect(f, la, lb, fa) : 0.5 * (la + lb));
    };

    for (int j = 0; j < G; ++j) {
        const double fa = vals[j], fb = vals[j + 1];
        if (fa == 0.0) {
            emit_root(pts[j]);
            continue;
        }
        if (fb != 0.0 && (fa < 0.0) != (fb < 0.0)) {
            handle_bracket(pts[j], pts[j + 1], f(pts[j]), f(pts[j + 1]));
            continue;
        }
        // No strict sign change.  A value under abs_tol may hide a tangency:
        // subdivide once and re-examine before declaring the cell suspicious.
        if (std::min(std::abs(fa), std::abs(fb)) < abs_tol && fb != 0.0) {
            double sa = f(pts[j]);
            double prev_t = pts[j], prev_v = sa;
            bool found = false, still_small = std::abs(sa) < abs_tol;
            for (int s = 1; s <= kSubdivide; ++s) {
                double tt = pts[j] + (pts[j + 1] - pts[j]) * s / kSubdivide;
                double vv = (s == kSubdivide) ? f(pts[j + 1]) : f(tt);
                if (prev_v == 0.0) {
                    emit_root(prev_t);
                    found = true;
                } else if (vv != 0.0 && (prev_v < 0.0) != (vv < 0.0)) {
                    emit_root(refine ? bisect(f, prev_t, tt, prev_v) : 0.5 * (prev_t + tt));
                    found = true;
                }
                if (s < kSubdivide && std::abs(vv) < abs_tol) still_small = true;
                prev_t = tt;
                prev_v = vv;
            }
            if (!found && still_small) ++res.suspicious_cells;
        }
    }
    std::sort(res.roots.begin(), res.roots.end());
    return res;
}

} // namespace

ZeroCountResult count_zeros(const TrigPolynomial& p, double lo, double hi,
                            const ZeroCountOptions& opt) {
    p.validate();
    if (!(lo >= 0.0 && lo < hi && hi <= kTwoPi + 1e-15))
        throw std::invalid_argument("count_zeros: need 0 <= lo < hi <= 2pi");
    if (opt.oversample < 1) throw std::invalid_argument("count_zeros: oversample must be >= 1");

    const int n = p.degree();
    const double abs_tol =
        opt.abs_tol >= 0.0 ? opt.abs_tol : 1e-9 * (1.0 + p.coeff_norm());
    Field f = [&p](double t) { return evaluate_at(p, t); };

    const bool full_circle = lo == 0.0 && std::abs(hi - kTwoPi) < 1e-15;
    if (full_circle) {
        const std::size_t G = next_pow2(std::max<std::size_t>(
            {static_cast<std::size_t>(opt.oversample) * n, 1024, 2 * static_cast<std::size_t>(n) + 2}));
        std::vector<double> vals = evaluate_on_grid(p, static_cast<int>(G));
        std::vector<double> pts(G + 1);
        for (std::size_t j = 0; j <= G; ++j) pts[j] = kTwoPi * j / static_cast<double>(G);
        vals.push_back(vals[0]); // periodic wrap; pts[G] = 2pi is exclusive
        ZeroCountResult res = count_on_grid(f, pts, vals, abs_tol, opt.refine);
        res.oversample = opt.oversample;
        return res;
    }

    const int G = std::max(opt.oversample * n, 1024);
    std::vector<double> pts(G + 1), vals(G + 1);
    for (int j = 0; j <= G; ++j) {
        pts[j] = lo + (hi - lo) * j / G;
        vals[j] = f(pts[j]);
    }
    ZeroCountResult res = count_on_grid(f, pts, vals, abs_tol, opt.refine);
    res.oversample = opt.oversample;
    return res;
}

ZeroCountResult count_zeros_fn(const Field& f, double lo, double hi, int degree_hint,
                               double abs_tol, const ZeroCountOptions& opt) {
    if (!(lo < hi)) throw std::invalid_argument("count_zeros_fn: need lo < hi");
    if (abs_tol < 0.0) throw std::invalid_argument("count_zeros_fn: abs_tol must be >= 0");
    const int G = std::max(opt.oversample * std::max(degree_hint, 1), 1024);
    std::vector<double> pts(G + 1), vals(G + 1);
    for (int j = 0; j <= G; ++j) {
        pts[j] = lo + (hi - lo) * j / G;
        vals[j] = f(pts[j]);
    }
    ZeroCountResult res = count_on_grid(f, pts, vals, abs_tol, opt.refine);
    res.oversample = opt.oversample;
    return res;
}

ZeroCountResult count_zeros_local(const LocalField& S, const ZeroCountOptions& opt) {
    // The window covers frequencies k/n <= 1, so 1024 base points oversample
    // the effective degree by three orders of magnitude.
    const double abs_tol =
        opt.abs_tol >= 0.0
            ? opt.abs_tol
            : 1e-9 * (1.0 + S.rotated.coeff_norm() / std::sqrt(static_cast<double>(S.n)));
    ZeroCountOptions o = opt;
    o.abs_tol = abs_tol;
    return count_zeros_fn([&S](double t) { return S(t); }, 0.0, kTwoPi, 64, abs_tol, o);
}

double rademacher_smallball_exact(int n, double X, double t, double delta) {
    if (n < 1 || n > 12)
        throw std::invalid_argument("rademacher_smallball_exact: need 1 <= n <= 12");
    if (delta < 0.0) throw std::invalid_argument("rademacher_smallball_exact: delta must be >= 0");

    std::vector<double> c(n), s(n);
    for (int k = 1; k <= n; ++k) {
        double ang = k * X + k * t / n;
        c[k - 1] = std::cos(ang);
        s[k - 1] = std::sin(ang);
    }
    const std::size_t m = std::size_t(1) << n;
    std::vector<double> A(m, 0.0), B(m, 0.0);
    for (std::size_t mask = 0; mask < m; ++mask) {
        double sa = 0.0, sb = 0.0;
        for (int k = 0; k < n; ++k) {
            double sg = (mask >> k) & 1 ? 1.0 : -1.0;
            sa += sg * c[k];
            sb += sg * s[k];
        }
        A[mask] = sa;
        B[mask] = sb;
    }
    std::sort(B.begin(), B.end());
    const double tau = delta * std::sqrt(static_cast<double>(n));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < m; ++i) {
        auto lob = std::lower_bound(B.begin(), B.end(), -tau - A[i]);
        auto hib = std::upper_bound(B.begin(), B.end(), tau - A[i]);
        hits += static_cast<std::size_t>(hib - lob);
    }
    return static_cast<double>(hits) / (static_cast<double>(m) * static_cast<double>(m));
}

} // namespace rtp
