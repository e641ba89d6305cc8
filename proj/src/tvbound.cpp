#include "rtp/tvbound.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace rtp {
namespace {

constexpr int kMaxDenseN = 4096; // dense eigenanalysis budget

// Eigenvalue extremes of a symmetric matrix, values only.
std::pair<double, double> symmetric_extremes(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("tv_upper_bound: eigenvalue computation failed");
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

[[noreturn]] void conditioning_error(double min_eig, double kappa_floor) {
    char buf[192];
    if (kappa_floor >= 0.0) {
        std::snprintf(buf, sizeof buf,
                      "tv_upper_bound: covariance numerically singular "
                      "(min eigenvalue %.6g, spectral floor %.6g)",
                      min_eig, kappa_floor);
    } else {
        std::snprintf(buf, sizeof buf,
                      "tv_upper_bound: covariance numerically singular "
                      "(min eigenvalue %.6g, spectral floor unknown)",
                      min_eig);
    }
    throw std::runtime_error(buf);
}

// l2 norm of eigenvalues of Sigma^{-1} Sigma~ - Id via the whitened pencil.
double pencil_bound(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& truncated) {
    const Eigen::MatrixXd half = llt.matrixL().solve(truncated);
    const Eigen::MatrixXd w = llt.matrixL().solve(half.transpose()); // L^{-1} Sigma~ L^{-T}
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("tv_upper_bound: eigenvalue computation failed");
    double ss = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double l = es.eigenvalues()(i) - 1.0;
        ss += l * l;
    }
    return 1.5 * std::min(1.0, std::sqrt(ss));
}

} // namespace

void ToeplitzPair::validate() const {
    const auto n = full.rows();
    if (n < 1 || full.cols() != n || truncated.rows() != n || truncated.cols() != n)
        throw std::invalid_argument("ToeplitzPair: matrices must be square and equal size");
    if (n > kMaxDenseN)
        throw std::invalid_argument("ToeplitzPair: n exceeds the dense cap 4096");
    if ((full - full.transpose()).lpNorm<Eigen::Infinity>() > 1e-12 ||
        (truncated - truncated.transpose()).lpNorm<Eigen::Infinity>() > 1e-12)
        throw std::invalid_argument("ToeplitzPair: matrices must be symmetric");
}

Eigen::MatrixXd toeplitz_from_covariance(const CovarianceSequence& rho, int n) {
    rho.validate();
    if (n < 1 || n > kMaxDenseN)
        throw std::invalid_argument("toeplitz_from_covariance: need 1 <= n <= 4096");
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s(i, j) = rho.at(std::abs(i - j));
    return s;
}

ToeplitzPair toeplitz_pair(const CovarianceSequence& rho_g, int n, int m) {
    if (m < 0) throw std::invalid_argument("toeplitz_pair: m must be >= 0");
    ToeplitzPair pair;
    pair.full = toeplitz_from_covariance(rho_g, n);
    pair.truncated = toeplitz_from_covariance(truncate_covariance(rho_g, m), n);
    pair.kappa_floor = kappa(density_from_finite_covariance(rho_g));
    return pair;
}

double tv_upper_bound(const ToeplitzPair& pair) {
    pair.validate();
    if ((pair.full - pair.truncated).lpNorm<Eigen::Infinity>() == 0.0) return 0.0;

    auto [lmin, lmax] = symmetric_extremes(pair.full);
    if (lmin <= 0.0 || lmax >= 1e12 * lmin) conditioning_error(lmin, pair.kappa_floor);

    Eigen::LLT<Eigen::MatrixXd> llt(pair.full);
    if (llt.info() != Eigen::Success) conditioning_error(lmin, pair.kappa_floor);
    return pencil_bound(llt, pair.truncated);
}

std::vector<TruncationRow> truncation_sweep(const CovarianceSequence& rho_g, int n,
                                            const std::vector<int>& m_list) {
    if (m_list.empty()) throw std::invalid_argument("truncation_sweep: empty m list");
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        if (m_list[i] < 0) throw std::invalid_argument("truncation_sweep: m must be >= 0");
        if (i > 0 && m_list[i] < m_list[i - 1])
            throw std::invalid_argument("truncation_sweep: m list must be ascending");
    }

    const double kappa_full = kappa(density_from_finite_covariance(rho_g));
    if (kappa_full <= 0.0)
        throw std::invalid_argument(
            "truncation_sweep: generating density has no positive spectral floor");

    const Eigen::MatrixXd full = toeplitz_from_covariance(rho_g, n);
    auto [lmin, lmax] = symmetric_extremes(full);
    if (lmin <= 0.0 || lmax >= 1e12 * lmin) conditioning_error(lmin, kappa_full);
    Eigen::LLT<Eigen::MatrixXd> llt(full);
    if (llt.info() != Eigen::Success) conditioning_error(lmin, kappa_full);

    const int support = rho_g.support();
    std::vector<TruncationRow> rows;
    rows.reserve(m_list.size());
    for (int m : m_list) {
        TruncationRow row;
        row.m = m;

        double tail_sq = 0.0;
        for (int k = m + 1; k <= support; ++k) tail_sq += rho_g.at(k) * rho_g.at(k);
        row.trace_bound = 1.5 * std::min(1.0, std::sqrt(tail_sq * n * n /
                                                        (kappa_full * kappa_full)));

        const CovarianceSequence trunc = truncate_covariance(rho_g, m);
        row.kappa_trunc = kappa(density_from_finite_covariance(trunc));
        row.valid = row.kappa_trunc > 0.0;

        if (m >= support) {
            row.tv_bound = 0.0; // truncation is a no-op, Sigma~ == Sigma
        } else {
            row.tv_bound = pencil_bound(llt, toeplitz_from_covariance(trunc, n));
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace rtp
