#pragma once
// Gauss-Hermite quadrature against the standard normal weight.
//
// Nodes/weights come from the Golub-Welsch eigenvalue method on the
// (physicists') Hermite recurrence and are rescaled so that
//     E[f(N)] ~= sum_i weight[i] * f(node[i]),   N ~ N(0,1).
// Exact for polynomials of degree <= 2*order - 1.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace rtp {

struct GaussHermiteRule {
    std::vector<double> node;
    std::vector<double> weight;
    int order() const { return static_cast<int>(node.size()); }
};

inline GaussHermiteRule gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    // Jacobi matrix for physicists' Hermite: off-diagonal sqrt(k/2).
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        double off = std::sqrt(0.5 * k);
        J(k, k - 1) = off;
        J(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_hermite: eigen decomposition failed");

    GaussHermiteRule rule;
    rule.node.resize(order);
    rule.weight.resize(order);
    const double sqrt2 = std::sqrt(2.0);
    for (int i = 0; i < order; ++i) {
        // Physicists' weight sqrt(pi)*v0^2; dividing by sqrt(pi) and mapping
        // x -> sqrt(2) x turns the rule into an expectation against N(0,1).
        rule.node[i] = es.eigenvalues()(i) * sqrt2;
        double v0 = es.eigenvectors()(0, i);
        rule.weight[i] = v0 * v0;
    }
    return rule;
}

inline double normal_expectation(const std::function<double(double)>& f, int order) {
    GaussHermiteRule rule = gauss_hermite(order);
    double acc = 0.0;
    for (int i = 0; i < rule.order(); ++i) acc += rule.weight[i] * f(rule.node[i]);
    return acc;
}

} // namespace rtp
