#pragma once

#include <cstddef>
#include <vector>

namespace skelcalc {

/// Gauss rule: nodes and weights.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Hermite rule for the weight exp(-x^2), by Newton iteration
/// on the orthonormal Hermite recurrence.
QuadratureRule gauss_hermite(std::size_t n);

/// Shared 64-point rule.
const QuadratureRule& gauss_hermite_64();

/// E[phi(mean + sd Z)], Z standard normal, by the 64-point rule.
template <class Fn>
double gaussian_expectation(Fn&& phi, double mean, double sd) {
    const auto& rule = gauss_hermite_64();
    constexpr double kSqrt2 = 1.4142135623730950488;
    constexpr double kInvSqrtPi = 0.56418958354775628695;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * phi(mean + sd * kSqrt2 * rule.nodes[i]);
    return s * kInvSqrtPi;
}

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

}  // namespace skelcalc
