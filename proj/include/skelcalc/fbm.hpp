#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "skelcalc/grid_path.hpp"

namespace skelcalc {

/// Volterra kernel of fractional Brownian motion, H in (1/2, 1):
///
///   K(t, s) = c s^{1/2-H} int_s^t (u - s)^{H-3/2} u^{H-1/2} du.
///
/// With a = H - 1/2 and u = s + v^{1/a} the inner integral becomes
/// (1/a) int_0^{(t-s)^a} (s + v^{1/a})^a dv, and scaling v by s^a gives
///
///   K(t, s) = (c / a) s^a G(((t - s) / s)^a),   G(x) = int_0^x (1 + w^{1/a})^a dw,
///
/// with a smooth integrand. G is tabulated once (64-point Gauss-Legendre per
/// cell, cubic Hermite with the exact derivative in between). On a grid
/// t_i = i dt the kernel is sampled at the cell midpoints s_j = (j + 1/2) dt
/// and the lower triangle K(t_i, s_j), j < i, is cached.
class VolterraKernel {
public:
    VolterraKernel(double hurst, double dt, std::size_t steps);

    double hurst() const noexcept { return hurst_; }
    double dt() const noexcept { return dt_; }
    std::size_t steps() const noexcept { return steps_; }
    /// c, fixed so that the discretized variance at t = 1 is exactly 1.
    double constant() const noexcept { return c_; }

    /// K(t, s) for 0 < s < t, using the same constant.
    double operator()(double t, double s) const;
    /// Cached K(t_i, s_j), 0 <= j < i <= steps.
    double cached(std::size_t i, std::size_t j) const noexcept { return tri_[i * (i - 1) / 2 + j]; }

    /// B^H_{t_i} = sum_{j<i} K(t_i, s_j) (B_{t_{j+1}} - B_{t_j}); result
    /// starts at 0.
    GridPath apply(const GridPath& brownian) const;

    /// G(x) from the table.
    double G(double x) const;

private:
    double kernel_unit(double t, double s) const;  // c = 1

    double hurst_;
    double a_;
    double dt_;
    std::size_t steps_;
    double c_ = 1.0;
    double x_step_ = 0.0;
    std::vector<double> g_;   // G at table nodes
    std::vector<double> dg_;  // G' at table nodes
    std::vector<double> tri_;
};

/// Shared kernel for (H, dt, steps), built on first use.
std::shared_ptr<const VolterraKernel> volterra_kernel(double hurst, double dt, std::size_t steps);

/// fBm on the grid of `path` driven by its increments; H in (1/2, 1).
GridPath build_fbm(const GridPath& path, double hurst);

}  // namespace skelcalc
