#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "skelcalc/first_exit.hpp"

namespace skelcalc {

/// Renewal density u of the tau-renewal process on the level-0 time scale,
/// u = p + p * u with p the density of tau, and its running integral
/// (the renewal function). Level k follows by rescaling time by 4^k:
///
///   h^k(t) = u(4^k t),   <A^k, A^k>_t = 4^-k U(4^k t).
///
/// Beyond the grid end u is continued by its limit 1/E tau = 1 and U by
/// U(s_max) + (s - s_max); |u - 1| decays like exp(-2 pi^2 s), so the
/// continuation is exact to double precision for any s_max >= 20.
class IntensityTable {
public:
    IntensityTable(double ds, std::vector<double> u);

    double step() const noexcept { return ds_; }
    double s_max() const noexcept { return ds_ * static_cast<double>(u_.size() - 1); }
    const std::vector<double>& u_values() const noexcept { return u_; }
    const std::vector<double>& cumulative_values() const noexcept { return cum_; }

    /// u(s), linear interpolation.
    double u(double s) const;
    /// Integral of the interpolated u over [0, s] (exact for the interpolant).
    double cumulative(double s) const;

    /// h^k(t).
    double h(int k, double t) const;
    /// <A^k, A^k>_t.
    double angle_bracket(int k, double t) const;
    /// int_a^b h^k(s) ds.
    double angle_increment(int k, double a, double b) const { return angle_bracket(k, b) - angle_bracket(k, a); }

    /// CSV `s,u,cumulative`, every stride-th grid point.
    void write_csv(std::ostream& out, std::size_t stride = 1) const;

private:
    double ds_;
    std::vector<double> u_;
    std::vector<double> cum_;
};

/// Forward trapezoid solve of the renewal equation on [0, s_max]:
///   u_i = p_i + ds * sum_{j=1}^{i-1} p_{i-j} u_j,   p_0 = u_0 = 0.
/// Requires s_max >= 20 and 0 < ds <= 1e-3.
IntensityTable solve_renewal_density(const FirstExitLaw& law, double s_max = 50.0, double ds = 5e-4);

/// Table for the default law and grid, computed once per process.
const IntensityTable& default_intensity_table();

}  // namespace skelcalc
