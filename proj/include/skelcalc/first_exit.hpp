#pragma once

#include <cstddef>
#include <vector>

#include "skelcalc/random_stream.hpp"

namespace skelcalc {

struct FirstExitOptions {
    /// Relative truncation tolerance of both series.
    double series_tolerance = 1e-12;
    /// Below this time the method-of-images series is used, above it the
    /// eigenfunction series.
    double crossover_time = 0.5;
    /// Number of nodes of the quantile table used by sample().
    std::size_t table_points = 4096;
};

/// Law of tau = inf{t > 0 : |B_t| = 1} for a standard Brownian motion
/// started at 0.
///
/// Two series are available, both obtained from the Laplace transform
/// 1/cosh(sqrt(2 lambda)):
///
///   eigenfunction:    P(tau > t) = 4/pi sum_n (-1)^n/(2n+1) exp(-(2n+1)^2 pi^2 t / 8)
///   method of images: P(tau <= t) = 4 sum_n (-1)^n Phibar((2n+1)/sqrt(t))
///
/// Each converges in a handful of terms on its own side of crossover_time.
/// The object is immutable after construction and can be shared by workers.
class FirstExitLaw {
public:
    explicit FirstExitLaw(FirstExitOptions options = {});

    /// P(tau > t). Throws std::domain_error for negative or non-finite t.
    double survival(double t) const;
    /// P(tau <= t), evaluated without cancellation for small t.
    double cdf(double t) const;
    /// Density of tau; requires t > 0.
    double density(double t) const;

    /// Series evaluated on a fixed side regardless of the crossover.
    double survival_eigen(double t) const;
    double survival_images(double t) const;
    double density_eigen(double t) const;
    double density_images(double t) const;

    /// Solves cdf(t) = p by safeguarded Newton iteration; p in (0, 1).
    double quantile(double p) const;

    /// Inverse-CDF draw through the quantile table (cubic Hermite in the
    /// bulk, closed-form inversion in both tails).
    double sample(RandomStream& rng) const { return quantile_fast(rng.uniform_open()); }
    double quantile_fast(double u) const;

    const FirstExitOptions& options() const noexcept { return options_; }

    /// Probability range covered by the interpolation table; outside it the
    /// tail inversions are used.
    double table_lower() const noexcept { return table_lo_; }
    double table_upper() const noexcept { return table_hi_; }

private:
    FirstExitOptions options_;
    double table_lo_ = 0.0;
    double table_hi_ = 1.0;
    double table_step_ = 0.0;
    std::vector<double> table_time_;
    std::vector<double> table_slope_;  // dt/du = 1/density
};

/// Law with default options, built once per process.
const FirstExitLaw& default_first_exit_law();

}  // namespace skelcalc
