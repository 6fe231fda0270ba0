#pragma once

#include <vector>

#include "skelcalc/projection.hpp"

namespace skelcalc {

/// D^k F on [T_n, T_{n+1}): (E[F|G^k_n] - E[F|G^k_{n-1}]) / (A_{T_n} - A_{T_{n-1}}) * h^k,
/// zero before T_1. Needs a closed-form conditional expectation
/// (martingale-terminal or first-passage); other kinds raise UsageError.
WeightedDerivative clark_ocone_density(const Functional& f, const Skeleton& sk, const IntensityTable& table);

struct DensityPoint {
    double t = 0.0;
    Estimate density;
    /// Oracle integrand evaluated at B_t on the same paths (grid engine and
    /// an oracle given).
    Estimate oracle;
    /// Paired density - oracle.
    Estimate difference;
};

/// Ensemble mean of D^k F at the reporting times.
std::vector<DensityPoint> density_curve(const Functional& f, int k, const std::vector<double>& times,
                                        const SimulationOptions& opt, const IntensityTable& table,
                                        const std::function<double(double)>& oracle = nullptr);

struct ResidualReport {
    int k = 0;
    /// Var(R) / Var(F), R = F - mean(F) - sum_i D(t_i) (B_{t_{i+1}} - B_{t_i}).
    Estimate variance_ratio;
    /// Mean of the stochastic-integral term.
    Estimate integral_mean;
    Estimate f_mean;
};

/// Grid engine: the skeleton is extracted from each grid path and the density
/// is integrated against that path's increments.
ResidualReport representation_residual(const Functional& f, int k, const SimulationOptions& opt,
                                       const IntensityTable& table);

/// Var(a)/Var(b)-type ratio mean(x)/mean(y) with delta-method standard error.
Estimate ratio_estimate(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace skelcalc
