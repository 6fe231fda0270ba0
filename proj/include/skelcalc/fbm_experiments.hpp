#pragma once

#include <functional>
#include <vector>

#include "skelcalc/projection.hpp"

namespace skelcalc {

/// Per-level statistics of f(B^H) sampled at the skeleton stopping times of
/// the driving Brownian path. The conditional projection of f(B^H) has no
/// closed form, so f(B^H_{T_n}) stands in for it.
struct FbmLevel {
    int k = 0;
    /// sum_n (f(B^H_{T_n}) - f(B^H_{T_{n-1}}))^2 over T_n <= T.
    Estimate e2_raw;
    /// Paired e2_raw(k) - e2_raw(k + 1); n = 0 on the last level.
    Estimate e2_decrease;
    /// sup_t |f(B^H_t) - f(B^H at the last stopping time <= t)|.
    Estimate projection_gap;
    /// Paired projection_gap(k) - projection_gap(k + 1).
    Estimate gap_decrease;
    /// sum_n (f(B^H_{T_n}) - f(B^H_{T_{n-1}})) (A_{T_n} - A_{T_{n-1}}): mean
    /// and second moment.
    Estimate martingale_mean;
    Estimate martingale_second_moment;
};

/// One pass over the ensemble computing every column. Grid engine is forced;
/// H outside (1/2, 1) raises std::domain_error.
std::vector<FbmLevel> fbm_scan(const std::function<double(double)>& f, double hurst, int k_min, int k_max,
                               const SimulationOptions& opt);

/// Energy columns only (k, e2_raw, e2_decrease).
std::vector<FbmLevel> fbm_energy_scan(const std::function<double(double)>& f, double hurst, int k_min, int k_max,
                                      const SimulationOptions& opt);

/// Projection-gap columns only.
std::vector<FbmLevel> fbm_projection_convergence(const std::function<double(double)>& f, double hurst, int k_min,
                                                 int k_max, const SimulationOptions& opt);

}  // namespace skelcalc
