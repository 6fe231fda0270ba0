#include "skelcalc/fbm_experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skelcalc/fbm.hpp"
#include "skelcalc/parallel.hpp"

namespace skelcalc {
namespace {

enum Column : std::size_t { kEnergy, kGap, kMart, kColumns };

std::vector<double> level_stats(const std::function<double(double)>& f, const Skeleton& sk, const GridPath& bh) {
    std::vector<double> out(kColumns, 0.0);
    double f_anchor = f(bh.values[0]);
    double gap = 0.0;
    std::size_t n = 1;
    const std::size_t last = bh.index_at(sk.horizon());
    for (std::size_t i = 1; i <= last; ++i) {
        const double fi = f(bh.values[i]);
        if (n <= sk.jump_count() && bh.index_at(sk.time(n)) == i) {
            const double d = fi - f_anchor;
            out[kEnergy] += d * d;
            out[kMart] += d * (sk.value(n) - sk.value(n - 1));
            f_anchor = fi;
            ++n;
        }
        gap = std::max(gap, std::abs(fi - f_anchor));
    }
    out[kGap] = gap;
    return out;
}

}  // namespace

std::vector<FbmLevel> fbm_scan(const std::function<double(double)>& f, double hurst, int k_min, int k_max,
                               const SimulationOptions& opt) {
    if (!(hurst > 0.5 && hurst < 1.0)) throw std::domain_error("fbm_scan: H must lie in (1/2, 1)");
    if (k_min > k_max) throw UsageError("fbm_scan: k_min > k_max");
    SimulationOptions o = opt;
    o.engine = Engine::Grid;
    // Build the shared kernel before the workers start.
    const auto steps = static_cast<std::size_t>(std::llround(o.horizon / o.grid_dt));
    const auto kernel = volterra_kernel(hurst, o.grid_dt, steps);
    const auto levels = static_cast<std::size_t>(k_max - k_min + 1);
    auto per_path = map_paths<std::vector<double>>(o.n_paths, o.workers, [&](std::size_t p) {
        const auto s = sample_path(o, k_min, k_max, p, 13);
        const auto bh = kernel->apply(s.path);
        std::vector<double> out;
        out.reserve(levels * kColumns);
        for (const auto& sk : s.levels) {
            const auto v = level_stats(f, sk, bh);
            out.insert(out.end(), v.begin(), v.end());
        }
        return out;
    });
    auto column = [&](std::size_t level, std::size_t c) {
        std::vector<double> v(o.n_paths);
        for (std::size_t p = 0; p < o.n_paths; ++p) v[p] = per_path[p][level * kColumns + c];
        return v;
    };
    std::vector<FbmLevel> rows(levels);
    for (std::size_t i = 0; i < levels; ++i) {
        auto& r = rows[i];
        r.k = k_min + static_cast<int>(i);
        const auto e = column(i, kEnergy);
        const auto g = column(i, kGap);
        auto m = column(i, kMart);
        r.e2_raw = estimate_of(e);
        r.projection_gap = estimate_of(g);
        r.martingale_mean = estimate_of(m);
        for (double& x : m) x *= x;
        r.martingale_second_moment = estimate_of(m);
        if (i + 1 < levels) {
            r.e2_decrease = paired_difference(e, column(i + 1, kEnergy));
            r.gap_decrease = paired_difference(g, column(i + 1, kGap));
        }
    }
    return rows;
}

std::vector<FbmLevel> fbm_energy_scan(const std::function<double(double)>& f, double hurst, int k_min, int k_max,
                                      const SimulationOptions& opt) {
    auto rows = fbm_scan(f, hurst, k_min, k_max, opt);
    for (auto& r : rows) r.projection_gap = r.gap_decrease = r.martingale_mean = r.martingale_second_moment = {};
    return rows;
}

std::vector<FbmLevel> fbm_projection_convergence(const std::function<double(double)>& f, double hurst, int k_min,
                                                 int k_max, const SimulationOptions& opt) {
    auto rows = fbm_scan(f, hurst, k_min, k_max, opt);
    for (auto& r : rows) r.e2_raw = r.e2_decrease = r.martingale_mean = r.martingale_second_moment = {};
    return rows;
}

}  // namespace skelcalc
