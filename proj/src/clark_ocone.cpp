#include "skelcalc/clark_ocone.hpp"

#include <cmath>
#include <stdexcept>

#include "skelcalc/parallel.hpp"

namespace skelcalc {

WeightedDerivative clark_ocone_density(const Functional& f, const Skeleton& sk, const IntensityTable& table) {
    if (f.kind != FunctionalKind::MartingaleTerminal && f.kind != FunctionalKind::FirstPassage)
        throw UsageError("clark_ocone_density: needs a martingale-terminal or first-passage functional");
    return stochastic_derivative(delta_projection(f, sk), sk, table);
}

Estimate ratio_estimate(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ratio_estimate: need paired samples");
    const auto ex = estimate_of(x);
    const auto ey = estimate_of(y);
    Estimate r;
    r.n = x.size();
    r.mean = ex.mean / ey.mean;
    std::vector<double> lin(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) lin[i] = (x[i] - r.mean * y[i]) / ey.mean;
    r.std_error = estimate_of(lin).std_error;
    return r;
}

std::vector<DensityPoint> density_curve(const Functional& f, int k, const std::vector<double>& times,
                                        const SimulationOptions& opt, const IntensityTable& table,
                                        const std::function<double(double)>& oracle) {
    const bool grid = opt.engine == Engine::Grid && oracle;
    auto per_path = map_paths<std::vector<double>>(opt.n_paths, opt.workers, [&](std::size_t p) {
        const auto s = sample_path(opt, k, k, p, 4);
        const auto d = clark_ocone_density(f, s.levels.front(), table);
        std::vector<double> out(2 * times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            out[2 * i] = d.evaluate(times[i]);
            out[2 * i + 1] = grid ? oracle(s.path.at(times[i])) : std::nan("");
        }
        return out;
    });
    std::vector<DensityPoint> points;
    std::vector<double> a(opt.n_paths), b(opt.n_paths);
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t p = 0; p < opt.n_paths; ++p) {
            a[p] = per_path[p][2 * i];
            b[p] = per_path[p][2 * i + 1];
        }
        DensityPoint pt;
        pt.t = times[i];
        pt.density = estimate_of(a);
        if (grid) {
            pt.oracle = estimate_of(b);
            pt.difference = paired_difference(a, b);
        }
        points.push_back(pt);
    }
    return points;
}

ResidualReport representation_residual(const Functional& f, int k, const SimulationOptions& opt,
                                       const IntensityTable& table) {
    if (opt.engine != Engine::Grid) throw UsageError("representation_residual: needs the grid engine");
    struct PathOut {
        double F = 0.0;
        double integral = 0.0;
    };
    auto per_path = map_paths<PathOut>(opt.n_paths, opt.workers, [&](std::size_t p) {
        const auto s = sample_path(opt, k, k, p, 5);
        const auto& path = s.path;
        const auto& sk = s.levels.front();
        const auto d = clark_ocone_density(f, sk, table);
        PathOut out;
        out.F = evaluate_functional(f, opt.horizon, path);
        // Left-point Riemann-Ito sum; the interval index advances with i.
        const auto& jt = d.ratio.jump_times;
        std::size_t n = 0;
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const double t = path.dt * static_cast<double>(i);
            while (n < jt.size() && jt[n] <= t * (1.0 + 1e-12)) ++n;
            const double ratio = n == 0 ? d.ratio.initial_value : d.ratio.post_jump_values[n - 1];
            if (ratio != 0.0) sum += ratio * table.h(k, t) * (path.values[i + 1] - path.values[i]);
        }
        out.integral = sum;
        return out;
    });
    std::vector<double> F(opt.n_paths), I(opt.n_paths);
    for (std::size_t p = 0; p < opt.n_paths; ++p) {
        F[p] = per_path[p].F;
        I[p] = per_path[p].integral;
    }
    const auto ef = estimate_of(F);
    std::vector<double> r2(opt.n_paths), f2(opt.n_paths);
    double r_mean = 0.0;
    for (std::size_t p = 0; p < opt.n_paths; ++p) r_mean += F[p] - ef.mean - I[p];
    r_mean /= static_cast<double>(opt.n_paths);
    for (std::size_t p = 0; p < opt.n_paths; ++p) {
        const double r = F[p] - ef.mean - I[p] - r_mean;
        r2[p] = r * r;
        f2[p] = (F[p] - ef.mean) * (F[p] - ef.mean);
    }
    ResidualReport rep;
    rep.k = k;
    rep.f_mean = ef;
    rep.integral_mean = estimate_of(I);
    // Constant F: R is identically zero and so is Var(F).
    if (ef.std_error == 0.0) rep.variance_ratio = Estimate{opt.n_paths, 0.0, 0.0};
    else rep.variance_ratio = ratio_estimate(r2, f2);
    return rep;
}

}  // namespace skelcalc
