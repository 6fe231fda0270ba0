#include "skelcalc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skelcalc/fbm.hpp"
#include "skelcalc/parallel.hpp"

namespace skelcalc {
namespace {

StepProcess on_skeleton_times(const Skeleton& sk, double x0) {
    StepProcess sp;
    sp.initial_value = x0;
    sp.jump_times = sk.times();
    sp.post_jump_values.resize(sk.jump_count());
    sp.horizon = sk.horizon();
    return sp;
}

double value_at(const StepProcess& sp, std::size_t n) { return n == 0 ? sp.initial_value : sp.post_jump_values[n - 1]; }

}  // namespace

StepProcess delta_projection(const Functional& f, const Skeleton& sk) {
    switch (f.kind) {
        case FunctionalKind::State: {
            auto sp = on_skeleton_times(sk, f.fn(sk.value(0)));
            for (std::size_t n = 1; n <= sk.jump_count(); ++n) sp.post_jump_values[n - 1] = f.fn(sk.value(n));
            return sp;
        }
        case FunctionalKind::MartingaleTerminal: {
            if (sk.horizon() > f.terminal_time)
                throw UsageError("delta_projection: skeleton horizon exceeds the terminal time");
            auto sp = on_skeleton_times(sk, f.terminal_conditional(sk.value(0), 0.0));
            for (std::size_t n = 1; n <= sk.jump_count(); ++n)
                sp.post_jump_values[n - 1] = f.terminal_conditional(sk.value(n), sk.time(n));
            return sp;
        }
        case FunctionalKind::FirstPassage: {
            const double ta = first_passage_time(sk, f.alpha);
            const double a2 = f.alpha * f.alpha;
            auto sp = on_skeleton_times(sk, std::min(0.0, ta) + a2 - sk.value(0) * sk.value(0));
            double frozen = sp.initial_value;
            for (std::size_t n = 1; n <= sk.jump_count(); ++n) {
                if (sk.time(n) <= ta) frozen = sk.time(n) + a2 - sk.value(n) * sk.value(n);
                sp.post_jump_values[n - 1] = frozen;
            }
            return sp;
        }
        case FunctionalKind::FbmState:
            throw UsageError("delta_projection: fbm-state needs the B^H grid path");
    }
    throw UsageError("delta_projection: unknown kind");
}

StepProcess delta_projection(const Functional& f, const Skeleton& sk, const GridPath& path) {
    if (f.kind != FunctionalKind::FbmState) return delta_projection(f, sk);
    auto sp = on_skeleton_times(sk, f.fn(path.at(0.0)));
    for (std::size_t n = 1; n <= sk.jump_count(); ++n) sp.post_jump_values[n - 1] = f.fn(path.at(sk.time(n)));
    return sp;
}

StepProcess first_passage_displayed(const Skeleton& sk, double alpha) {
    const double ta = first_passage_time(sk, alpha);
    auto sp = on_skeleton_times(sk, alpha * alpha);
    double acc = sp.initial_value;
    for (std::size_t n = 1; n <= sk.jump_count(); ++n) {
        if (sk.time(n) <= ta) acc += sk.time(n) - sk.time(n - 1);
        sp.post_jump_values[n - 1] = acc;
    }
    return sp;
}

double WeightedDerivative::integral(double a, double b) const {
    if (b <= a) return 0.0;
    const auto& t = ratio.jump_times;
    std::size_t n = ratio.jumps_up_to(a);
    double sum = 0.0;
    double lo = a;
    while (lo < b) {
        const double hi = n < t.size() ? std::min(b, t[n]) : b;
        const double r = n == 0 ? ratio.initial_value : ratio.post_jump_values[n - 1];
        if (r != 0.0) sum += r * table->angle_increment(level, lo, hi);
        lo = hi;
        ++n;
    }
    return sum;
}

WeightedDerivative stochastic_derivative(const StepProcess& dx, const Skeleton& sk, const IntensityTable& table) {
    if (dx.jump_times.size() != sk.jump_count())
        throw std::invalid_argument("stochastic_derivative: process and skeleton jump times differ");
    WeightedDerivative d;
    d.level = sk.level();
    d.table = &table;
    d.ratio = on_skeleton_times(sk, 0.0);
    for (std::size_t n = 1; n <= sk.jump_count(); ++n) {
        // Denominator is exactly +-2^-k, so the division is exact.
        d.ratio.post_jump_values[n - 1] =
            (value_at(dx, n) - value_at(dx, n - 1)) / (sk.value(n) - sk.value(n - 1));
    }
    return d;
}

std::vector<double> drift_kernel_state(const std::function<double(double)>& F, const Skeleton& sk) {
    const double h = sk.spacing();
    const double inv = 0.5 / (h * h);
    std::vector<double> u(sk.jump_count() + 1);
    for (std::size_t n = 0; n <= sk.jump_count(); ++n) {
        const double a = sk.value(n);
        u[n] = (F(a + h) + F(a - h) - 2.0 * F(a)) * inv;
    }
    return u;
}

double Decomposition::drift(double t) const {
    const std::size_t n = delta_x.jumps_up_to(t);
    if (!(t >= 0.0) || t > delta_x.horizon) throw std::domain_error("Decomposition::drift: t outside [0, horizon]");
    const double tn = n == 0 ? 0.0 : delta_x.jump_times[n - 1];
    return drift_at_jumps[n] + drift_kernel[n] * table->angle_increment(level, tn, t);
}

double Decomposition::martingale(double t) const {
    const std::size_t n = delta_x.jumps_up_to(t);
    if (!(t >= 0.0) || t > delta_x.horizon) throw std::domain_error("Decomposition::martingale: t outside [0, horizon]");
    const double tn = n == 0 ? 0.0 : delta_x.jump_times[n - 1];
    return martingale_at_jumps[n] - drift_kernel[n] * table->angle_increment(level, tn, t);
}

Decomposition decompose(const Functional& f, const Skeleton& sk, const IntensityTable& table) {
    Decomposition d;
    d.level = sk.level();
    d.table = &table;
    d.delta_x = delta_projection(f, sk);
    d.x0 = d.delta_x.initial_value;
    const std::size_t N = sk.jump_count();
    if (f.kind == FunctionalKind::State) d.drift_kernel = drift_kernel_state(f.fn, sk);
    else d.drift_kernel.assign(N + 1, 0.0);

    const auto deriv = stochastic_derivative(d.delta_x, sk, table);
    d.drift_at_jumps.assign(N + 1, 0.0);
    d.martingale_at_jumps.assign(N + 1, 0.0);
    double prev_angle = 0.0;
    double jumps = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        const double angle = table.angle_bracket(d.level, sk.time(n));
        d.drift_at_jumps[n] = d.drift_at_jumps[n - 1] + d.drift_kernel[n - 1] * (angle - prev_angle);
        prev_angle = angle;
        jumps += deriv.ratio.post_jump_values[n - 1] * (sk.value(n) - sk.value(n - 1));
        d.martingale_at_jumps[n] = jumps - d.drift_at_jumps[n];
    }
    return d;
}

double bracket(const StepProcess& x, const StepProcess& y, double t) {
    if (x.jump_times != y.jump_times) throw std::invalid_argument("bracket: processes must share jump times");
    const std::size_t n = x.jumps_up_to(t);
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) s += (value_at(x, i) - value_at(x, i - 1)) * (value_at(y, i) - value_at(y, i - 1));
    return s;
}

double step_energy(const StepProcess& x, double t) {
    const std::size_t n = x.jumps_up_to(t);
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double d = value_at(x, i) - value_at(x, i - 1);
        s += d * d;
    }
    return s;
}

StepProcess raw_at_stopping_times(const Functional& f, const Skeleton& sk, const GridPath* path) {
    const bool grid = path != nullptr && !path->values.empty();
    if (!grid && f.kind == FunctionalKind::FbmState) throw UsageError("raw energy: fbm-state needs the B^H grid path");
    auto eval = [&](double t) { return grid ? evaluate_functional(f, t, *path) : evaluate_functional(f, t, sk); };
    auto sp = on_skeleton_times(sk, eval(0.0));
    for (std::size_t n = 1; n <= sk.jump_count(); ++n) sp.post_jump_values[n - 1] = eval(sk.time(n));
    return sp;
}

PathSample sample_path(const SimulationOptions& opt, int k_min, int k_max, std::size_t path_index,
                       std::uint32_t stream_tag) {
    RandomStream rng(opt.seed, static_cast<std::uint32_t>(path_index), stream_tag);
    PathSample s;
    if (opt.engine == Engine::Exact) {
        s.levels = build_hierarchy(default_first_exit_law(), k_min, k_max, opt.horizon, rng, opt.start_value);
        return s;
    }
    s.path = generate_brownian(opt.grid_dt, opt.horizon, opt.start_value, rng);
    for (int k = k_min; k <= k_max; ++k) {
        auto g = extract_skeleton_from_grid(s.path, k);
        s.max_overshoot = std::max(s.max_overshoot, g.max_overshoot);
        s.levels.push_back(std::move(g.skeleton));
    }
    return s;
}

EnergyReport energy(const Functional& f, int k_min, int k_max, const SimulationOptions& opt) {
    if (f.kind == FunctionalKind::FbmState && opt.engine != Engine::Grid)
        throw UsageError("energy: fbm-state functionals need the grid engine");
    const auto levels = static_cast<std::size_t>(k_max - k_min + 1);
    auto per_path = map_paths<std::vector<double>>(opt.n_paths, opt.workers, [&](std::size_t p) {
        const auto s = sample_path(opt, k_min, k_max, p, 1);
        GridPath driver = s.path;
        if (f.kind == FunctionalKind::FbmState) driver = build_fbm(s.path, f.hurst);
        const GridPath* raw_path = opt.engine == Engine::Grid ? &driver : nullptr;
        std::vector<double> out(2 * levels);
        for (std::size_t i = 0; i < levels; ++i) {
            const auto& sk = s.levels[i];
            const auto dx = f.kind == FunctionalKind::FbmState ? delta_projection(f, sk, driver) : delta_projection(f, sk);
            out[2 * i] = step_energy(dx, opt.horizon);
            out[2 * i + 1] = step_energy(raw_at_stopping_times(f, sk, raw_path), opt.horizon);
        }
        return out;
    });
    EnergyReport report;
    report.functional = f.name;
    std::vector<double> cond(opt.n_paths), raw(opt.n_paths);
    for (std::size_t i = 0; i < levels; ++i) {
        for (std::size_t p = 0; p < opt.n_paths; ++p) {
            cond[p] = per_path[p][2 * i];
            raw[p] = per_path[p][2 * i + 1];
        }
        report.levels.push_back({k_min + static_cast<int>(i), estimate_of(cond), estimate_of(raw), paired_difference(raw, cond)});
    }
    return report;
}

const char* to_string(TestFunctional g) {
    switch (g) {
        case TestFunctional::One: return "one";
        case TestFunctional::SignMidpoint: return "sign-midpoint";
        case TestFunctional::ClippedTerminal: return "clipped-terminal";
    }
    return "?";
}

double evaluate_test_functional(TestFunctional g, const PathSample& sample, double horizon) {
    auto value = [&](double t) {
        return sample.path.values.empty() ? sample.levels.back().evaluate(t) : sample.path.at(t);
    };
    switch (g) {
        case TestFunctional::One: return 1.0;
        case TestFunctional::SignMidpoint: {
            const double b = value(0.5 * horizon);
            return b > 0.0 ? 1.0 : (b < 0.0 ? -1.0 : 0.0);
        }
        case TestFunctional::ClippedTerminal: return std::clamp(value(horizon), -1.0, 1.0);
    }
    return 0.0;
}

std::vector<ProbeRow> delta_covariation_probe(const Functional& fx, const Functional& fy, const std::vector<double>& ts,
                                              const std::vector<TestFunctional>& gs, int k_min, int k_max,
                                              const SimulationOptions& opt, const IntensityTable&) {
    if (!fx.projection_closed_form() || !fy.projection_closed_form())
        throw UsageError("delta_covariation_probe: functionals need closed-form projections");
    const auto levels = static_cast<std::size_t>(k_max - k_min + 1);
    const std::size_t cells = levels * ts.size() * gs.size();
    auto per_path = map_paths<std::vector<double>>(opt.n_paths, opt.workers, [&](std::size_t p) {
        const auto s = sample_path(opt, k_min, k_max, p, 2);
        std::vector<double> gv(gs.size());
        for (std::size_t j = 0; j < gs.size(); ++j) gv[j] = evaluate_test_functional(gs[j], s, opt.horizon);
        std::vector<double> out(cells);
        std::size_t c = 0;
        for (std::size_t i = 0; i < levels; ++i) {
            const auto dx = delta_projection(fx, s.levels[i]);
            const auto dy = delta_projection(fy, s.levels[i]);
            for (double t : ts) {
                const double b = bracket(dx, dy, t);
                for (std::size_t j = 0; j < gs.size(); ++j) out[c++] = gv[j] * b;
            }
        }
        return out;
    });
    std::vector<ProbeRow> rows;
    std::vector<double> col(opt.n_paths);
    std::size_t c = 0;
    for (std::size_t i = 0; i < levels; ++i)
        for (double t : ts)
            for (auto g : gs) {
                for (std::size_t p = 0; p < opt.n_paths; ++p) col[p] = per_path[p][c];
                rows.push_back({k_min + static_cast<int>(i), t, g, estimate_of(col)});
                ++c;
            }
    return rows;
}

std::vector<ItoRow> ito_decompose_probe(const Functional& f, const std::vector<double>& ts,
                                        const std::vector<TestFunctional>& gs, int k_min, int k_max,
                                        const SimulationOptions& opt, const IntensityTable& table) {
    const auto levels = static_cast<std::size_t>(k_max - k_min + 1);
    const std::size_t cells = levels * ts.size() * gs.size();
    auto per_path = map_paths<std::vector<double>>(opt.n_paths, opt.workers, [&](std::size_t p) {
        const auto s = sample_path(opt, k_min, k_max, p, 14);
        std::vector<double> gv(gs.size());
        for (std::size_t j = 0; j < gs.size(); ++j) gv[j] = evaluate_test_functional(gs[j], s, opt.horizon);
        std::vector<double> out(3 * cells);
        std::size_t c = 0;
        for (std::size_t i = 0; i < levels; ++i) {
            const auto d = decompose(f, s.levels[i], table);
            for (double t : ts) {
                const double m = d.martingale(t);
                const double n = d.drift(t);
                for (std::size_t j = 0; j < gs.size(); ++j) {
                    out[3 * c] = gv[j] * m;
                    out[3 * c + 1] = gv[j] * m * m;
                    out[3 * c + 2] = gv[j] * n;
                    ++c;
                }
            }
        }
        return out;
    });
    std::vector<ItoRow> rows;
    std::vector<double> a(opt.n_paths), b(opt.n_paths), d(opt.n_paths);
    std::size_t c = 0;
    for (std::size_t i = 0; i < levels; ++i)
        for (double t : ts)
            for (auto g : gs) {
                for (std::size_t p = 0; p < opt.n_paths; ++p) {
                    a[p] = per_path[p][3 * c];
                    b[p] = per_path[p][3 * c + 1];
                    d[p] = per_path[p][3 * c + 2];
                }
                rows.push_back({k_min + static_cast<int>(i), t, g, estimate_of(a), estimate_of(b), estimate_of(d)});
                ++c;
            }
    return rows;
}

std::vector<ChainRuleRow> chain_rule_probe(const std::function<double(double)>& F,
                                           const std::function<double(double)>& f, const std::vector<double>& ts,
                                           const std::vector<TestFunctional>& gs, int k_min, int k_max,
                                           const SimulationOptions& opt, const IntensityTable& table) {
    const auto levels = static_cast<std::size_t>(k_max - k_min + 1);
    const std::size_t cells = levels * ts.size() * gs.size();
    const auto state = state_functional("F", F);
    auto per_path = map_paths<std::vector<double>>(opt.n_paths, opt.workers, [&](std::size_t p) {
        const auto s = sample_path(opt, k_min, k_max, p, 3);
        std::vector<double> gv(gs.size());
        for (std::size_t j = 0; j < gs.size(); ++j) gv[j] = evaluate_test_functional(gs[j], s, opt.horizon);
        std::vector<double> out(2 * cells);
        std::size_t c = 0;
        for (std::size_t i = 0; i < levels; ++i) {
            const auto& sk = s.levels[i];
            const auto left = stochastic_derivative(delta_projection(state, sk), sk, table);
            // D^k B has ratio 1, so the right side weights f(A) by h^k.
            WeightedDerivative right;
            right.level = sk.level();
            right.table = &table;
            right.ratio = on_skeleton_times(sk, 0.0);
            for (std::size_t n = 1; n <= sk.jump_count(); ++n) right.ratio.post_jump_values[n - 1] = f(sk.value(n));
            for (double t : ts) {
                const double l = left.integral(0.0, t);
                const double r = right.integral(0.0, t);
                for (std::size_t j = 0; j < gs.size(); ++j) {
                    out[2 * c] = gv[j] * l;
                    out[2 * c + 1] = gv[j] * r;
                    ++c;
                }
            }
        }
        return out;
    });
    std::vector<ChainRuleRow> rows;
    std::vector<double> a(opt.n_paths), b(opt.n_paths);
    std::size_t c = 0;
    for (std::size_t i = 0; i < levels; ++i)
        for (double t : ts)
            for (auto g : gs) {
                for (std::size_t p = 0; p < opt.n_paths; ++p) {
                    a[p] = per_path[p][2 * c];
                    b[p] = per_path[p][2 * c + 1];
                }
                rows.push_back({k_min + static_cast<int>(i), t, g, estimate_of(a), estimate_of(b), paired_difference(a, b)});
                ++c;
            }
    return rows;
}

}  // namespace skelcalc
