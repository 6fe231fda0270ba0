#include "skelcalc/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skelcalc/parallel.hpp"

namespace skelcalc {
namespace {

std::int64_t lattice_index(double y, double h) {
    const double q = y / h;
    if (std::abs(q - std::round(q)) > 1e-9) throw std::domain_error("crossing_counts: start must lie on the lattice 2^-k Z");
    return std::llround(q);
}

// int_0^{t ^ S_m} g(B_s) ds by the left-point rule on the grid.
double occupation_integral(const GridPath& path, double t, int band, const std::function<double(double)>& g) {
    const double bound = pow2(band);
    const auto last = path.index_at(t);
    double s = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
        if (std::abs(path.values[i]) >= bound) break;
        s += g(path.values[i]);
    }
    return s * path.dt;
}

Estimate grid_oracle(const LocalTimeOptions& opt, const std::function<double(double)>& g, std::uint32_t tag) {
    SimulationOptions o = opt.oracle;
    o.engine = Engine::Grid;
    o.horizon = std::max(o.horizon, opt.t);
    auto v = map_paths<double>(o.n_paths, o.workers, [&](std::size_t p) {
        RandomStream rng(o.seed, static_cast<std::uint32_t>(p), tag);
        const auto path = generate_brownian(o.grid_dt, o.horizon, o.start_value, rng);
        return occupation_integral(path, opt.t, opt.band, g);
    });
    return estimate_of(v);
}

}  // namespace

std::int64_t CrossingCounts::eta(std::int64_t j) const noexcept {
    const std::int64_t i = j - min_cell;
    if (i < 0 || i >= static_cast<std::int64_t>(up.size())) return 0;
    return up[static_cast<std::size_t>(i)] + down[static_cast<std::size_t>(i)];
}

std::int64_t CrossingCounts::total() const noexcept {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < up.size(); ++i) s += up[i] + down[i];
    return s;
}

CrossingCounts crossing_counts(const Skeleton& sk, int m, double t) {
    if (!(t >= 0.0) || t > sk.horizon()) throw std::domain_error("crossing_counts: t outside [0, horizon]");
    const double h = sk.spacing();
    const std::int64_t p0 = lattice_index(sk.start_value(), h);
    const std::int64_t edge = static_cast<std::int64_t>(1) << (m + sk.level());
    if (m < 0 || std::abs(p0) >= edge) throw std::domain_error("crossing_counts: start must lie inside (-2^m, 2^m)");
    CrossingCounts cc;
    cc.level = sk.level();
    cc.band = m;
    cc.t = t;
    cc.stop_time = t;
    cc.min_cell = 1 - edge;
    cc.up.assign(static_cast<std::size_t>(2 * edge), 0);
    cc.down.assign(static_cast<std::size_t>(2 * edge), 0);
    for (std::size_t n = 1; n <= sk.jump_count() && sk.time(n) <= t; ++n) {
        const std::int64_t from = p0 + sk.offset(n - 1);
        const std::int64_t to = p0 + sk.offset(n);
        const auto slot = static_cast<std::size_t>(std::max(from, to) - cc.min_cell);
        if (to > from) ++cc.up[slot];
        else ++cc.down[slot];
        ++cc.jumps;
        if (std::abs(to) == edge) {
            cc.stopped = true;
            cc.stop_time = sk.time(n);
            break;
        }
    }
    return cc;
}

double LocalTimeEstimate::operator()(double x) const {
    const auto j = static_cast<std::int64_t>(std::floor(x / pow2(-level))) + 1;
    const std::int64_t i = j - min_cell;
    if (i < 0 || i >= static_cast<std::int64_t>(values.size())) return 0.0;
    return values[static_cast<std::size_t>(i)];
}

double LocalTimeEstimate::at_lattice_point(double x) const {
    const double h = pow2(-level);
    return 0.5 * ((*this)(x - 0.5 * h) + (*this)(x + 0.5 * h));
}

LocalTimeEstimate local_time_estimate(const CrossingCounts& cc) {
    LocalTimeEstimate l;
    l.level = cc.level;
    l.min_cell = cc.min_cell;
    l.values.resize(cc.cells());
    const double scale = 0.5 * cc.spacing();
    for (std::size_t i = 0; i < cc.cells(); ++i) l.values[i] = scale * static_cast<double>(cc.up[i] + cc.down[i]);
    return l;
}

double bracket_F_A(const std::function<double(double)>& F, const CrossingCounts& cc) {
    const double h = cc.spacing();
    double s = 0.0;
    for (std::size_t i = 0; i < cc.cells(); ++i) {
        const std::int64_t eta = cc.up[i] + cc.down[i];
        if (eta == 0) continue;
        const auto j = static_cast<double>(cc.cell_index(i));
        s += h * static_cast<double>(eta) * (F(j * h) - F((j - 1.0) * h));
    }
    return s;
}

double bracket_F_F(const std::function<double(double)>& F, const CrossingCounts& cc) {
    const double h = cc.spacing();
    double s = 0.0;
    for (std::size_t i = 0; i < cc.cells(); ++i) {
        const std::int64_t eta = cc.up[i] + cc.down[i];
        if (eta == 0) continue;
        const auto j = static_cast<double>(cc.cell_index(i));
        const double d = F(j * h) - F((j - 1.0) * h);
        s += d * d * static_cast<double>(eta);
    }
    return s;
}

std::pair<double, double> direct_brackets(const std::function<double(double)>& F, const Skeleton& sk, int m, double t) {
    const double bound = pow2(m);
    double fa = 0.0, ff = 0.0;
    for (std::size_t n = 1; n <= sk.jump_count() && sk.time(n) <= t; ++n) {
        const double dF = F(sk.value(n)) - F(sk.value(n - 1));
        fa += dF * (sk.value(n) - sk.value(n - 1));
        ff += dF * dF;
        if (std::abs(sk.value(n)) == bound) break;
    }
    return {fa, ff};
}

CellMasses cell_masses_from_function(const std::function<double(double)>& F, const CrossingCounts& cc) {
    CellMasses mu;
    mu.min_cell = cc.min_cell;
    mu.mass.resize(cc.cells());
    const double h = cc.spacing();
    for (std::size_t i = 0; i < cc.cells(); ++i) {
        const auto j = static_cast<double>(cc.cell_index(i));
        mu.mass[i] = F(j * h) - F((j - 1.0) * h);
    }
    return mu;
}

CellMasses cell_masses_from_jumps(const std::vector<std::pair<double, double>>& jumps, const CrossingCounts& cc) {
    CellMasses mu;
    mu.min_cell = cc.min_cell;
    mu.mass.assign(cc.cells(), 0.0);
    const double h = cc.spacing();
    for (const auto& [x, size] : jumps) {
        const auto j = static_cast<std::int64_t>(std::ceil(x / h));
        const std::int64_t i = j - cc.min_cell;
        if (i >= 0 && i < static_cast<std::int64_t>(mu.mass.size())) mu.mass[static_cast<std::size_t>(i)] += size;
    }
    return mu;
}

double local_time_stieltjes(const LocalTimeEstimate& l, const CellMasses& mu) {
    if (l.min_cell != mu.min_cell || l.values.size() != mu.mass.size())
        throw std::invalid_argument("local_time_stieltjes: cell ranges differ");
    double s = 0.0;
    for (std::size_t i = 0; i < l.values.size(); ++i) s += 2.0 * l.values[i] * mu.mass[i];
    return s;
}

double local_time_integral(const std::function<double(double)>& F, const Skeleton& sk, const IntensityTable& table,
                           double t) {
    const int k = sk.level();
    const double h = sk.spacing();
    double s = 0.0;
    for (std::size_t n = 0; n <= sk.jump_count() && sk.time(n) < t; ++n) {
        const double a = sk.value(n);
        const double lo = sk.time(n);
        const double hi = std::min(sk.interval_end(n), t);
        const double second = (F(a + h) - F(a)) + (F(a - h) - F(a));
        if (second != 0.0) s += second * table.angle_increment(k, lo, hi);
    }
    return pow2(2 * k) * s;
}

std::vector<IdentityRow> covariation_identity_check(const std::function<double(double)>& F,
                                                    const std::function<double(double)>& f, int k_min, int k_max,
                                                    const LocalTimeOptions& opt) {
    const auto levels = static_cast<std::size_t>(k_max - k_min + 1);
    const auto& so = opt.skeleton;
    auto per_path = map_paths<std::vector<double>>(so.n_paths, so.workers, [&](std::size_t p) {
        const auto s = sample_path(so, k_min, k_max, p, 6);
        std::vector<double> out(3 * levels);
        for (std::size_t i = 0; i < levels; ++i) {
            const auto cc = crossing_counts(s.levels[i], opt.band, opt.t);
            out[3 * i] = bracket_F_A(F, cc);
            out[3 * i + 1] = local_time_stieltjes(local_time_estimate(cc), cell_masses_from_function(F, cc));
            out[3 * i + 2] = std::abs(out[3 * i] - direct_brackets(F, s.levels[i], opt.band, opt.t).first);
        }
        return out;
    });
    const auto oracle = grid_oracle(opt, f, 7);
    std::vector<IdentityRow> rows;
    std::vector<double> a(so.n_paths), b(so.n_paths);
    for (std::size_t i = 0; i < levels; ++i) {
        IdentityRow r;
        r.k = k_min + static_cast<int>(i);
        for (std::size_t p = 0; p < so.n_paths; ++p) {
            a[p] = per_path[p][3 * i];
            b[p] = per_path[p][3 * i + 1];
            r.max_rearrangement_error = std::max(r.max_rearrangement_error, per_path[p][3 * i + 2]);
        }
        r.skeleton = estimate_of(a);
        r.stieltjes = estimate_of(b);
        r.oracle = oracle;
        rows.push_back(r);
    }
    return rows;
}

std::vector<IdentityRow> energy_identity_check(const std::function<double(double)>& F,
                                               const std::function<double(double)>& f, int k_min, int k_max,
                                               const LocalTimeOptions& opt) {
    const auto levels = static_cast<std::size_t>(k_max - k_min + 1);
    const auto& so = opt.skeleton;
    auto per_path = map_paths<std::vector<double>>(so.n_paths, so.workers, [&](std::size_t p) {
        const auto s = sample_path(so, k_min, k_max, p, 8);
        std::vector<double> out(2 * levels);
        for (std::size_t i = 0; i < levels; ++i) {
            const auto cc = crossing_counts(s.levels[i], opt.band, opt.t);
            out[2 * i] = bracket_F_F(F, cc);
            out[2 * i + 1] = std::abs(out[2 * i] - direct_brackets(F, s.levels[i], opt.band, opt.t).second);
        }
        return out;
    });
    const auto oracle = grid_oracle(opt, [&](double x) { return f(x) * f(x); }, 9);
    std::vector<IdentityRow> rows;
    std::vector<double> a(so.n_paths);
    for (std::size_t i = 0; i < levels; ++i) {
        IdentityRow r;
        r.k = k_min + static_cast<int>(i);
        for (std::size_t p = 0; p < so.n_paths; ++p) {
            a[p] = per_path[p][2 * i];
            r.max_rearrangement_error = std::max(r.max_rearrangement_error, per_path[p][2 * i + 1]);
        }
        r.skeleton = estimate_of(a);
        r.oracle = oracle;
        rows.push_back(r);
    }
    return rows;
}

LocalTimeCurve local_time_curve(int k, const LocalTimeOptions& opt) {
    const auto& so = opt.skeleton;
    // Fixed blocks of paths keep the reduction order independent of workers
    // without holding one curve per path.
    constexpr std::size_t kBlock = 256;
    const std::size_t blocks = (so.n_paths + kBlock - 1) / kBlock;
    const auto cells = static_cast<std::size_t>(2) << (opt.band + k);
    auto sums = map_paths<std::vector<double>>(blocks, so.workers, [&](std::size_t b) {
        std::vector<double> acc(2 * cells, 0.0);
        for (std::size_t p = b * kBlock; p < std::min(so.n_paths, (b + 1) * kBlock); ++p) {
            const auto s = sample_path(so, k, k, p, 10);
            const auto l = local_time_estimate(crossing_counts(s.levels.front(), opt.band, opt.t));
            for (std::size_t i = 0; i < cells; ++i) {
                acc[i] += l.values[i];
                acc[cells + i] += l.values[i] * l.values[i];
            }
        }
        return acc;
    });
    LocalTimeCurve curve;
    curve.k = k;
    const double h = pow2(-k);
    const auto min_cell = 1 - (static_cast<std::int64_t>(1) << (opt.band + k));
    const auto n = static_cast<double>(so.n_paths);
    for (std::size_t i = 0; i < cells; ++i) {
        double s = 0.0, s2 = 0.0;
        for (const auto& blk : sums) {
            s += blk[i];
            s2 += blk[cells + i];
        }
        const double mean = s / n;
        const double var = so.n_paths > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
        curve.x.push_back(h * static_cast<double>(min_cell + static_cast<std::int64_t>(i) - 1));
        curve.l_hat.push_back({so.n_paths, mean, std::sqrt(var / n)});
    }
    return curve;
}

TanakaReport tanaka_check(int k, const LocalTimeOptions& opt, const IntensityTable& table) {
    const auto& so = opt.skeleton;
    auto per_path = map_paths<std::pair<double, double>>(so.n_paths, so.workers, [&](std::size_t p) {
        const auto s = sample_path(so, k, k, p, 11);
        const auto& sk = s.levels.front();
        const double n_abs = decompose(abs_state(), sk, table).drift(opt.t);
        const auto l = local_time_estimate(crossing_counts(sk, opt.band, opt.t));
        return std::make_pair(n_abs, 2.0 * l.at_lattice_point(0.0));
    });
    std::vector<double> a(so.n_paths), b(so.n_paths);
    for (std::size_t p = 0; p < so.n_paths; ++p) {
        a[p] = per_path[p].first;
        b[p] = per_path[p].second;
    }
    TanakaReport rep;
    rep.k = k;
    rep.drift_abs = estimate_of(a);
    rep.two_l_hat = estimate_of(b);
    const double eps = pow2(-k);
    rep.occupation = grid_oracle(opt, [eps](double x) { return std::abs(x) < eps ? 0.5 / eps : 0.0; }, 12);
    const double l0 = 0.5 * rep.two_l_hat.mean;
    const double l0_se = 0.5 * rep.two_l_hat.std_error;
    rep.normalization.n = so.n_paths;
    rep.normalization.mean = rep.occupation.mean / l0;
    rep.normalization.std_error =
        rep.normalization.mean * std::hypot(rep.occupation.std_error / rep.occupation.mean, l0_se / l0);
    return rep;
}

}  // namespace skelcalc
