#include "skelcalc/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skelcalc/csv.hpp"

namespace skelcalc {

double StepProcess::evaluate(double t) const {
    if (!(t >= 0.0) || t > horizon) throw std::domain_error("StepProcess::evaluate: t outside [0, horizon]");
    const std::size_t n = jumps_up_to(t);
    return n == 0 ? initial_value : post_jump_values[n - 1];
}

std::size_t StepProcess::jumps_up_to(double t) const {
    return static_cast<std::size_t>(std::upper_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin());
}

Skeleton::Skeleton(int level, double start_value, double horizon)
    : level_(level), spacing_(pow2(-level)), start_value_(start_value), horizon_(horizon) {
    if (level < 0) throw std::domain_error("Skeleton: level must be >= 0");
    if (!(horizon > 0.0)) throw std::domain_error("Skeleton: horizon must be > 0");
}

void Skeleton::push_jump(double time, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("Skeleton::push_jump: sign must be +-1");
    if (!(time > (times_.empty() ? 0.0 : times_.back())) || time > horizon_)
        throw std::invalid_argument("Skeleton::push_jump: times must increase strictly within the horizon");
    const std::int32_t prev = offsets_.empty() ? 0 : offsets_.back();
    times_.push_back(time);
    signs_.push_back(static_cast<std::int8_t>(sign));
    offsets_.push_back(prev + sign);
}

std::size_t Skeleton::interval_index(double t) const {
    if (!(t >= 0.0) || t > horizon_) throw std::domain_error("Skeleton: t outside [0, horizon]");
    return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

double Skeleton::evaluate(double t) const { return value(interval_index(t)); }

StepProcess Skeleton::to_step_process() const {
    StepProcess sp;
    sp.initial_value = start_value_;
    sp.jump_times = times_;
    sp.post_jump_values.resize(times_.size());
    for (std::size_t n = 1; n <= times_.size(); ++n) sp.post_jump_values[n - 1] = value(n);
    sp.horizon = horizon_;
    return sp;
}

Skeleton build_skeleton_exact(const FirstExitLaw& law, int level, double horizon, RandomStream& rng,
                              double start_value) {
    Skeleton sk(level, start_value, horizon);
    const double scale = pow2(-2 * level);
    // Expected count is horizon / scale; reserve a little above it.
    const double expected = horizon / scale;
    if (expected < 1e8) sk.reserve(static_cast<std::size_t>(expected * 1.05 + 16));
    double t = 0.0;
    for (;;) {
        const std::uint64_t bits = rng();
        const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
        t += scale * law.quantile_fast(u);
        if (t > horizon) break;
        sk.push_jump(t, (bits & 1u) ? 1 : -1);
    }
    return sk;
}

Skeleton coarsen(const Skeleton& fine) {
    if (fine.level() < 1) throw std::domain_error("coarsen: level 0 has no coarser level");
    Skeleton coarse(fine.level() - 1, fine.start_value(), fine.horizon());
    coarse.reserve(fine.jump_count() / 4 + 16);
    int walk = 0;
    for (std::size_t n = 1; n <= fine.jump_count(); ++n) {
        walk += fine.sign(n);
        if (walk == 2 || walk == -2) {
            coarse.push_jump(fine.time(n), walk / 2);
            walk = 0;
        }
    }
    return coarse;
}

std::vector<Skeleton> build_hierarchy(const FirstExitLaw& law, int k_min, int k_max, double horizon,
                                      RandomStream& rng, double start_value) {
    if (k_min < 0 || k_max < k_min) throw std::domain_error("build_hierarchy: need 0 <= k_min <= k_max");
    std::vector<Skeleton> levels(static_cast<std::size_t>(k_max - k_min + 1));
    levels.back() = build_skeleton_exact(law, k_max, horizon, rng, start_value);
    for (int k = k_max - 1; k >= k_min; --k) {
        const auto i = static_cast<std::size_t>(k - k_min);
        levels[i] = coarsen(levels[i + 1]);
    }
    return levels;
}

GridSkeleton extract_skeleton_from_grid(const GridPath& path, int level) {
    if (path.values.empty()) throw std::domain_error("extract_skeleton_from_grid: empty path");
    if (!(path.dt > 0.0)) throw std::domain_error("extract_skeleton_from_grid: dt must be > 0");
    const double horizon = std::max(path.horizon(), path.dt);
    GridSkeleton out{Skeleton(level, path.values.front(), horizon), {}, 0.0};
    const double h = out.skeleton.spacing();
    double anchor = path.values.front();
    std::int64_t offset = 0;
    for (std::size_t i = 1; i < path.values.size(); ++i) {
        const double excursion = path.values[i] - anchor;
        if (std::abs(excursion) >= h) {
            const int sign = excursion > 0.0 ? 1 : -1;
            out.skeleton.push_jump(path.dt * static_cast<double>(i), sign);
            out.grid_index.push_back(i);
            out.max_overshoot = std::max(out.max_overshoot, std::abs(excursion) - h);
            offset += sign;
            anchor = path.values.front() + h * static_cast<double>(offset);
        }
    }
    return out;
}

void write_skeleton_csv(std::ostream& out, const Skeleton& skeleton) {
    out << "n,time,sign,value\n";
    out << "0,0,0," << format_double(skeleton.start_value()) << '\n';
    for (std::size_t n = 1; n <= skeleton.jump_count(); ++n) {
        out << n << ',' << format_double(skeleton.time(n)) << ',' << skeleton.sign(n) << ','
            << format_double(skeleton.value(n)) << '\n';
    }
}

}  // namespace skelcalc
