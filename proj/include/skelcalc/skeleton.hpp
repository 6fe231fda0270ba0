#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "skelcalc/common.hpp"
#include "skelcalc/first_exit.hpp"
#include "skelcalc/grid_path.hpp"
#include "skelcalc/random_stream.hpp"

namespace skelcalc {

/// Cadlag piecewise-constant process: initial_value on [0, T_1), then
/// post_jump_values[n] on [T_{n+1}, T_{n+2}). Defined on [0, horizon].
struct StepProcess {
    double initial_value = 0.0;
    std::vector<double> jump_times;
    std::vector<double> post_jump_values;
    double horizon = 0.0;

    /// Cadlag evaluation; throws std::domain_error outside [0, horizon].
    double evaluate(double t) const;
    /// Number of jump times <= t.
    std::size_t jumps_up_to(double t) const;
};

/// One realisation of the level-k first-passage skeleton
/// ((T^k_n, sigma^k_n))_n of a Brownian motion started at start_value.
///
/// Jumps are indexed n = 1..jump_count(); n = 0 denotes the start (T_0 = 0).
/// Values live on the lattice start_value + 2^-k Z and are stored as integer
/// offsets, so every lattice identity holds exactly.
class Skeleton {
public:
    Skeleton() = default;
    Skeleton(int level, double start_value, double horizon);

    /// Appends a jump; times must increase strictly and stay <= horizon.
    void push_jump(double time, int sign);
    void reserve(std::size_t jumps) {
        times_.reserve(jumps);
        signs_.reserve(jumps);
        offsets_.reserve(jumps);
    }

    int level() const noexcept { return level_; }
    double spacing() const noexcept { return spacing_; }
    double start_value() const noexcept { return start_value_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t jump_count() const noexcept { return times_.size(); }

    /// T_n for n in [0, jump_count()].
    double time(std::size_t n) const noexcept { return n == 0 ? 0.0 : times_[n - 1]; }
    /// sigma_n in {-1, +1} for n >= 1.
    int sign(std::size_t n) const noexcept { return signs_[n - 1]; }
    /// Lattice offset of A at T_n in units of 2^-k.
    std::int64_t offset(std::size_t n) const noexcept { return n == 0 ? 0 : offsets_[n - 1]; }
    /// A^k at T_n.
    double value(std::size_t n) const noexcept {
        return start_value_ + spacing_ * static_cast<double>(offset(n));
    }
    /// Right end of the n-th interval [T_n, T_{n+1}), capped at the horizon.
    double interval_end(std::size_t n) const noexcept {
        return n < times_.size() ? times_[n] : horizon_;
    }
    /// Index n of the interval [T_n, T_{n+1}) containing t.
    std::size_t interval_index(double t) const;
    /// A^k_t (cadlag).
    double evaluate(double t) const;

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<std::int8_t>& signs() const noexcept { return signs_; }

    /// A^k as a StepProcess.
    StepProcess to_step_process() const;

private:
    int level_ = 0;
    double spacing_ = 1.0;
    double start_value_ = 0.0;
    double horizon_ = 0.0;
    std::vector<double> times_;
    std::vector<std::int8_t> signs_;
    std::vector<std::int32_t> offsets_;
};

/// Exact skeleton: increments T_n - T_{n-1} are i.i.d. 2^-2k tau and the signs
/// are i.i.d. fair, drawn from disjoint bits of one 64-bit word.
Skeleton build_skeleton_exact(const FirstExitLaw& law, int level, double horizon, RandomStream& rng,
                              double start_value = 0.0);

/// Level k skeleton from a level k+1 skeleton: a coarse jump is emitted each
/// time the fine walk has moved two net fine steps from the last coarse anchor.
Skeleton coarsen(const Skeleton& fine);

/// Skeletons at levels k_min..k_max (index 0 holds k_min) coupled through
/// one exact simulation at k_max followed by repeated coarsening.
std::vector<Skeleton> build_hierarchy(const FirstExitLaw& law, int k_min, int k_max, double horizon,
                                      RandomStream& rng, double start_value = 0.0);

struct GridSkeleton {
    Skeleton skeleton;
    /// Grid index at which each jump n = 1..N was detected.
    std::vector<std::size_t> grid_index;
    /// Largest distance by which the grid path had passed the barrier
    /// (last anchor +- 2^-k) when a jump was recorded.
    double max_overshoot = 0.0;
};

/// Sequential barrier detection on a grid path: the first grid time with
/// |path - anchor| >= 2^-k becomes a jump time and the anchor moves by exactly
/// +-2^-k (clamped to the lattice).
GridSkeleton extract_skeleton_from_grid(const GridPath& path, int level);

/// CSV dump with header `n,time,sign,value`; row n = 0 is the start.
void write_skeleton_csv(std::ostream& out, const Skeleton& skeleton);

}  // namespace skelcalc
