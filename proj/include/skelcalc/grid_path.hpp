#pragma once

#include <cstddef>
#include <vector>

#include "skelcalc/random_stream.hpp"

namespace skelcalc {

/// A path sampled on the uniform grid t_i = i * dt, i = 0..size()-1.
struct GridPath {
    double dt = 0.0;
    double start_value = 0.0;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double horizon() const noexcept { return values.empty() ? 0.0 : dt * static_cast<double>(values.size() - 1); }
    /// Index of the last grid time <= t (clamped to the grid).
    std::size_t index_at(double t) const noexcept;
    /// Value at the last grid time <= t.
    double at(double t) const noexcept { return values[index_at(t)]; }
};

/// Brownian path: cumulative sum of N(0, dt) increments started at y, on
/// ceil(horizon / dt) steps.
GridPath generate_brownian(double dt, double horizon, double y, RandomStream& rng);

}  // namespace skelcalc
