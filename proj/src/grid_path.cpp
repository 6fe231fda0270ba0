#include "skelcalc/grid_path.hpp"

#include <cmath>
#include <stdexcept>

namespace skelcalc {

std::size_t GridPath::index_at(double t) const noexcept {
    if (values.empty() || !(t > 0.0)) return 0;
    // Small slack so that t = i * dt computed in floating point lands on i.
    const double x = t / dt * (1.0 + 1e-12);
    const std::size_t last = values.size() - 1;
    if (x >= static_cast<double>(last)) return last;
    return static_cast<std::size_t>(x);
}

GridPath generate_brownian(double dt, double horizon, double y, RandomStream& rng) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::domain_error("generate_brownian: dt must be positive");
    if (!(horizon >= 0.0)) throw std::domain_error("generate_brownian: horizon must be >= 0");
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    GridPath path;
    path.dt = dt;
    path.start_value = y;
    path.values.resize(steps + 1);
    const double sd = std::sqrt(dt);
    double x = y;
    path.values[0] = x;
    for (std::size_t i = 1; i <= steps; ++i) {
        x += sd * rng.normal();
        path.values[i] = x;
    }
    return path;
}

}  // namespace skelcalc
