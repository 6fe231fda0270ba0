#include "skelcalc/fbm.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "skelcalc/quadrature.hpp"

namespace skelcalc {
namespace {

constexpr std::size_t kTableCells = 1 << 14;

}  // namespace

VolterraKernel::VolterraKernel(double hurst, double dt, std::size_t steps)
    : hurst_(hurst), a_(hurst - 0.5), dt_(dt), steps_(steps) {
    if (!(hurst > 0.5 && hurst < 1.0)) throw std::domain_error("VolterraKernel: H must lie in (1/2, 1)");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::domain_error("VolterraKernel: dt must be > 0");
    if (steps == 0) throw std::domain_error("VolterraKernel: need at least one step");

    // Largest argument: s = dt/2, t = max(steps, 1/dt) dt.
    const double t_top = std::max(static_cast<double>(steps), std::ceil(1.0 / dt)) * dt;
    const double x_max = std::pow((t_top - 0.5 * dt) / (0.5 * dt), a_) * 1.0001;
    x_step_ = x_max / static_cast<double>(kTableCells);
    const auto rule = gauss_legendre(64);
    auto g = [&](double w) { return std::pow(1.0 + std::pow(w, 1.0 / a_), a_); };
    g_.assign(kTableCells + 1, 0.0);
    dg_.assign(kTableCells + 1, 0.0);
    for (std::size_t i = 0; i <= kTableCells; ++i) dg_[i] = g(x_step_ * static_cast<double>(i));
    for (std::size_t i = 0; i < kTableCells; ++i) {
        const double lo = x_step_ * static_cast<double>(i);
        double cell = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) cell += rule.weights[q] * g(lo + 0.5 * x_step_ * (rule.nodes[q] + 1.0));
        g_[i + 1] = g_[i] + 0.5 * x_step_ * cell;
    }

    // Unit variance at t = 1 for the midpoint discretization.
    const auto n1 = static_cast<std::size_t>(std::llround(1.0 / dt));
    double var = 0.0;
    for (std::size_t j = 0; j < n1; ++j) {
        const double k = kernel_unit(static_cast<double>(n1) * dt, (static_cast<double>(j) + 0.5) * dt);
        var += k * k * dt;
    }
    c_ = 1.0 / std::sqrt(var);

    tri_.resize(steps_ * (steps_ + 1) / 2);
    for (std::size_t i = 1; i <= steps_; ++i) {
        const double t = static_cast<double>(i) * dt;
        double* row = &tri_[i * (i - 1) / 2];
        for (std::size_t j = 0; j < i; ++j) row[j] = c_ * kernel_unit(t, (static_cast<double>(j) + 0.5) * dt);
    }
}

double VolterraKernel::G(double x) const {
    const double u = x / x_step_;
    auto i = static_cast<std::size_t>(u);
    if (i >= kTableCells) i = kTableCells - 1;
    const double s = u - static_cast<double>(i);
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * g_[i] + (-2 * s3 + 3 * s2) * g_[i + 1] +
           x_step_ * ((s3 - 2 * s2 + s) * dg_[i] + (s3 - s2) * dg_[i + 1]);
}

double VolterraKernel::kernel_unit(double t, double s) const {
    if (!(s > 0.0) || !(t > s)) return 0.0;
    return std::pow(s, a_) / a_ * G(std::pow((t - s) / s, a_));
}

double VolterraKernel::operator()(double t, double s) const { return c_ * kernel_unit(t, s); }

GridPath VolterraKernel::apply(const GridPath& brownian) const {
    if (brownian.size() < 2) throw std::domain_error("build_fbm: path needs at least one step");
    if (brownian.size() - 1 > steps_) throw std::domain_error("build_fbm: path longer than the kernel grid");
    if (std::abs(brownian.dt - dt_) > 1e-12 * dt_) throw std::domain_error("build_fbm: dt mismatch");
    const std::size_t n = brownian.size() - 1;
    std::vector<double> db(n);
    for (std::size_t j = 0; j < n; ++j) db[j] = brownian.values[j + 1] - brownian.values[j];
    GridPath out;
    out.dt = dt_;
    out.start_value = 0.0;
    out.values.assign(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double* row = &tri_[i * (i - 1) / 2];
        double s0 = 0.0, s1 = 0.0;
        std::size_t j = 0;
        for (; j + 2 <= i; j += 2) {
            s0 += row[j] * db[j];
            s1 += row[j + 1] * db[j + 1];
        }
        if (j < i) s0 += row[j] * db[j];
        out.values[i] = s0 + s1;
    }
    return out;
}

std::shared_ptr<const VolterraKernel> volterra_kernel(double hurst, double dt, std::size_t steps) {
    static std::mutex mutex;
    static std::map<std::tuple<double, double, std::size_t>, std::shared_ptr<const VolterraKernel>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{hurst, dt, steps}];
    if (!slot) {
        // One large kernel at a time keeps memory bounded.
        for (auto it = cache.begin(); it != cache.end();) {
            if (it->second && it->second.use_count() == 1) it = cache.erase(it);
            else ++it;
        }
        slot = std::make_shared<const VolterraKernel>(hurst, dt, steps);
    }
    return slot;
}

GridPath build_fbm(const GridPath& path, double hurst) {
    if (!(hurst > 0.5 && hurst < 1.0)) throw std::domain_error("build_fbm: H must lie in (1/2, 1)");
    if (path.size() < 2) throw std::domain_error("build_fbm: path needs at least one step");
    return volterra_kernel(hurst, path.dt, path.size() - 1)->apply(path);
}

}  // namespace skelcalc
