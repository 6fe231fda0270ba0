#include "skelcalc/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skelcalc/common.hpp"
#include "skelcalc/csv.hpp"

namespace skelcalc {
namespace {

void check_time(double t) {
    if (!std::isfinite(t) || t < 0.0) throw std::domain_error("intensity: time must be finite and >= 0");
}

// sum_{j=1}^{n} a[j] * b[n + 1 - j]; four accumulators so the loop vectorizes
// without reassociation flags.
double convolve(const double* a, const double* b_rev, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        s0 += a[j] * b_rev[j];
        s1 += a[j + 1] * b_rev[j + 1];
        s2 += a[j + 2] * b_rev[j + 2];
        s3 += a[j + 3] * b_rev[j + 3];
    }
    for (; j < n; ++j) s0 += a[j] * b_rev[j];
    return (s0 + s1) + (s2 + s3);
}

}  // namespace

IntensityTable::IntensityTable(double ds, std::vector<double> u) : ds_(ds), u_(std::move(u)) {
    if (!(ds_ > 0.0) || !std::isfinite(ds_)) throw std::domain_error("IntensityTable: ds must be > 0");
    if (u_.size() < 2) throw std::domain_error("IntensityTable: need at least two grid points");
    cum_.resize(u_.size());
    cum_[0] = 0.0;
    for (std::size_t i = 1; i < u_.size(); ++i) cum_[i] = cum_[i - 1] + 0.5 * ds_ * (u_[i - 1] + u_[i]);
}

double IntensityTable::u(double s) const {
    check_time(s);
    const double x = s / ds_;
    if (x >= static_cast<double>(u_.size() - 1)) return 1.0;
    const auto i = static_cast<std::size_t>(x);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * u_[i] + w * u_[i + 1];
}

double IntensityTable::cumulative(double s) const {
    check_time(s);
    const double x = s / ds_;
    const auto last = u_.size() - 1;
    if (x >= static_cast<double>(last)) return cum_[last] + (s - s_max());
    const auto i = static_cast<std::size_t>(x);
    const double w = x - static_cast<double>(i);
    // Integral of the linear interpolant over [s_i, s_i + w ds].
    return cum_[i] + ds_ * w * (u_[i] + 0.5 * w * (u_[i + 1] - u_[i]));
}

double IntensityTable::h(int k, double t) const { return u(pow2(2 * k) * t); }

double IntensityTable::angle_bracket(int k, double t) const {
    return pow2(-2 * k) * cumulative(pow2(2 * k) * t);
}

void IntensityTable::write_csv(std::ostream& out, std::size_t stride) const {
    if (stride == 0) stride = 1;
    out << "s,u,cumulative\n";
    for (std::size_t i = 0; i < u_.size(); i += stride) {
        out << format_double(ds_ * static_cast<double>(i)) << ',' << format_double(u_[i]) << ','
            << format_double(cum_[i]) << '\n';
    }
}

IntensityTable solve_renewal_density(const FirstExitLaw& law, double s_max, double ds) {
    if (!(ds > 0.0) || !std::isfinite(ds)) throw std::domain_error("solve_renewal_density: ds must be > 0");
    if (ds > 1e-3) throw std::domain_error("solve_renewal_density: ds must be <= 1e-3");
    if (!(s_max >= 20.0) || !std::isfinite(s_max)) throw std::domain_error("solve_renewal_density: s_max must be >= 20");
    const auto m = static_cast<std::size_t>(std::llround(s_max / ds));
    std::vector<double> p(m + 1), u(m + 1, 0.0);
    for (std::size_t i = 1; i <= m; ++i) p[i] = law.density(ds * static_cast<double>(i));
    // p reversed so the convolution walks both arrays forwards.
    std::vector<double> p_rev(m + 1);
    for (std::size_t i = 0; i <= m; ++i) p_rev[i] = p[m - i];
    for (std::size_t i = 1; i <= m; ++i) {
        // sum_{j=1}^{i-1} u_j p_{i-j}, with p_{i-j} = p_rev[m - i + j].
        const double conv = i > 1 ? convolve(&u[1], &p_rev[m - i + 1], i - 1) : 0.0;
        u[i] = p[i] + ds * conv;
    }
    return IntensityTable(ds, std::move(u));
}

const IntensityTable& default_intensity_table() {
    static const IntensityTable table = solve_renewal_density(FirstExitLaw{});
    return table;
}

}  // namespace skelcalc
