#include "skelcalc/first_exit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace skelcalc {
namespace {

constexpr int kMaxTerms = 10000;
constexpr double kPi = std::numbers::pi;
constexpr double kPiSq8 = kPi * kPi / 8.0;

// Tail boundary of the quantile table. Below it the images series is a
// single-term normal tail to ~1e-10 relative accuracy; above 1 - it the
// eigenfunction series is a single exponential to ~1e-17.
constexpr double kTailProbability = 1.0 / 64.0;

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

void check_time(double t) {
    if (!std::isfinite(t) || t < 0.0) throw std::domain_error("first exit law: time must be finite and >= 0");
}

double cdf_images(double t, double tolerance) {
    check_time(t);
    if (t == 0.0) return 0.0;
    const double inv_sqrt_t = 1.0 / std::sqrt(t);
    double sum = 0.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        const double term = normal_upper_tail((2.0 * n + 1.0) * inv_sqrt_t);
        sum += (n % 2 == 0) ? term : -term;
        if (term <= tolerance * std::abs(sum) || term == 0.0) break;
    }
    return 4.0 * sum;
}

}  // namespace

FirstExitLaw::FirstExitLaw(FirstExitOptions options) : options_(options) {
    if (!(options_.series_tolerance > 0.0)) throw std::invalid_argument("series_tolerance must be positive");
    if (!(options_.crossover_time > 0.0)) throw std::invalid_argument("crossover_time must be positive");
    if (options_.table_points < 2) throw std::invalid_argument("table_points must be >= 2");

    table_lo_ = kTailProbability;
    table_hi_ = 1.0 - kTailProbability;
    const std::size_t n = options_.table_points;
    table_step_ = (table_hi_ - table_lo_) / static_cast<double>(n - 1);
    table_time_.resize(n);
    table_slope_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = table_lo_ + table_step_ * static_cast<double>(i);
        const double t = quantile(u);
        table_time_[i] = t;
        table_slope_[i] = 1.0 / density(t);
    }
}

double FirstExitLaw::survival_eigen(double t) const {
    check_time(t);
    if (t == 0.0) return 1.0;
    double sum = 0.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        const double m = 2.0 * n + 1.0;
        const double term = std::exp(-m * m * kPiSq8 * t) / m;
        sum += (n % 2 == 0) ? term : -term;
        if (term <= options_.series_tolerance * std::abs(sum)) break;
    }
    return 4.0 / kPi * sum;
}

double FirstExitLaw::survival_images(double t) const { return 1.0 - cdf_images(t, options_.series_tolerance); }

double FirstExitLaw::density_eigen(double t) const {
    check_time(t);
    if (t == 0.0) throw std::domain_error("first exit density: t must be > 0");
    double sum = 0.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        const double m = 2.0 * n + 1.0;
        const double term = m * std::exp(-m * m * kPiSq8 * t);
        sum += (n % 2 == 0) ? term : -term;
        if (term <= options_.series_tolerance * std::abs(sum)) break;
    }
    return 0.5 * kPi * sum;
}

double FirstExitLaw::density_images(double t) const {
    check_time(t);
    if (t == 0.0) throw std::domain_error("first exit density: t must be > 0");
    double sum = 0.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        const double m = 2.0 * n + 1.0;
        const double term = m * std::exp(-m * m / (2.0 * t));
        sum += (n % 2 == 0) ? term : -term;
        if (term <= options_.series_tolerance * std::abs(sum) || term == 0.0) break;
    }
    return std::sqrt(2.0 / kPi) * std::pow(t, -1.5) * sum;
}

double FirstExitLaw::survival(double t) const {
    check_time(t);
    return t < options_.crossover_time ? survival_images(t) : survival_eigen(t);
}

double FirstExitLaw::cdf(double t) const {
    check_time(t);
    return t < options_.crossover_time ? cdf_images(t, options_.series_tolerance) : 1.0 - survival_eigen(t);
}

double FirstExitLaw::density(double t) const {
    check_time(t);
    if (t == 0.0) throw std::domain_error("first exit density: t must be > 0");
    return t < options_.crossover_time ? density_images(t) : density_eigen(t);
}

double FirstExitLaw::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("first exit quantile: p must lie in (0, 1)");
    // Residual is written on the side that is computed without cancellation.
    const bool upper = p > 0.5;
    const double target = upper ? 1.0 - p : p;
    auto residual = [&](double t) { return upper ? target - survival(t) : cdf(t) - target; };

    double lo = 1e-4;
    double hi = 200.0;
    double t;
    if (p < kTailProbability) {
        const double z = std::numbers::sqrt2 * boost::math::erfc_inv(p / 2.0);
        t = 1.0 / (z * z);
    } else if (upper && target < kTailProbability) {
        t = std::log(4.0 / (kPi * target)) / kPiSq8;
    } else {
        t = 1.0;
    }
    t = std::clamp(t, lo, hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double r = residual(t);
        if (r == 0.0) return t;
        if (r > 0.0) hi = t; else lo = t;
        double next = t - r / density(t);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 * t) return next;
        t = next;
    }
    return t;
}

double FirstExitLaw::quantile_fast(double u) const {
    if (u < table_lo_) {
        const double z = std::numbers::sqrt2 * boost::math::erfc_inv(u / 2.0);
        return 1.0 / (z * z);
    }
    if (u > table_hi_) {
        return std::log(4.0 / (kPi * (1.0 - u))) / kPiSq8;
    }
    const double x = (u - table_lo_) / table_step_;
    auto i = static_cast<std::size_t>(x);
    if (i >= table_time_.size() - 1) i = table_time_.size() - 2;
    const double s = x - static_cast<double>(i);
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * table_time_[i] + h01 * table_time_[i + 1] +
           table_step_ * (h10 * table_slope_[i] + h11 * table_slope_[i + 1]);
}

const FirstExitLaw& default_first_exit_law() {
    static const FirstExitLaw law;
    return law;
}

}  // namespace skelcalc
