#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace skelcalc {

/// Raised when inputs are individually valid but belong to a regime the
/// requested operation does not support (e.g. a GridPath-only functional
/// evaluated on a skeleton).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Monte Carlo estimate: sample count, mean and standard error of the mean.
struct Estimate {
    std::size_t n = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

/// Two-pass mean / standard error. Summation order is the input order, so a
/// fixed-order input gives bit-identical results.
Estimate estimate_of(std::span<const double> samples);

/// Estimate of E[a - b] from paired samples.
Estimate paired_difference(std::span<const double> a, std::span<const double> b);

/// |a.mean - b.mean| <= z * sqrt(a.se^2 + b.se^2) for independent estimates.
inline bool agree_within(const Estimate& a, const Estimate& b, double z) {
    return std::abs(a.mean - b.mean) <= z * std::hypot(a.std_error, b.std_error);
}

/// Exact power of two 2^e for integer e (dyadic lattice spacing is 2^-k).
inline double pow2(int e) { return std::ldexp(1.0, e); }

}  // namespace skelcalc
