// Monte Carlo estimate of P(tau > 1) for the exit of a Brownian motion from
// [-1, 1]: Gaussian grid walk with a Brownian-bridge crossing test in every
// cell. Run once; the printed value is frozen in test_first_exit.cpp.
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "skelcalc/random_stream.hpp"

int main(int argc, char** argv) {
    const long n_paths = argc > 1 ? std::atol(argv[1]) : 10000000L;
    const int steps = argc > 2 ? std::atoi(argv[2]) : 100;
    const double dt = 1.0 / steps;
    const double sd = std::sqrt(dt);
    long survived = 0;
    for (long p = 0; p < n_paths; ++p) {
        skelcalc::RandomStream rng(20240917u, static_cast<std::uint32_t>(p));
        double x = 0.0;
        bool alive = true;
        for (int i = 0; i < steps && alive; ++i) {
            const double y = x + sd * rng.normal();
            if (std::abs(y) >= 1.0) {
                alive = false;
                break;
            }
            const double up = std::exp(-2.0 * (1.0 - x) * (1.0 - y) / dt);
            const double down = std::exp(-2.0 * (1.0 + x) * (1.0 + y) / dt);
            if (rng.uniform_open() < up + down) alive = false;
            x = y;
        }
        survived += alive;
    }
    const double s = static_cast<double>(survived) / static_cast<double>(n_paths);
    const double se = std::sqrt(s * (1.0 - s) / static_cast<double>(n_paths));
    std::printf("n=%ld steps=%d S(1)=%.6f se=%.6f\n", n_paths, steps, s, se);
}
