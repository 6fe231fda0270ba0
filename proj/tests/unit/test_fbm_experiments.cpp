#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "skelcalc/fbm_experiments.hpp"

using namespace skelcalc;

namespace {

SimulationOptions small_grid(std::size_t paths) {
    SimulationOptions opt;
    opt.seed = 21;
    opt.n_paths = paths;
    opt.grid_dt = 1.0 / 2048.0;
    return opt;
}

}  // namespace

TEST_CASE("constant f gives zero everywhere") {
    const auto rows = fbm_scan([](double) { return 2.0; }, 0.75, 2, 4, small_grid(20));
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.e2_raw.mean == 0.0);
        CHECK(r.projection_gap.mean == 0.0);
        CHECK(r.martingale_mean.mean == 0.0);
    }
}

TEST_CASE("H out of range") {
    const auto f = [](double x) { return std::sin(x); };
    CHECK_THROWS_AS(fbm_scan(f, 0.5, 2, 3, small_grid(2)), std::domain_error);
    CHECK_THROWS_AS(fbm_energy_scan(f, 1.0, 2, 3, small_grid(2)), std::domain_error);
    CHECK_THROWS_AS(fbm_projection_convergence(f, 0.3, 2, 3, small_grid(2)), std::domain_error);
}

TEST_CASE("sine at H = 0.75 decreases across levels") {
    const auto rows = fbm_scan([](double x) { return std::sin(x); }, 0.75, 2, 4, small_grid(300));
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        MESSAGE("k=" << rows[i].k << " e2 " << rows[i].e2_raw.mean << " gap " << rows[i].projection_gap.mean
                     << " M2 " << rows[i].martingale_second_moment.mean);
        CHECK(rows[i].e2_decrease.mean > 2.0 * rows[i].e2_decrease.std_error);
        CHECK(rows[i].gap_decrease.mean > 2.0 * rows[i].gap_decrease.std_error);
        CHECK(rows[i].martingale_second_moment.mean > rows[i + 1].martingale_second_moment.mean);
    }
}

TEST_CASE("linear f near H = 1/2 approaches the Brownian energy") {
    const auto rows = fbm_energy_scan([](double x) { return x; }, 0.51, 3, 3, small_grid(300));
    CHECK(rows[0].e2_raw.mean == doctest::Approx(1.0).epsilon(0.15));
    CHECK(rows[0].projection_gap.n == 0);
}

TEST_CASE("worker count does not change the table") {
    auto opt = small_grid(40);
    opt.workers = 1;
    const auto a = fbm_scan([](double x) { return std::sin(x); }, 0.7, 2, 3, opt);
    opt.workers = 4;
    const auto b = fbm_scan([](double x) { return std::sin(x); }, 0.7, 2, 3, opt);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].e2_raw.mean == b[i].e2_raw.mean);
        CHECK(a[i].projection_gap.mean == b[i].projection_gap.mean);
    }
}
