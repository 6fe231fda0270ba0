#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "skelcalc/clark_ocone.hpp"

using namespace skelcalc;

namespace {

const IntensityTable& table() { return default_intensity_table(); }

Skeleton exact(int k, std::uint32_t p, double y = 0.0) {
    RandomStream rng(77, p);
    return build_skeleton_exact(default_first_exit_law(), k, 1.0, rng, y);
}

}  // namespace

TEST_CASE("identity terminal: the density is h^k after the first jump") {
    const int k = 4;
    for (std::uint32_t p = 0; p < 10; ++p) {
        const auto sk = exact(k, p);
        const auto d = clark_ocone_density(identity_terminal(1.0), sk, table());
        for (double t : {0.01, 0.2, 0.5, 0.93}) {
            const double expect = t < sk.time(1) ? 0.0 : table().h(k, t);
            REQUIRE(d.evaluate(t) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("square terminal density ratio") {
    const int k = 3;
    const auto sk = exact(k, 5, 0.25);
    const auto d = clark_ocone_density(square_terminal(1.0), sk, table());
    for (std::size_t n = 1; n <= sk.jump_count(); ++n) {
        const double a1 = sk.value(n), a0 = sk.value(n - 1);
        const double expect = (a1 * a1 - a0 * a0 - (sk.time(n) - sk.time(n - 1))) / (a1 - a0);
        REQUIRE(d.ratio.post_jump_values[n - 1] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("density needs a closed-form conditional") {
    const auto sk = exact(3, 0);
    CHECK_THROWS_AS(clark_ocone_density(square_state(), sk, table()), UsageError);
    CHECK_THROWS_AS(clark_ocone_density(fbm_sin(0.75), sk, table()), UsageError);
    CHECK_NOTHROW(clark_ocone_density(first_passage(0.5), sk, table()));
}

TEST_CASE("density curve against 2 B_t for B_T^2") {
    SimulationOptions opt;
    opt.seed = 9;
    opt.n_paths = 600;
    opt.engine = Engine::Grid;
    opt.grid_dt = 1e-3;
    const std::vector<double> ts{0.25, 0.5, 0.75};
    const auto pts = density_curve(square_terminal(1.0), 4, ts, opt, table(), [](double x) { return 2.0 * x; });
    REQUIRE(pts.size() == ts.size());
    for (const auto& pt : pts) {
        // The level-4 density tracks 2 B_t within the lattice spacing.
        CHECK(std::abs(pt.difference.mean) <= 3.0 * pt.difference.std_error + 0.0625);
        CHECK(std::abs(pt.density.mean) <= 3.0 * pt.density.std_error + 0.0625);
    }
}

TEST_CASE("representation residual shrinks with k") {
    SimulationOptions opt;
    opt.seed = 3;
    opt.n_paths = 400;
    opt.engine = Engine::Grid;
    opt.grid_dt = 1e-4;
    const auto r2 = representation_residual(square_terminal(1.0), 2, opt, table());
    const auto r5 = representation_residual(square_terminal(1.0), 5, opt, table());
    MESSAGE("Var(R)/Var(F): k=2 " << r2.variance_ratio.mean << ", k=5 " << r5.variance_ratio.mean);
    CHECK(r5.variance_ratio.mean < r2.variance_ratio.mean);
    CHECK(r5.variance_ratio.mean < 0.1);
    CHECK(std::abs(r5.integral_mean.mean) <= 4.0 * r5.integral_mean.std_error);
    const auto c = representation_residual(martingale_terminal("one", [](double) { return 1.0; }, 1.0), 3, opt,
                                           table());
    CHECK(c.variance_ratio.mean == 0.0);
    CHECK(c.integral_mean.mean == 0.0);
    opt.engine = Engine::Exact;
    CHECK_THROWS_AS(representation_residual(square_terminal(1.0), 3, opt, table()), UsageError);
}

TEST_CASE("ratio estimate") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y{2.0, 4.0, 6.0, 8.0};
    const auto r = ratio_estimate(x, y);
    CHECK(r.mean == doctest::Approx(0.5));
    CHECK(r.std_error == doctest::Approx(0.0).epsilon(1e-12));
}
