#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "skelcalc/local_time.hpp"

using namespace skelcalc;

namespace {

const IntensityTable& table() { return default_intensity_table(); }

Skeleton exact(int k, std::uint32_t p, double y = 0.0, double horizon = 1.0) {
    RandomStream rng(123, p);
    return build_skeleton_exact(default_first_exit_law(), k, horizon, rng, y);
}

double cube(double x) { return x * x * x; }

}  // namespace

TEST_CASE("crossing counts conserve jumps and net flow") {
    for (std::uint32_t p = 0; p < 30; ++p) {
        const double y = p % 2 ? 0.25 : -0.5;
        const auto sk = exact(3, p, y, 2.0);
        const auto cc = crossing_counts(sk, 1, 2.0);
        CHECK(cc.total() == static_cast<std::int64_t>(cc.jumps));
        if (!cc.stopped) CHECK(cc.jumps == sk.jump_count());
        const double end = sk.evaluate(cc.stop_time);
        const auto p0 = std::llround(y * 8.0), p1 = std::llround(end * 8.0);
        for (std::size_t i = 0; i < cc.cells(); ++i) {
            const auto j = cc.cell_index(i);
            const std::int64_t net = (p0 < j && j <= p1) ? 1 : (p1 < j && j <= p0) ? -1 : 0;
            REQUIRE(cc.up[i] - cc.down[i] == net);
        }
        if (cc.stopped) CHECK(std::abs(end) == 2.0);
    }
}

TEST_CASE("crossing counts reject starts off the lattice or outside the band") {
    CHECK_THROWS_AS(crossing_counts(exact(3, 0, 0.3), 2, 1.0), std::domain_error);
    CHECK_THROWS_AS(crossing_counts(exact(3, 0, 4.0), 2, 1.0), std::domain_error);
    CHECK_THROWS_AS(crossing_counts(exact(3, 0), 2, 1.5), std::domain_error);
}

TEST_CASE("count rearrangement equals the direct bracket sums") {
    const std::vector<std::function<double(double)>> fs{
        [](double x) { return std::sin(3.0 * x); }, cube, [](double x) { return std::abs(x - 0.125); }};
    for (std::uint32_t p = 0; p < 20; ++p) {
        const auto sk = exact(5, p);
        const auto cc = crossing_counts(sk, 3, 1.0);
        for (const auto& F : fs) {
            const auto [fa, ff] = direct_brackets(F, sk, 3, 1.0);
            REQUIRE(bracket_F_A(F, cc) == doctest::Approx(fa).epsilon(1e-12));
            REQUIRE(bracket_F_F(F, cc) == doctest::Approx(ff).epsilon(1e-12));
            const double st = local_time_stieltjes(local_time_estimate(cc), cell_masses_from_function(F, cc));
            REQUIRE(st == doctest::Approx(fa).epsilon(1e-12));
        }
    }
}

TEST_CASE("cell masses of a step function") {
    const auto sk = exact(4, 2);
    const auto cc = crossing_counts(sk, 3, 1.0);
    const double x0 = 0.3, c = 1.7;
    const auto F = [=](double x) { return x >= x0 ? c : 0.0; };
    const auto a = cell_masses_from_function(F, cc);
    const auto b = cell_masses_from_jumps({{x0, c}}, cc);
    REQUIRE(a.mass.size() == b.mass.size());
    for (std::size_t i = 0; i < a.mass.size(); ++i) REQUIRE(a.mass[i] == b.mass[i]);
}

TEST_CASE("local-time integral") {
    const int k = 4;
    for (std::uint32_t p = 0; p < 10; ++p) {
        const auto sk = exact(k, p);
        CHECK(local_time_integral([](double x) { return x * x; }, sk, table(), 0.8) ==
              doctest::Approx(2.0 * table().angle_bracket(k, 0.8)).epsilon(1e-12));
        CHECK(local_time_integral([](double x) { return 3.0 * x - 1.0; }, sk, table(), 0.8) == 0.0);
        // Matches twice the drift of the decomposition of the same F.
        const auto d = decompose(state_functional("cube", cube), sk, table());
        CHECK(local_time_integral(cube, sk, table(), 1.0) == doctest::Approx(2.0 * d.drift(1.0)).epsilon(1e-12));
        const auto a = decompose(abs_state(), sk, table());
        CHECK(local_time_integral([](double x) { return std::abs(x); }, sk, table(), 0.6) ==
              doctest::Approx(2.0 * a.drift(0.6)).epsilon(1e-12));
    }
}

TEST_CASE("local-time estimate lookup") {
    const auto sk = exact(3, 4);
    const auto cc = crossing_counts(sk, 2, 1.0);
    const auto l = local_time_estimate(cc);
    const double h = 0.125;
    for (std::size_t i = 0; i < cc.cells(); ++i) {
        const double left = h * static_cast<double>(cc.cell_index(i) - 1);
        REQUIRE(l(left + 0.5 * h) == 0.5 * h * static_cast<double>(cc.up[i] + cc.down[i]));
    }
    CHECK(l(100.0) == 0.0);
}

TEST_CASE("Tanaka drift against local time and occupation") {
    LocalTimeOptions opt;
    opt.skeleton.n_paths = 3000;
    opt.skeleton.seed = 5;
    opt.oracle.n_paths = 3000;
    opt.oracle.seed = 6;
    opt.oracle.grid_dt = 1e-4;
    const auto rep = tanaka_check(4, opt, table());
    MESSAGE("N|x| " << rep.drift_abs.mean << ", 2L(0) " << rep.two_l_hat.mean << ", occupation "
                    << rep.occupation.mean << ", normalization " << rep.normalization.mean << " +- "
                    << rep.normalization.std_error);
    const double se = std::hypot(rep.drift_abs.std_error, rep.two_l_hat.std_error);
    CHECK(std::abs(rep.drift_abs.mean - rep.two_l_hat.mean) <= 3.0 * se + 0.0625);
    CHECK(std::abs(rep.normalization.mean - 2.0) <= 4.0 * rep.normalization.std_error + 0.125);
}

TEST_CASE("covariation and energy identities") {
    LocalTimeOptions opt;
    opt.skeleton.n_paths = 1500;
    opt.oracle.n_paths = 1500;
    opt.oracle.seed = 2;
    opt.oracle.grid_dt = 1e-3;
    const auto f = [](double x) { return 3.0 * x * x; };
    const auto cov = covariation_identity_check(cube, f, 3, 5, opt);
    const auto en = energy_identity_check(cube, f, 3, 5, opt);
    REQUIRE(cov.size() == 3);
    for (std::size_t i = 0; i < cov.size(); ++i) {
        const double bias = 2.0 * std::pow(4.0, -cov[i].k);
        CHECK(cov[i].max_rearrangement_error <= 1e-12);
        CHECK(cov[i].stieltjes.mean == doctest::Approx(cov[i].skeleton.mean).epsilon(1e-12));
        CHECK(std::abs(cov[i].skeleton.mean - cov[i].oracle.mean) <=
              4.0 * std::hypot(cov[i].skeleton.std_error, cov[i].oracle.std_error) + bias);
        CHECK(en[i].max_rearrangement_error <= 1e-9);
        CHECK(std::abs(en[i].skeleton.mean - en[i].oracle.mean) <=
              4.0 * std::hypot(en[i].skeleton.std_error, en[i].oracle.std_error) + 30.0 * bias);
    }
}

TEST_CASE("local-time curve is deterministic across workers") {
    LocalTimeOptions opt;
    opt.band = 1;
    opt.skeleton.n_paths = 600;
    opt.skeleton.workers = 1;
    const auto a = local_time_curve(3, opt);
    opt.skeleton.workers = 3;
    const auto b = local_time_curve(3, opt);
    REQUIRE(a.x.size() == 32);
    for (std::size_t i = 0; i < a.x.size(); ++i) REQUIRE(a.l_hat[i].mean == b.l_hat[i].mean);
    // Total expected local time over the band is about t / 2 with this normalization.
    double total = 0.0;
    for (const auto& e : a.l_hat) total += e.mean * 0.125;
    CHECK(total == doctest::Approx(0.5).epsilon(0.05));
}
