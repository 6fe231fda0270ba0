#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "skelcalc/common.hpp"
#include "skelcalc/intensity.hpp"
#include "skelcalc/skeleton.hpp"

using namespace skelcalc;

namespace {

const FirstExitLaw& law() {
    static const FirstExitLaw instance;
    return instance;
}

double sup_gap(const IntensityTable& table, int k) {
    double sup = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double t = i / 20000.0;
        sup = std::max(sup, std::abs(table.angle_bracket(k, t) - t));
    }
    return sup;
}

}  // namespace

TEST_CASE("renewal density boundary behaviour") {
    const auto& table = default_intensity_table();
    CHECK(table.s_max() == doctest::Approx(50.0));
    CHECK(table.u(0.0) == 0.0);
    CHECK(table.u_values().front() == 0.0);
    CHECK(std::abs(table.u_values().back() - 1.0) <= 1e-3);
    for (double v : table.u_values()) REQUIRE(v >= 0.0);
    const auto& c = table.cumulative_values();
    for (std::size_t i = 1; i < c.size(); ++i) REQUIRE(c[i] >= c[i - 1]);
}

TEST_CASE("renewal function offset matches a Monte Carlo renewal count") {
    const auto& table = default_intensity_table();
    const double c0 = 40.0 - table.cumulative(40.0);
    MESSAGE("c0 = " << c0);
    CHECK(c0 == doctest::Approx(40.0 - table.cumulative(30.0) - 10.0).epsilon(1e-9));
    // Mean number of renewals by s = 10 on the level-0 time scale.
    std::vector<double> counts(100000);
    for (std::uint32_t p = 0; p < counts.size(); ++p) {
        RandomStream rng(21, p);
        counts[p] = static_cast<double>(build_skeleton_exact(law(), 0, 10.0, rng).jump_count());
    }
    const auto e = estimate_of(counts);
    CHECK(std::abs(e.mean - (10.0 - c0)) <= 3.0 * e.std_error);
    CHECK(std::abs(e.mean - 10.0) > 3.0 * e.std_error);
}

TEST_CASE("level-k intensity") {
    const auto& table = default_intensity_table();
    const double c0 = 40.0 - table.cumulative(40.0);
    for (int k : {0, 2, 4, 6, 8}) {
        CAPTURE(k);
        CHECK(table.h(k, 0.0) == 0.0);
        CHECK(table.angle_bracket(k, 0.0) == 0.0);
        for (double t : {20.0 * pow2(-2 * k), 25.0 * pow2(-2 * k), 1.0})
            if (t >= 20.0 * pow2(-2 * k)) CHECK(std::abs(table.h(k, t) - 1.0) <= 1e-3);
        CHECK(std::abs(table.angle_bracket(k, 1.0) - 1.0) <= std::max(1e-3, 1.01 * c0 * pow2(-2 * k)));
    }
    double prev = table.angle_bracket(3, 0.0);
    for (int i = 1; i <= 1000; ++i) {
        const double v = table.angle_bracket(3, i / 1000.0);
        REQUIRE(v >= prev);
        prev = v;
    }
    const double g2 = sup_gap(table, 2), g4 = sup_gap(table, 4), g6 = sup_gap(table, 6);
    CHECK(g2 > g4);
    CHECK(g4 > g6);
    CHECK_THROWS_AS(table.h(2, -1.0), std::domain_error);
    CHECK_THROWS_AS(table.angle_bracket(2, std::nan("")), std::domain_error);
}

TEST_CASE("cumulative integrates the interpolant exactly") {
    const auto& table = default_intensity_table();
    // Fine midpoint rule on the piecewise-linear u converges to the closed form.
    const double a = 0.1234, b = 0.9876;
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += table.u(a + (b - a) * (i + 0.5) / n);
    sum *= (b - a) / n;
    CHECK(table.cumulative(b) - table.cumulative(a) == doctest::Approx(sum).epsilon(1e-9));
    CHECK(table.angle_increment(3, 0.2, 0.7) == doctest::Approx(table.angle_bracket(3, 0.7) - table.angle_bracket(3, 0.2)));
}

TEST_CASE("compensator: mean scaled jump count matches the angle bracket") {
    const auto& table = default_intensity_table();
    const int k = 2;
    const std::vector<double> ts{0.1, 0.5, 1.0};
    std::vector<std::vector<double>> scaled(ts.size(), std::vector<double>(20000));
    for (std::uint32_t p = 0; p < 20000; ++p) {
        RandomStream rng(22, p);
        const auto sk = build_skeleton_exact(law(), k, 1.0, rng);
        for (std::size_t i = 0; i < ts.size(); ++i)
            scaled[i][p] = pow2(-2 * k) * static_cast<double>(sk.interval_index(ts[i]));
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto e = estimate_of(scaled[i]);
        CAPTURE(ts[i]);
        CHECK(std::abs(e.mean - table.angle_bracket(k, ts[i])) <= 3.0 * e.std_error);
    }
}

TEST_CASE("solver argument checks and csv") {
    CHECK_THROWS_AS(solve_renewal_density(law(), 50.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(solve_renewal_density(law(), 50.0, -1e-4), std::domain_error);
    CHECK_THROWS_AS(solve_renewal_density(law(), 10.0, 5e-4), std::domain_error);
    const auto small = solve_renewal_density(law(), 20.0, 1e-3);
    CHECK(std::abs(small.u(20.0) - 1.0) <= 1e-3);
    std::ostringstream os;
    small.write_csv(os, 10000);
    CHECK(os.str().rfind("s,u,cumulative\n0,0,0\n", 0) == 0);
}
