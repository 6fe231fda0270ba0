#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "skelcalc/common.hpp"
#include "skelcalc/projection.hpp"

using namespace skelcalc;

namespace {

const IntensityTable& table() { return default_intensity_table(); }

Skeleton exact(int k, std::uint32_t p, double y = 0.0, std::uint64_t seed = 41) {
    RandomStream rng(seed, p);
    return build_skeleton_exact(default_first_exit_law(), k, 1.0, rng, y);
}

}  // namespace

TEST_CASE("delta projection regimes") {
    const auto sk = exact(5, 0, 0.25);
    const auto sq = delta_projection(square_state(), sk);
    const auto id = delta_projection(identity_terminal(1.0), sk);
    const auto a = sk.to_step_process();
    CHECK(sq.initial_value == 0.0625);
    CHECK(id.initial_value == 0.25);
    for (std::size_t n = 1; n <= sk.jump_count(); ++n) {
        REQUIRE(sq.post_jump_values[n - 1] == sk.value(n) * sk.value(n));
        REQUIRE(id.post_jump_values[n - 1] == a.post_jump_values[n - 1]);
    }
    const auto fp = delta_projection(first_passage(0.5), exact(5, 1));
    CHECK(fp.initial_value == 0.25);
    CHECK_THROWS_AS(delta_projection(fbm_sin(0.75), sk), UsageError);
    CHECK_THROWS_AS(delta_projection(identity_terminal(0.5), sk), UsageError);
    CHECK_THROWS_AS(delta_projection(first_passage(0.3), sk), UsageError);
}

TEST_CASE("first-passage projection freezes at the passage time") {
    const double alpha = 0.25;
    for (std::uint32_t p = 0; p < 20; ++p) {
        const auto sk = exact(4, p);
        const auto dx = delta_projection(first_passage(alpha), sk);
        const double ta = first_passage_time(sk, alpha);
        for (std::size_t n = 1; n <= sk.jump_count(); ++n) {
            const double v = dx.post_jump_values[n - 1];
            if (sk.time(n) < ta) REQUIRE(v == doctest::Approx(sk.time(n) + alpha * alpha - sk.value(n) * sk.value(n)));
            else REQUIRE(v == doctest::Approx(ta));
        }
    }
}

TEST_CASE("first-passage: exit formula is a martingale, the displayed increments are not") {
    const int k = 4;
    const double alpha = 0.5;
    std::vector<double> exit_incr, shown_incr;
    for (std::uint32_t p = 0; p < 4000; ++p) {
        const auto sk = exact(k, p, 0.0, 42);
        const auto dx = delta_projection(first_passage(alpha), sk);
        const auto shown = first_passage_displayed(sk, alpha);
        const double ta = first_passage_time(sk, alpha);
        // Increments at jumps strictly before the passage, one per path so
        // the samples are independent.
        if (sk.jump_count() >= 3 && sk.time(3) < ta) {
            exit_incr.push_back(dx.post_jump_values[2] - dx.post_jump_values[1]);
            shown_incr.push_back(shown.post_jump_values[2] - shown.post_jump_values[1]);
        }
    }
    const auto e = estimate_of(exit_incr);
    const auto s = estimate_of(shown_incr);
    MESSAGE("exit-formula increment mean " << e.mean << " +- " << e.std_error << ", displayed " << s.mean << " +- "
                                           << s.std_error);
    CHECK(std::abs(e.mean) <= 3.0 * e.std_error);
    CHECK(s.mean > 10.0 * s.std_error);
}

TEST_CASE("stochastic derivative") {
    const auto sk = exact(4, 3, 0.5);
    const auto db = stochastic_derivative(delta_projection(identity_terminal(1.0), sk), sk, table());
    const auto dc = stochastic_derivative(delta_projection(constant_state(3.0), sk), sk, table());
    const auto ds = stochastic_derivative(delta_projection(square_state(), sk), sk, table());
    for (std::size_t n = 1; n <= sk.jump_count(); ++n) {
        REQUIRE(db.ratio.post_jump_values[n - 1] == 1.0);
        REQUIRE(dc.ratio.post_jump_values[n - 1] == 0.0);
        REQUIRE(ds.ratio.post_jump_values[n - 1] == 2.0 * sk.value(n - 1) + sk.sign(n) * sk.spacing());
    }
    CHECK(db.evaluate(0.0) == 0.0);
    for (double t : {0.3, 0.6, 0.9})
        if (t >= sk.time(1)) CHECK(db.evaluate(t) == table().h(4, t));
    CHECK(dc.evaluate(0.5) == 0.0);
    CHECK(db.integral(sk.time(1), 1.0) == doctest::Approx(table().angle_increment(4, sk.time(1), 1.0)).epsilon(1e-12));
}

TEST_CASE("drift kernel for state functionals") {
    const auto sk = exact(6, 4);
    for (double u : drift_kernel_state(square_state().fn, sk)) REQUIRE(u == 1.0);
    for (double u : drift_kernel_state(linear_state(2.5, 1.0).fn, sk)) REQUIRE(u == 0.0);
    const auto ua = drift_kernel_state(abs_state().fn, sk);
    for (std::size_t n = 0; n <= sk.jump_count(); ++n) REQUIRE(ua[n] == (sk.value(n) == 0.0 ? 64.0 : 0.0));
}

TEST_CASE("decomposition of the square") {
    const int k = 6;
    const auto sk = exact(k, 5);
    const auto d = decompose(square_state(), sk, table());
    for (double t : {0.0, 0.1, 0.37, 0.8, 1.0}) {
        CHECK(d.drift(t) == doctest::Approx(table().angle_bracket(k, t)).epsilon(1e-13));
        const double a = sk.evaluate(t);
        CHECK(d.martingale(t) == doctest::Approx(a * a - table().angle_bracket(k, t)).epsilon(1e-12).scale(1.0));
    }
    for (std::size_t n = 0; n <= sk.jump_count(); ++n) {
        const double lhs = n == 0 ? d.delta_x.initial_value : d.delta_x.post_jump_values[n - 1];
        REQUIRE(std::abs(lhs - (d.x0 + d.martingale_at_jumps[n] + d.drift_at_jumps[n])) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("decomposition identity across regimes") {
    const std::vector<Functional> fs{square_state(), abs_state(), linear_state(-1.5, 0.25), identity_terminal(1.0),
                                     square_terminal(1.0), first_passage(0.5),
                                     martingale_terminal("cos", [](double x) { return std::cos(x); }, 1.0)};
    for (const auto& f : fs) {
        CAPTURE(f.name);
        for (std::uint32_t p = 0; p < 5; ++p) {
            const auto sk = exact(5, 100 + p);
            const auto d = decompose(f, sk, table());
            for (std::size_t n = 0; n <= sk.jump_count(); ++n) {
                const double lhs = n == 0 ? d.delta_x.initial_value : d.delta_x.post_jump_values[n - 1];
                const double rhs = d.x0 + d.martingale(sk.time(n)) + d.drift(sk.time(n));
                REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
            }
            if (f.kind != FunctionalKind::State)
                for (double v : d.drift_at_jumps) REQUIRE(v == 0.0);
        }
    }
    const auto lin = decompose(linear_state(1.0), exact(5, 7, 0.5), table());
    CHECK(lin.drift(1.0) == 0.0);
    CHECK(lin.martingale(1.0) == doctest::Approx(lin.delta_x.evaluate(1.0) - 0.5));
}

TEST_CASE("martingale part is centred") {
    std::vector<double> m(3000);
    for (std::uint32_t p = 0; p < m.size(); ++p) m[p] = decompose(square_state(), exact(5, p, 0.0, 43), table()).martingale(1.0);
    const auto e = estimate_of(m);
    CHECK(std::abs(e.mean) <= 3.0 * e.std_error);
}

TEST_CASE("bracket symmetry and bilinearity") {
    const auto sk = exact(5, 8);
    const auto x = delta_projection(square_state(), sk);
    const auto y = delta_projection(abs_state(), sk);
    auto x4 = x;
    for (auto& v : x4.post_jump_values) v *= 4.0;
    x4.initial_value *= 4.0;
    CHECK(bracket(x, y, 1.0) == bracket(y, x, 1.0));
    CHECK(bracket(x4, y, 1.0) == 4.0 * bracket(x, y, 1.0));
    CHECK(bracket(x, x, 1.0) == step_energy(x, 1.0));
}

TEST_CASE("tower consistency of martingale-terminal projections across levels") {
    RandomStream rng(44, 0);
    const auto levels = build_hierarchy(default_first_exit_law(), 3, 4, 1.0, rng);
    const auto f = martingale_terminal("cos", [](double x) { return std::cos(x); }, 1.0);
    const auto coarse = delta_projection(f, levels[0]);
    const auto fine = delta_projection(f, levels[1]);
    for (std::size_t n = 1; n <= levels[0].jump_count(); ++n)
        REQUIRE(fine.evaluate(levels[0].time(n)) == doctest::Approx(coarse.post_jump_values[n - 1]).epsilon(1e-13));
}

TEST_CASE("energies") {
    SimulationOptions opt;
    opt.seed = 45;
    opt.n_paths = 400;
    opt.workers = 1;
    const auto eb = energy(identity_terminal(1.0), 4, 6, opt);
    for (const auto& lv : eb.levels) {
        CAPTURE(lv.k);
        CHECK(lv.e2_conditional.mean == lv.e2_raw.mean);
        CHECK(std::abs(lv.e2_conditional.mean - table().angle_bracket(lv.k, 1.0)) <= 3.0 * lv.e2_conditional.std_error);
    }
    const auto ec = energy(constant_state(2.0), 3, 4, opt);
    for (const auto& lv : ec.levels) CHECK(lv.e2_raw.mean == 0.0);

    opt.engine = Engine::Grid;
    opt.grid_dt = 1e-4;
    opt.n_paths = 200;
    const auto eg = energy(square_state(), 2, 4, opt);
    for (const auto& lv : eg.levels) {
        CAPTURE(lv.k);
        CHECK(lv.e2_conditional.mean <= lv.e2_raw.mean + 2.0 * std::hypot(lv.e2_conditional.std_error, lv.e2_raw.std_error));
    }
    opt.engine = Engine::Exact;
    CHECK_THROWS_AS(energy(fbm_sin(0.75), 3, 4, opt), UsageError);
}

TEST_CASE("covariation probes") {
    SimulationOptions opt;
    opt.seed = 46;
    opt.n_paths = 500;
    opt.workers = 2;
    const std::vector<TestFunctional> gs{TestFunctional::One, TestFunctional::SignMidpoint, TestFunctional::ClippedTerminal};
    const auto zero = delta_covariation_probe(identity_terminal(1.0), constant_state(1.0), {0.5, 1.0}, gs, 3, 4, opt, table());
    for (const auto& r : zero) CHECK(r.estimate.mean == 0.0);
    const auto bb = delta_covariation_probe(identity_terminal(1.0), identity_terminal(1.0), {0.5, 1.0},
                                            {TestFunctional::One}, 5, 5, opt, table());
    for (const auto& r : bb) CHECK(std::abs(r.estimate.mean - r.t) <= std::max(3.0 * r.estimate.std_error, 2.0 * pow2(-5)));
}

TEST_CASE("chain rule probes") {
    SimulationOptions opt;
    opt.seed = 47;
    opt.n_paths = 200;
    opt.workers = 1;
    const std::vector<TestFunctional> gs{TestFunctional::One, TestFunctional::SignMidpoint};
    const auto lin = chain_rule_probe([](double x) { return 3.0 * x - 1.0; }, [](double) { return 3.0; }, {0.5, 1.0}, gs,
                                      3, 5, opt, table());
    for (const auto& r : lin) CHECK(r.left.mean == doctest::Approx(r.right.mean).epsilon(1e-12));
    const auto cst = chain_rule_probe([](double) { return 2.0; }, [](double) { return 0.0; }, {1.0}, gs, 3, 4, opt, table());
    for (const auto& r : cst) {
        CHECK(r.left.mean == 0.0);
        CHECK(r.right.mean == 0.0);
    }
}

TEST_CASE("ito probe for the square") {
    SimulationOptions opt;
    opt.seed = 17;
    opt.n_paths = 4000;
    const auto rows = ito_decompose_probe(square_state(), {0.5, 1.0}, {TestFunctional::One}, 3, 5, opt, table());
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
        // N = <A^k> is deterministic for the square.
        CHECK(r.drift.mean == doctest::Approx(table().angle_bracket(r.k, r.t)).epsilon(1e-12));
        CHECK(r.drift.std_error == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(std::abs(r.martingale.mean) <= 4.0 * r.martingale.std_error);
        CHECK(r.martingale_sq.mean == doctest::Approx(2.0 * r.t * r.t).epsilon(0.15));
    }
}
