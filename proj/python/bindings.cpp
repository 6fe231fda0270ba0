#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skelcalc/clark_ocone.hpp"
#include "skelcalc/fbm_experiments.hpp"
#include "skelcalc/local_time.hpp"

namespace py = pybind11;
using namespace skelcalc;

namespace {

SimulationOptions options(std::uint64_t seed, std::size_t paths, double horizon, double start, const std::string& engine,
                          double grid_dt, unsigned workers) {
    SimulationOptions o;
    o.seed = seed;
    o.n_paths = paths;
    o.horizon = horizon;
    o.start_value = start;
    o.grid_dt = grid_dt;
    o.workers = workers;
    if (engine == "exact") o.engine = Engine::Exact;
    else if (engine == "grid") o.engine = Engine::Grid;
    else throw UsageError("engine must be 'exact' or 'grid'");
    return o;
}

Skeleton one_skeleton(int k, double horizon, std::uint64_t seed, std::uint32_t path, double start) {
    RandomStream rng(seed, path);
    return build_skeleton_exact(default_first_exit_law(), k, horizon, rng, start);
}

// T_0 = 0 followed by the jump times, aligned with A at n = 0..N.
std::vector<double> all_times(const Skeleton& sk) {
    std::vector<double> t{0.0};
    t.insert(t.end(), sk.times().begin(), sk.times().end());
    return t;
}

}  // namespace

PYBIND11_MODULE(_skelcalc, m) {
    m.doc() = "Brownian skeleton calculus";
    m.attr("__version__") = SKELCALC_VERSION;
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("n", &Estimate::n)
        .def_readonly("mean", &Estimate::mean)
        .def_readonly("stderr", &Estimate::std_error)
        .def("__repr__", [](const Estimate& e) {
            return "Estimate(mean=" + std::to_string(e.mean) + ", stderr=" + std::to_string(e.std_error) +
                   ", n=" + std::to_string(e.n) + ")";
        });

    // first exit time of [-1, 1]
    m.def("tau_survival", [](double t) { return default_first_exit_law().survival(t); }, py::arg("t"));
    m.def("tau_cdf", [](double t) { return default_first_exit_law().cdf(t); }, py::arg("t"));
    m.def("tau_density", [](double t) { return default_first_exit_law().density(t); }, py::arg("t"));
    m.def("tau_quantile", [](double p) { return default_first_exit_law().quantile(p); }, py::arg("p"));
    m.def(
        "sample_tau",
        [](std::size_t n, std::uint64_t seed) {
            RandomStream rng(seed, 0);
            std::vector<double> out(n);
            for (auto& x : out) x = default_first_exit_law().sample(rng);
            return out;
        },
        py::arg("n"), py::arg("seed") = 1);

    // skeleton
    m.def(
        "skeleton",
        [](int k, double horizon, std::uint64_t seed, std::uint32_t path, double start) {
            const auto sk = one_skeleton(k, horizon, seed, path, start);
            py::dict d;
            d["level"] = sk.level();
            d["times"] = all_times(sk);
            std::vector<double> values(sk.jump_count() + 1);
            for (std::size_t n = 0; n < values.size(); ++n) values[n] = sk.value(n);
            d["values"] = values;
            return d;
        },
        py::arg("k"), py::arg("horizon") = 1.0, py::arg("seed") = 1, py::arg("path") = 0, py::arg("start") = 0.0);

    // intensity
    m.def("intensity_h", [](int k, double t) { return default_intensity_table().h(k, t); }, py::arg("k"), py::arg("t"));
    m.def(
        "angle_bracket", [](int k, double t) { return default_intensity_table().angle_bracket(k, t); }, py::arg("k"),
        py::arg("t"));

    // projection calculus
    m.def(
        "decompose",
        [](const std::string& functional, int k, double horizon, std::uint64_t seed, std::uint32_t path, double start) {
            const auto sk = one_skeleton(k, horizon, seed, path, start);
            const auto d = decompose(functional_by_name(functional, horizon), sk, default_intensity_table());
            std::vector<double> x{d.delta_x.initial_value};
            x.insert(x.end(), d.delta_x.post_jump_values.begin(), d.delta_x.post_jump_values.end());
            py::dict out;
            out["times"] = all_times(sk);
            out["x0"] = d.x0;
            out["delta_x"] = x;
            out["martingale"] = d.martingale_at_jumps;
            out["drift"] = d.drift_at_jumps;
            out["drift_kernel"] = d.drift_kernel;
            return out;
        },
        py::arg("functional"), py::arg("k"), py::arg("horizon") = 1.0, py::arg("seed") = 1, py::arg("path") = 0,
        py::arg("start") = 0.0);

    m.def(
        "energy",
        [](const std::string& functional, int k_min, int k_max, std::size_t paths, std::uint64_t seed,
           const std::string& engine, double grid_dt, unsigned workers) {
            const auto opt = options(seed, paths, 1.0, 0.0, engine, grid_dt, workers);
            const auto rep = energy(functional_by_name(functional, 1.0), k_min, k_max, opt);
            py::list rows;
            for (const auto& l : rep.levels) {
                py::dict r;
                r["k"] = l.k;
                r["e2_conditional"] = l.e2_conditional;
                r["e2_raw"] = l.e2_raw;
                rows.append(r);
            }
            return rows;
        },
        py::arg("functional"), py::arg("k_min"), py::arg("k_max"), py::arg("paths") = 1000, py::arg("seed") = 1,
        py::arg("engine") = "exact", py::arg("grid_dt") = 1e-4, py::arg("workers") = 0);

    m.def(
        "covariation",
        [](const std::string& fx, const std::string& fy, std::vector<double> times, int k_min, int k_max,
           std::size_t paths, std::uint64_t seed, unsigned workers) {
            const auto opt = options(seed, paths, 1.0, 0.0, "exact", 1e-4, workers);
            const auto rows = delta_covariation_probe(functional_by_name(fx), functional_by_name(fy), times,
                                                      {TestFunctional::One}, k_min, k_max, opt,
                                                      default_intensity_table());
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["k"] = r.k;
                d["t"] = r.t;
                d["estimate"] = r.estimate;
                out.append(d);
            }
            return out;
        },
        py::arg("fx"), py::arg("fy"), py::arg("times"), py::arg("k_min"), py::arg("k_max"), py::arg("paths") = 1000,
        py::arg("seed") = 1, py::arg("workers") = 0);

    // Clark-Ocone
    m.def(
        "representation_residual",
        [](const std::string& functional, int k, std::size_t paths, std::uint64_t seed, double grid_dt,
           unsigned workers) {
            const auto opt = options(seed, paths, 1.0, 0.0, "grid", grid_dt, workers);
            const auto r = representation_residual(functional_by_name(functional), k, opt, default_intensity_table());
            py::dict d;
            d["variance_ratio"] = r.variance_ratio;
            d["integral_mean"] = r.integral_mean;
            return d;
        },
        py::arg("functional"), py::arg("k"), py::arg("paths") = 500, py::arg("seed") = 1, py::arg("grid_dt") = 1e-4,
        py::arg("workers") = 0);

    // local time
    m.def(
        "local_time_curve",
        [](int k, int band, std::size_t paths, std::uint64_t seed, unsigned workers) {
            LocalTimeOptions opt;
            opt.band = band;
            opt.skeleton = options(seed, paths, 1.0, 0.0, "exact", 1e-4, workers);
            const auto c = local_time_curve(k, opt);
            std::vector<double> mean, se;
            for (const auto& e : c.l_hat) {
                mean.push_back(e.mean);
                se.push_back(e.std_error);
            }
            py::dict d;
            d["x"] = c.x;
            d["mean"] = mean;
            d["stderr"] = se;
            return d;
        },
        py::arg("k"), py::arg("band") = 3, py::arg("paths") = 1000, py::arg("seed") = 1, py::arg("workers") = 0);

    m.def(
        "crossing_brackets",
        [](const std::function<double(double)>& F, int k, int band, std::uint64_t seed, std::uint32_t path) {
            const auto sk = one_skeleton(k, 1.0, seed, path, 0.0);
            const auto cc = crossing_counts(sk, band, 1.0);
            const auto direct = direct_brackets(F, sk, band, 1.0);
            py::dict d;
            d["bracket_fa"] = bracket_F_A(F, cc);
            d["bracket_ff"] = bracket_F_F(F, cc);
            d["direct_fa"] = direct.first;
            d["direct_ff"] = direct.second;
            return d;
        },
        py::arg("F"), py::arg("k"), py::arg("band") = 3, py::arg("seed") = 1, py::arg("path") = 0);

    // fBm
    m.def(
        "fbm_scan",
        [](const std::function<double(double)>& f, double hurst, int k_min, int k_max, std::size_t paths,
           std::uint64_t seed, double grid_dt, unsigned workers) {
            const auto opt = options(seed, paths, 1.0, 0.0, "grid", grid_dt, workers);
            py::list out;
            for (const auto& r : fbm_scan(f, hurst, k_min, k_max, opt)) {
                py::dict d;
                d["k"] = r.k;
                d["e2_raw"] = r.e2_raw;
                d["projection_gap"] = r.projection_gap;
                d["martingale_mean"] = r.martingale_mean;
                d["martingale_second_moment"] = r.martingale_second_moment;
                out.append(d);
            }
            return out;
        },
        py::arg("f"), py::arg("hurst"), py::arg("k_min"), py::arg("k_max"), py::arg("paths") = 200,
        py::arg("seed") = 1, py::arg("grid_dt") = 1e-4, py::arg("workers") = 0);
}
