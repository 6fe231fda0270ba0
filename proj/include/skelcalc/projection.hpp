#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skelcalc/common.hpp"
#include "skelcalc/functionals.hpp"
#include "skelcalc/grid_path.hpp"
#include "skelcalc/intensity.hpp"
#include "skelcalc/skeleton.hpp"

namespace skelcalc {

/// delta^k X: E[X_{T_n} | G^k_n] on [T_n, T_{n+1}).
///
///   state            F(A_{T_n})
///   martingale-term. E[phi(A_{T_n} + sqrt(T - T_n) Z)]  (requires horizon <= T)
///   first-passage    (T_n ^ T_a) + a^2 - A_{T_n ^ T_a}^2
///
/// fbm-state has no closed form and raises UsageError here; see the overload.
StepProcess delta_projection(const Functional& f, const Skeleton& sk);

/// As above; for fbm-state functionals the surrogate f(B^H_{T_n}) is read
/// off `path` (which holds B^H on a grid containing the skeleton times).
StepProcess delta_projection(const Functional& f, const Skeleton& sk, const GridPath& path);

/// The first-passage estimator as displayed in the literature: increments
/// T_n - T_{n-1} while T_n <= T_a, i.e. a^2 + (T_n ^ T_a). Kept for
/// side-by-side comparison with delta_projection.
StepProcess first_passage_displayed(const Skeleton& sk, double alpha);

/// D^k X = ratio * h^k with ratio_n = (dX_{T_n} - dX_{T_{n-1}}) / (A_{T_n} - A_{T_{n-1}})
/// on [T_n, T_{n+1}) and 0 before T_1.
struct WeightedDerivative {
    int level = 0;
    StepProcess ratio;
    const IntensityTable* table = nullptr;

    double evaluate(double t) const { return ratio.evaluate(t) * table->h(level, t); }
    /// int_a^b D^k ds, exact for the interpolated intensity.
    double integral(double a, double b) const;
};

WeightedDerivative stochastic_derivative(const StepProcess& dx, const Skeleton& sk, const IntensityTable& table);

/// U^{k,F} on each interval [T_n, T_{n+1}), n = 0..N:
/// (F(A + h) + F(A - h) - 2 F(A)) / (2 h^2), h = 2^-k, A = A_{T_n}.
std::vector<double> drift_kernel_state(const std::function<double(double)>& F, const Skeleton& sk);

/// delta^k X = X_0 + M + N with N_t = int_0^t U h^k ds and M the compensated
/// sum of the jumps ratio_n * (A_{T_n} - A_{T_{n-1}}).
struct Decomposition {
    int level = 0;
    const IntensityTable* table = nullptr;
    double x0 = 0.0;
    StepProcess delta_x;
    /// U_n on [T_n, T_{n+1}).
    std::vector<double> drift_kernel;
    /// N at the jump times (index n = 0..N, N_0 = 0).
    std::vector<double> drift_at_jumps;
    /// M at the jump times (index n = 0..N, M_0 = 0).
    std::vector<double> martingale_at_jumps;

    double drift(double t) const;
    double martingale(double t) const;
};

Decomposition decompose(const Functional& f, const Skeleton& sk, const IntensityTable& table);

/// [X, Y]_t = sum over common jump times T_n <= t of dX dY. Both processes
/// must share the jump times.
double bracket(const StepProcess& x, const StepProcess& y, double t);

/// sum_{T_n <= t} (dX_{T_n})^2.
double step_energy(const StepProcess& x, double t);

/// Raw X at the skeleton times: grid values for path-driven engines,
/// skeleton values otherwise; returned as a StepProcess on sk's times.
StepProcess raw_at_stopping_times(const Functional& f, const Skeleton& sk, const GridPath* path);

enum class Engine { Exact, Grid };

struct SimulationOptions {
    std::uint64_t seed = 1;
    std::size_t n_paths = 1000;
    unsigned workers = 0;
    double horizon = 1.0;
    double start_value = 0.0;
    Engine engine = Engine::Exact;
    double grid_dt = 1e-4;
};

/// One Brownian sample: exact skeletons at levels k_min..k_max (coupled by
/// coarsening) or a grid path with extracted skeletons. `stream_tag`
/// separates experiments sharing a seed.
struct PathSample {
    std::vector<Skeleton> levels;  // index 0 is k_min
    GridPath path;                 // empty for the exact engine
    double max_overshoot = 0.0;
};

PathSample sample_path(const SimulationOptions& opt, int k_min, int k_max, std::size_t path_index,
                       std::uint32_t stream_tag);

struct EnergyLevel {
    int k = 0;
    Estimate e2_conditional;
    Estimate e2_raw;
    /// Paired raw - conditional.
    Estimate raw_minus_conditional;
};

struct EnergyReport {
    std::string functional;
    std::vector<EnergyLevel> levels;
};

/// E_2 and E_2^s at each level over [0, horizon]. fbm-state functionals
/// require the grid engine.
EnergyReport energy(const Functional& f, int k_min, int k_max, const SimulationOptions& opt);

/// Bounded test functionals for the weak probes, evaluated on the driving
/// sample (finest skeleton, or the grid path when present).
enum class TestFunctional { One, SignMidpoint, ClippedTerminal };
const char* to_string(TestFunctional g);
double evaluate_test_functional(TestFunctional g, const PathSample& sample, double horizon);

struct ProbeRow {
    int k = 0;
    double t = 0.0;
    TestFunctional g = TestFunctional::One;
    Estimate estimate;
};

/// E[g [delta^k X, delta^k Y]_t] for each (k, t, g).
std::vector<ProbeRow> delta_covariation_probe(const Functional& fx, const Functional& fy, const std::vector<double>& ts,
                                              const std::vector<TestFunctional>& gs, int k_min, int k_max,
                                              const SimulationOptions& opt, const IntensityTable& table);

struct ItoRow {
    int k = 0;
    double t = 0.0;
    TestFunctional g = TestFunctional::One;
    Estimate martingale;     // E[g M_t]
    Estimate martingale_sq;  // E[g M_t^2]
    Estimate drift;          // E[g N_t]
};

/// Ensemble summaries of the decomposition delta^k X = X_0 + M + N.
std::vector<ItoRow> ito_decompose_probe(const Functional& f, const std::vector<double>& ts,
                                        const std::vector<TestFunctional>& gs, int k_min, int k_max,
                                        const SimulationOptions& opt, const IntensityTable& table);

struct ChainRuleRow {
    int k = 0;
    double t = 0.0;
    TestFunctional g = TestFunctional::One;
    Estimate left;        // E[g int_0^t D^k F(B) ds]
    Estimate right;       // E[g int_0^t f(A^k_s) D^k B ds]
    Estimate difference;  // paired left - right
};

/// Weak probes of D F(B) = f(B) D B with f = F'.
std::vector<ChainRuleRow> chain_rule_probe(const std::function<double(double)>& F,
                                           const std::function<double(double)>& f, const std::vector<double>& ts,
                                           const std::vector<TestFunctional>& gs, int k_min, int k_max,
                                           const SimulationOptions& opt, const IntensityTable& table);

}  // namespace skelcalc
