#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "skelcalc/projection.hpp"

namespace skelcalc {

/// Up/down transitions of A^k across the lattice cells [(j-1)h, jh),
/// h = 2^-k, up to t ^ S_m with S_m the first time |A^k| = 2^m.
/// Cells run over j = 1 - 2^{m+k} .. 2^{m+k}, i.e. the band [-2^m, 2^m].
struct CrossingCounts {
    int level = 0;
    int band = 0;
    double t = 0.0;
    /// t ^ S_m.
    double stop_time = 0.0;
    bool stopped = false;
    std::int64_t min_cell = 0;
    std::vector<std::int64_t> up;
    std::vector<std::int64_t> down;
    /// Jumps counted (those with T_n <= t ^ S_m).
    std::size_t jumps = 0;

    double spacing() const noexcept { return pow2(-level); }
    std::size_t cells() const noexcept { return up.size(); }
    /// Lattice index j of slot i.
    std::int64_t cell_index(std::size_t i) const noexcept { return min_cell + static_cast<std::int64_t>(i); }
    /// eta on cell j (up + down), 0 outside the band.
    std::int64_t eta(std::int64_t j) const noexcept;
    std::int64_t total() const noexcept;
};

/// Requires the start on the lattice 2^-k Z and strictly inside the band.
CrossingCounts crossing_counts(const Skeleton& sk, int m, double t);

/// L(x) = 2^-k eta(cell of x) / 2, piecewise constant on the cells.
struct LocalTimeEstimate {
    int level = 0;
    std::int64_t min_cell = 0;
    std::vector<double> values;

    double operator()(double x) const;
    /// Mean of the two cells adjacent to the lattice point x.
    double at_lattice_point(double x) const;
};

LocalTimeEstimate local_time_estimate(const CrossingCounts& cc);

/// sum_j h eta_j Delta^j, Delta^j = F(jh) - F((j-1)h).
double bracket_F_A(const std::function<double(double)>& F, const CrossingCounts& cc);
/// sum_j (Delta^j)^2 eta_j.
double bracket_F_F(const std::function<double(double)>& F, const CrossingCounts& cc);

/// The same two sums taken directly along the skeleton,
/// sum dF(A) dA and sum (dF(A))^2 over the counted jumps.
std::pair<double, double> direct_brackets(const std::function<double(double)>& F, const Skeleton& sk, int m, double t);

/// Cell masses mu_j of a Stieltjes measure on the band.
struct CellMasses {
    std::int64_t min_cell = 0;
    std::vector<double> mass;
};
/// mu_j = F(jh) - F((j-1)h) (F piecewise linear between lattice points).
CellMasses cell_masses_from_function(const std::function<double(double)>& F, const CrossingCounts& cc);
/// Point masses (location, size) placed in the cell ((j-1)h, jh] holding the location.
CellMasses cell_masses_from_jumps(const std::vector<std::pair<double, double>>& jumps, const CrossingCounts& cc);
/// int 2 L dmu.
double local_time_stieltjes(const LocalTimeEstimate& l, const CellMasses& mu);

/// 4^k sum_{i=+-1} int_0^t [F(A_s + i h) - F(A_s)] h^k(s) ds, interval by
/// interval with table-exact integration of h^k.
double local_time_integral(const std::function<double(double)>& F, const Skeleton& sk, const IntensityTable& table,
                           double t);

struct IdentityRow {
    int k = 0;
    /// Skeleton side: [F(A), A]_t or [F(A), F(A)]_t from the crossing counts.
    Estimate skeleton;
    /// Same quantity through 2 L and the cell masses (covariation check only).
    Estimate stieltjes;
    /// Grid-path oracle int_0^t g(B_s) ds on an independent ensemble.
    Estimate oracle;
    /// Largest per-path |counts - direct| over the ensemble.
    double max_rearrangement_error = 0.0;
};

struct LocalTimeOptions {
    int band = 3;
    double t = 1.0;
    /// Skeleton ensemble (any engine).
    SimulationOptions skeleton;
    /// Oracle ensemble (grid engine is forced).
    SimulationOptions oracle;
};

/// [F(A), A]_t from the counts against int 2L dmu_F and against int_0^t f(B_s) ds.
std::vector<IdentityRow> covariation_identity_check(const std::function<double(double)>& F,
                                                    const std::function<double(double)>& f, int k_min, int k_max,
                                                    const LocalTimeOptions& opt);

/// [F(A), F(A)]_t from the counts against int_0^t f(B_s)^2 ds.
std::vector<IdentityRow> energy_identity_check(const std::function<double(double)>& F,
                                               const std::function<double(double)>& f, int k_min, int k_max,
                                               const LocalTimeOptions& opt);

struct LocalTimeCurve {
    int k = 0;
    std::vector<double> x;  // left cell edges
    std::vector<Estimate> l_hat;
};

LocalTimeCurve local_time_curve(int k, const LocalTimeOptions& opt);

struct TanakaReport {
    int k = 0;
    /// N^{k,|x|}_t = 2^k int 1{A = 0} h^k ds.
    Estimate drift_abs;
    /// 2 L(0) from the crossing counts, same paths.
    Estimate two_l_hat;
    /// (1/2e) int_0^t 1{|B_s| < e} ds, e = 2^-k, independent grid paths.
    Estimate occupation;
    /// occupation / L(0): the factor between this local-time normalization
    /// and the occupation density.
    Estimate normalization;
};

TanakaReport tanaka_check(int k, const LocalTimeOptions& opt, const IntensityTable& table);

}  // namespace skelcalc
