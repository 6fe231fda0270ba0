#pragma once

#include <functional>
#include <istream>
#include <string>
#include <vector>

#include "skelcalc/grid_path.hpp"
#include "skelcalc/skeleton.hpp"

namespace skelcalc {

enum class FunctionalKind {
    /// X_t = F(B_t).
    State,
    /// X_t = E[phi(B_T) | F_t] for t <= T.
    MartingaleTerminal,
    /// X_t = E[T_alpha | F_t] = (t ^ T_alpha) + alpha^2 - B_{t ^ T_alpha}^2,
    /// T_alpha = inf{t : |B_t| = alpha}.
    FirstPassage,
    /// X_t = f(B^H_t), only on a GridPath holding B^H.
    FbmState,
};

const char* to_string(FunctionalKind kind);

/// A Wiener functional from the catalogue. `fn` is F, phi or f depending on
/// the kind. For martingale-terminal functionals `gaussian_mean(x, v)` may
/// give E[phi(x + sqrt(v) Z)] in closed form; otherwise Gauss-Hermite is used.
struct Functional {
    FunctionalKind kind = FunctionalKind::State;
    std::string name;
    std::function<double(double)> fn;
    std::function<double(double, double)> gaussian_mean;
    double terminal_time = 1.0;
    double alpha = 0.0;
    double hurst = 0.5;

    /// True when E[X_{T_n} | G^k_n] has a closed form on the skeleton.
    bool projection_closed_form() const noexcept { return kind != FunctionalKind::FbmState; }
    /// E[phi(B_T) | B_t = x] (martingale-terminal only).
    double terminal_conditional(double x, double t) const;
};

Functional state_functional(std::string name, std::function<double(double)> F);
Functional square_state();
Functional abs_state();
Functional linear_state(double slope, double intercept = 0.0);
Functional constant_state(double c);
Functional martingale_terminal(std::string name, std::function<double(double)> phi, double T);
Functional identity_terminal(double T);
Functional square_terminal(double T);
Functional first_passage(double alpha);
Functional fbm_state(std::string name, std::function<double(double)> f, double H);
Functional fbm_sin(double H);

/// State functional with F tabulated as `x,F` rows (a header line is
/// optional), linear interpolation, continued linearly past both ends.
Functional read_tabulated_state(std::istream& in, std::string name);

/// Catalogue lookup: `square`, `abs`, `identity-terminal`, `square-terminal`,
/// `first-passage(alpha)`, `fbm-sin(H)`, or `csv:<path>`. Terminal kinds use
/// T = horizon. Unknown names raise UsageError.
Functional functional_by_name(const std::string& spec, double horizon = 1.0);

/// First time the skeleton value satisfies |A| = alpha, +infinity if not
/// reached by the horizon. +-alpha must both lie on the skeleton lattice,
/// otherwise UsageError.
double first_passage_time(const Skeleton& sk, double alpha);
/// First grid time with |B| >= alpha, +infinity if none.
double first_passage_time(const GridPath& path, double alpha);

/// X_t on the skeleton (B replaced by A^k). FbmState raises UsageError.
double evaluate_functional(const Functional& f, double t, const Skeleton& sk);
/// X_t on a grid path; for FbmState the path must hold B^H.
double evaluate_functional(const Functional& f, double t, const GridPath& path);

}  // namespace skelcalc
