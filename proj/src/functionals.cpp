#include "skelcalc/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "skelcalc/common.hpp"
#include "skelcalc/quadrature.hpp"

namespace skelcalc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_argument(const std::string& spec, const std::string& prefix) {
    // prefix "name(" ... ")"
    if (spec.size() <= prefix.size() + 1 || spec.back() != ')')
        throw UsageError("functional: malformed argument in '" + spec + "'");
    const std::string arg = spec.substr(prefix.size(), spec.size() - prefix.size() - 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(arg, &used);
    } catch (const std::exception&) {
        throw UsageError("functional: malformed argument in '" + spec + "'");
    }
    if (used != arg.size()) throw UsageError("functional: malformed argument in '" + spec + "'");
    return v;
}

bool on_lattice(double x, double origin, double spacing) {
    const double q = (x - origin) / spacing;
    return std::abs(q - std::round(q)) <= 1e-9;
}

}  // namespace

const char* to_string(FunctionalKind kind) {
    switch (kind) {
        case FunctionalKind::State: return "state";
        case FunctionalKind::MartingaleTerminal: return "martingale-terminal";
        case FunctionalKind::FirstPassage: return "first-passage";
        case FunctionalKind::FbmState: return "fbm-state";
    }
    return "?";
}

double Functional::terminal_conditional(double x, double t) const {
    if (kind != FunctionalKind::MartingaleTerminal) throw UsageError("terminal_conditional: not a martingale-terminal functional");
    if (t > terminal_time) throw UsageError("terminal_conditional: t beyond the terminal time");
    const double v = terminal_time - t;
    if (gaussian_mean) return gaussian_mean(x, v);
    return gaussian_expectation(fn, x, std::sqrt(v));
}

Functional state_functional(std::string name, std::function<double(double)> F) {
    Functional f;
    f.kind = FunctionalKind::State;
    f.name = std::move(name);
    f.fn = std::move(F);
    return f;
}

Functional square_state() { return state_functional("square", [](double x) { return x * x; }); }
Functional abs_state() { return state_functional("abs", [](double x) { return std::abs(x); }); }
Functional linear_state(double slope, double intercept) {
    return state_functional("linear", [slope, intercept](double x) { return slope * x + intercept; });
}
Functional constant_state(double c) { return state_functional("constant", [c](double) { return c; }); }

Functional martingale_terminal(std::string name, std::function<double(double)> phi, double T) {
    if (!(T > 0.0)) throw std::domain_error("martingale_terminal: T must be > 0");
    Functional f;
    f.kind = FunctionalKind::MartingaleTerminal;
    f.name = std::move(name);
    f.fn = std::move(phi);
    f.terminal_time = T;
    return f;
}

Functional identity_terminal(double T) {
    auto f = martingale_terminal("identity-terminal", [](double x) { return x; }, T);
    f.gaussian_mean = [](double x, double) { return x; };
    return f;
}

Functional square_terminal(double T) {
    auto f = martingale_terminal("square-terminal", [](double x) { return x * x; }, T);
    f.gaussian_mean = [](double x, double v) { return x * x + v; };
    return f;
}

Functional first_passage(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("first_passage: alpha must be > 0");
    Functional f;
    f.kind = FunctionalKind::FirstPassage;
    f.name = "first-passage";
    f.alpha = alpha;
    return f;
}

Functional fbm_state(std::string name, std::function<double(double)> fn, double H) {
    if (!(H > 0.5 && H < 1.0)) throw std::domain_error("fbm_state: H must lie in (1/2, 1)");
    Functional f;
    f.kind = FunctionalKind::FbmState;
    f.name = std::move(name);
    f.fn = std::move(fn);
    f.hurst = H;
    return f;
}

Functional fbm_sin(double H) { return fbm_state("fbm-sin", [](double x) { return std::sin(x); }, H); }

Functional read_tabulated_state(std::istream& in, std::string name) {
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b)) throw UsageError("tabulated functional: expected 'x,F' rows");
        try {
            rows.emplace_back(std::stod(a), std::stod(b));
        } catch (const std::exception&) {
            if (rows.empty()) continue;  // header
            throw UsageError("tabulated functional: non-numeric row '" + line + "'");
        }
    }
    if (rows.size() < 2) throw UsageError("tabulated functional: need at least two rows");
    std::sort(rows.begin(), rows.end());
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].first == rows[i - 1].first) throw UsageError("tabulated functional: duplicate abscissa");
    std::vector<double> xs, ys;
    for (const auto& [x, y] : rows) {
        xs.push_back(x);
        ys.push_back(y);
    }
    return state_functional(std::move(name), [xs, ys](double x) {
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
        i = std::min(i, xs.size() - 2);
        const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return ys[i] + w * (ys[i + 1] - ys[i]);
    });
}

Functional functional_by_name(const std::string& spec, double horizon) {
    if (spec == "square") return square_state();
    if (spec == "abs") return abs_state();
    if (spec == "identity") return linear_state(1.0);
    if (spec == "identity-terminal") return identity_terminal(horizon);
    if (spec == "square-terminal") return square_terminal(horizon);
    if (spec.rfind("first-passage(", 0) == 0) return first_passage(parse_argument(spec, "first-passage("));
    if (spec.rfind("fbm-sin(", 0) == 0) return fbm_sin(parse_argument(spec, "fbm-sin("));
    if (spec.rfind("csv:", 0) == 0) {
        std::ifstream in(spec.substr(4));
        if (!in) throw UsageError("functional: cannot open '" + spec.substr(4) + "'");
        return read_tabulated_state(in, spec);
    }
    throw UsageError("unknown functional '" + spec + "'");
}

double first_passage_time(const Skeleton& sk, double alpha) {
    if (!on_lattice(alpha, sk.start_value(), sk.spacing()) || !on_lattice(-alpha, sk.start_value(), sk.spacing()))
        throw UsageError("first_passage_time: +-alpha must lie on the skeleton lattice");
    if (std::abs(sk.start_value()) >= alpha) return 0.0;
    // Lattice offsets of +-alpha relative to the start.
    const auto up = std::llround((alpha - sk.start_value()) / sk.spacing());
    const auto down = std::llround((-alpha - sk.start_value()) / sk.spacing());
    for (std::size_t n = 1; n <= sk.jump_count(); ++n) {
        const auto o = sk.offset(n);
        if (o == up || o == down) return sk.time(n);
    }
    return kInf;
}

double first_passage_time(const GridPath& path, double alpha) {
    for (std::size_t i = 0; i < path.size(); ++i)
        if (std::abs(path.values[i]) >= alpha) return path.dt * static_cast<double>(i);
    return kInf;
}

double evaluate_functional(const Functional& f, double t, const Skeleton& sk) {
    switch (f.kind) {
        case FunctionalKind::State: return f.fn(sk.evaluate(t));
        case FunctionalKind::MartingaleTerminal: return f.terminal_conditional(sk.evaluate(t), t);
        case FunctionalKind::FirstPassage: {
            const double stop = std::min(t, first_passage_time(sk, f.alpha));
            const double b = sk.evaluate(stop);
            return stop + f.alpha * f.alpha - b * b;
        }
        case FunctionalKind::FbmState:
            throw UsageError("evaluate_functional: fbm-state functionals need a GridPath holding B^H");
    }
    throw UsageError("evaluate_functional: unknown kind");
}

double evaluate_functional(const Functional& f, double t, const GridPath& path) {
    if (path.values.empty()) throw std::domain_error("evaluate_functional: empty path");
    if (!(t >= 0.0)) throw std::domain_error("evaluate_functional: t must be >= 0");
    switch (f.kind) {
        case FunctionalKind::State:
        case FunctionalKind::FbmState: return f.fn(path.at(t));
        case FunctionalKind::MartingaleTerminal: return f.terminal_conditional(path.at(t), t);
        case FunctionalKind::FirstPassage: {
            const double stop = std::min(t, first_passage_time(path, f.alpha));
            const double b = path.at(stop);
            return stop + f.alpha * f.alpha - b * b;
        }
    }
    throw UsageError("evaluate_functional: unknown kind");
}

}  // namespace skelcalc
