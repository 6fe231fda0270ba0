// Experiment runner. Usage: skelcalc [run] <experiment> [flags]
//
// Exit codes: 0 ok, 1 runtime failure, 2 unknown experiment, 3 malformed
// config, 4 unwritable output directory, 5 bad command-line arguments.

#include <boost/version.hpp>

#include <array>
#include <charconv>
#include <deque>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skelcalc/clark_ocone.hpp"
#include "skelcalc/csv.hpp"
#include "skelcalc/fbm_experiments.hpp"
#include "skelcalc/local_time.hpp"
#include "skelcalc/parallel.hpp"

namespace fs = std::filesystem;
using namespace skelcalc;

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUnknownExperiment = 2,
    kMalformedConfig = 3,
    kUnwritableOutput = 4,
    kBadArguments = 5,
};

struct ExitError : std::runtime_error {
    ExitError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

struct Key {
    const char* name;
    const char* fallback;
    const char* help;
};

// Every flag is also a config key. Values stay strings until resolve().
constexpr std::array kKeys{
    Key{"seed", "1", "master seed"},
    Key{"paths", "1000", "number of Monte Carlo paths"},
    Key{"k", "", "single level (sets k-min = k-max)"},
    Key{"k-min", "", "lowest level"},
    Key{"k-max", "", "highest level"},
    Key{"horizon", "1", "time horizon T"},
    Key{"grid-dt", "1e-4", "grid step for grid-engine paths and oracles"},
    Key{"out-dir", "skelcalc-out", "output directory"},
    Key{"workers", "0", "worker threads, 0 = hardware concurrency"},
    Key{"samples", "1000000", "tau-moments: number of draws"},
    Key{"functional", "", "functional name (square, abs, identity-terminal, square-terminal, first-passage(a), "
                          "fbm-sin(H), csv:path)"},
    Key{"functional-y", "", "covariation: second functional (default: same as --functional)"},
    Key{"hurst", "0.75", "fbm: Hurst index in (1/2, 1); fbm-sin(H) overrides it"},
    Key{"engine", "exact", "exact or grid"},
    Key{"band", "3", "local-time: spatial truncation S_m, |B| < 2^m"},
    Key{"times", "0.25,0.5,0.75,1", "reporting times, comma separated"},
    Key{"start", "0", "starting point y"},
    Key{"oracle-paths", "", "local-time: grid oracle paths (default: --paths)"},
    Key{"stride", "10", "intensity-table: keep every stride-th node"},
};

struct Settings {
    std::map<std::string, std::string> raw;
    SimulationOptions sim;
    int k_min = 0;
    int k_max = 0;
    std::size_t samples = 0;
    std::string functional;
    std::string functional_y;
    double hurst = 0.75;
    int band = 3;
    std::vector<double> times;
    std::size_t oracle_paths = 0;
    std::size_t stride = 1;
    fs::path out_dir;
};

struct Experiment {
    const char* name;
    int k_min;
    int k_max;
    const char* functional;
    void (*run)(const Settings&, class Output&);
};

// ---------------------------------------------------------------- parsing

template <class T>
T parse_integer(const std::string& key, const std::string& s) {
    T v{};
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (s.empty() || r.ec != std::errc() || r.ptr != end) throw std::invalid_argument(key + ": not an integer: '" + s + "'");
    return v;
}

double parse_real(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw std::invalid_argument(key + ": not a number: '" + s + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool known_key(const std::string& k) {
    for (const auto& key : kKeys)
        if (k == key.name) return true;
    return false;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ExitError(kMalformedConfig, "cannot read config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        const auto where = path + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ExitError(kMalformedConfig, where + "expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (!known_key(key) || key == "config") throw ExitError(kMalformedConfig, where + "unknown key '" + key + "'");
        if (out.count(key)) throw ExitError(kMalformedConfig, where + "duplicate key '" + key + "'");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::vector<double> parse_times(const std::string& s, double horizon) {
    std::vector<double> ts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double t = parse_real("times", trim(item));
        if (!(t > 0.0 && t <= horizon)) throw std::invalid_argument("times: each time must lie in (0, horizon]");
        ts.push_back(t);
    }
    if (ts.empty()) throw std::invalid_argument("times: empty list");
    return ts;
}

Settings resolve(const std::map<std::string, std::string>& raw, const Experiment& e) {
    Settings s;
    s.raw = raw;
    auto get = [&](const char* k) { return raw.at(k); };
    s.sim.seed = parse_integer<std::uint64_t>("seed", get("seed"));
    s.sim.n_paths = parse_integer<std::size_t>("paths", get("paths"));
    s.sim.horizon = parse_real("horizon", get("horizon"));
    s.sim.grid_dt = parse_real("grid-dt", get("grid-dt"));
    s.sim.workers = parse_integer<unsigned>("workers", get("workers"));
    s.sim.start_value = parse_real("start", get("start"));
    const auto engine = get("engine");
    if (engine == "exact") s.sim.engine = Engine::Exact;
    else if (engine == "grid") s.sim.engine = Engine::Grid;
    else throw std::invalid_argument("engine: expected exact or grid, got '" + engine + "'");
    if (s.sim.n_paths == 0) throw std::invalid_argument("paths: must be positive");
    if (!(s.sim.horizon > 0.0)) throw std::invalid_argument("horizon: must be positive");
    if (!(s.sim.grid_dt > 0.0 && s.sim.grid_dt <= s.sim.horizon)) throw std::invalid_argument("grid-dt: out of range");

    s.k_min = e.k_min;
    s.k_max = e.k_max;
    if (!get("k").empty()) s.k_min = s.k_max = parse_integer<int>("k", get("k"));
    if (!get("k-min").empty()) s.k_min = parse_integer<int>("k-min", get("k-min"));
    if (!get("k-max").empty()) s.k_max = parse_integer<int>("k-max", get("k-max"));
    if (s.k_min < 0 || s.k_max > 12 || s.k_min > s.k_max) throw std::invalid_argument("k range: need 0 <= k-min <= k-max <= 12");

    s.samples = parse_integer<std::size_t>("samples", get("samples"));
    s.hurst = parse_real("hurst", get("hurst"));
    s.functional = get("functional").empty() ? e.functional : get("functional");
    s.functional_y = get("functional-y").empty() ? s.functional : get("functional-y");
    s.band = parse_integer<int>("band", get("band"));
    s.times = parse_times(get("times"), s.sim.horizon);
    s.oracle_paths = get("oracle-paths").empty() ? s.sim.n_paths : parse_integer<std::size_t>("oracle-paths", get("oracle-paths"));
    s.stride = parse_integer<std::size_t>("stride", get("stride"));
    if (s.stride == 0) throw std::invalid_argument("stride: must be positive");
    s.out_dir = get("out-dir");
    return s;
}

// ----------------------------------------------------------------- output

class Output {
public:
    explicit Output(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ExitError(kUnwritableOutput, "cannot create output directory " + dir_.string() + ": " + ec.message());
        const auto probe = dir_ / ".write-test";
        std::ofstream t(probe);
        if (!t) throw ExitError(kUnwritableOutput, "output directory is not writable: " + dir_.string());
        t.close();
        fs::remove(probe, ec);
    }

    /// New CSV file whose first line references the manifest.
    std::ofstream& csv(const std::string& name, const std::string& header) {
        auto& out = open(name);
        out << "# manifest: manifest.txt\n" << header << '\n';
        return out;
    }

    std::ofstream& open(const std::string& name) {
        files_.push_back(name);
        streams_.emplace_back(dir_ / name, std::ios::binary);
        if (!streams_.back()) throw ExitError(kUnwritableOutput, "cannot write " + (dir_ / name).string());
        return streams_.back();
    }

    const std::vector<std::string>& files() const { return files_; }
    const fs::path& dir() const { return dir_; }

    void close() {
        for (auto& s : streams_) {
            s.close();
            if (!s) throw ExitError(kUnwritableOutput, "write failed in " + dir_.string());
        }
    }

private:
    fs::path dir_;
    std::vector<std::string> files_;
    std::deque<std::ofstream> streams_;  // references handed out must stay valid
};

std::string fmt(double x) { return format_double(x); }

// k,t,g,estimate,stderr,n_paths
constexpr const char* kProbeHeader = "k,t,g,estimate,stderr,n_paths";

void probe_line(std::ostream& out, int k, double t, const std::string& g, const Estimate& e) {
    out << k << ',' << fmt(t) << ',' << g << ',' << fmt(e.mean) << ',' << fmt(e.std_error) << ',' << e.n << '\n';
}

const std::vector<TestFunctional> kAllTests{TestFunctional::One, TestFunctional::SignMidpoint,
                                            TestFunctional::ClippedTerminal};

std::function<double(double)> derivative_of(const std::function<double(double)>& F) {
    return [F](double x) {
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        return (F(x + h) - F(x - h)) / (2.0 * h);
    };
}

Functional state_or_throw(const Settings& s) {
    auto f = functional_by_name(s.functional, s.sim.horizon);
    if (f.kind != FunctionalKind::State) throw UsageError("this experiment needs a state functional F(B_t), got " + s.functional);
    return f;
}

// ------------------------------------------------------------ experiments

void run_tau_moments(const Settings& s, Output& out) {
    const auto& law = default_first_exit_law();
    constexpr std::size_t kBlock = 1 << 16;
    const std::size_t blocks = (s.samples + kBlock - 1) / kBlock;
    // Power sums 1..6 per block, reduced in block order.
    auto sums = map_paths<std::array<double, 7>>(blocks, s.sim.workers, [&](std::size_t b) {
        std::array<double, 7> acc{};
        RandomStream rng(s.sim.seed, static_cast<std::uint32_t>(b), 15);
        for (std::size_t i = b * kBlock; i < std::min(s.samples, (b + 1) * kBlock); ++i) {
            const double x = law.sample(rng);
            double p = 1.0;
            for (int m = 1; m <= 6; ++m) acc[m] += (p *= x);
        }
        return acc;
    });
    std::array<double, 7> tot{};
    for (const auto& a : sums)
        for (int m = 1; m <= 6; ++m) tot[m] += a[m];
    const auto n = static_cast<double>(s.samples);
    const std::array<double, 4> exact{0.0, 1.0, 5.0 / 3.0, 61.0 / 15.0};
    auto& csv = out.csv("tau_moments.csv", "moment,estimate,stderr,exact,n_samples");
    for (int m = 1; m <= 3; ++m) {
        const double mean = tot[m] / n;
        const double var = (tot[2 * m] / n - mean * mean) * n / (n - 1.0);
        csv << m << ',' << fmt(mean) << ',' << fmt(std::sqrt(std::max(var, 0.0) / n)) << ',' << fmt(exact[m]) << ','
            << s.samples << '\n';
    }
}

void run_intensity_table(const Settings& s, Output& out) {
    auto& csv = out.open("intensity.csv");
    csv << "# manifest: manifest.txt\n";
    default_intensity_table().write_csv(csv, s.stride);
}

void run_skeleton_sim(const Settings& s, Output& out) {
    const auto levels = static_cast<std::size_t>(s.k_max - s.k_min + 1);
    auto counts = map_paths<std::vector<double>>(s.sim.n_paths, s.sim.workers, [&](std::size_t p) {
        const auto sample = sample_path(s.sim, s.k_min, s.k_max, p, 16);
        std::vector<double> v(levels + 1);
        for (std::size_t i = 0; i < levels; ++i) v[i] = static_cast<double>(sample.levels[i].jump_count());
        v[levels] = sample.max_overshoot;
        return v;
    });
    auto& csv = out.csv("skeleton_summary.csv", "k,mean_jumps,stderr,four_pow_k_times_T,max_overshoot,n_paths");
    double overshoot = 0.0;
    for (const auto& v : counts) overshoot = std::max(overshoot, v[levels]);
    std::vector<double> col(s.sim.n_paths);
    for (std::size_t i = 0; i < levels; ++i) {
        for (std::size_t p = 0; p < s.sim.n_paths; ++p) col[p] = counts[p][i];
        const auto e = estimate_of(col);
        const int k = s.k_min + static_cast<int>(i);
        csv << k << ',' << fmt(e.mean) << ',' << fmt(e.std_error) << ',' << fmt(std::ldexp(s.sim.horizon, 2 * k)) << ','
            << fmt(overshoot) << ',' << e.n << '\n';
    }
    const auto first = sample_path(s.sim, s.k_min, s.k_max, 0, 16);
    auto& dump = out.open("skeleton_path0.csv");
    dump << "# manifest: manifest.txt\n";
    write_skeleton_csv(dump, first.levels.back());
}

void run_ito_decompose(const Settings& s, Output& out) {
    const auto f = functional_by_name(s.functional, s.sim.horizon);
    const auto rows = ito_decompose_probe(f, s.times, kAllTests, s.k_min, s.k_max, s.sim, default_intensity_table());
    auto& m = out.csv("ito_martingale.csv", kProbeHeader);
    auto& m2 = out.csv("ito_martingale_sq.csv", kProbeHeader);
    auto& d = out.csv("ito_drift.csv", kProbeHeader);
    for (const auto& r : rows) {
        probe_line(m, r.k, r.t, to_string(r.g), r.martingale);
        probe_line(m2, r.k, r.t, to_string(r.g), r.martingale_sq);
        probe_line(d, r.k, r.t, to_string(r.g), r.drift);
    }
}

void run_energy_scan(const Settings& s, Output& out) {
    const auto f = functional_by_name(s.functional, s.sim.horizon);
    const auto rep = energy(f, s.k_min, s.k_max, s.sim);
    auto& c = out.csv("energy_conditional.csv", kProbeHeader);
    auto& r = out.csv("energy_raw.csv", kProbeHeader);
    auto& d = out.csv("energy_raw_minus_conditional.csv", kProbeHeader);
    for (const auto& l : rep.levels) {
        probe_line(c, l.k, s.sim.horizon, "one", l.e2_conditional);
        probe_line(r, l.k, s.sim.horizon, "one", l.e2_raw);
        probe_line(d, l.k, s.sim.horizon, "one", l.raw_minus_conditional);
    }
}

void run_covariation(const Settings& s, Output& out) {
    const auto fx = functional_by_name(s.functional, s.sim.horizon);
    const auto fy = functional_by_name(s.functional_y, s.sim.horizon);
    const auto rows = delta_covariation_probe(fx, fy, s.times, kAllTests, s.k_min, s.k_max, s.sim, default_intensity_table());
    auto& csv = out.csv("covariation.csv", kProbeHeader);
    for (const auto& r : rows) probe_line(csv, r.k, r.t, to_string(r.g), r.estimate);
}

void run_clark_ocone(const Settings& s, Output& out) {
    const auto f = functional_by_name(s.functional, s.sim.horizon);
    std::function<double(double)> oracle;
    if (f.name == "identity-terminal") oracle = [](double) { return 1.0; };
    else if (f.name == "square-terminal") oracle = [](double x) { return 2.0 * x; };
    SimulationOptions grid = s.sim;
    grid.engine = Engine::Grid;
    const auto& table = default_intensity_table();
    auto& res = out.csv("clark_ocone_residual.csv",
                        "k,variance_ratio,stderr,integral_mean,integral_stderr,f_mean,f_stderr,n_paths");
    auto& curve = out.csv("clark_ocone_density.csv",
                          "k,t,density,density_stderr,oracle,oracle_stderr,difference,difference_stderr,n_paths");
    for (int k = s.k_min; k <= s.k_max; ++k) {
        const auto r = representation_residual(f, k, grid, table);
        res << k << ',' << fmt(r.variance_ratio.mean) << ',' << fmt(r.variance_ratio.std_error) << ','
            << fmt(r.integral_mean.mean) << ',' << fmt(r.integral_mean.std_error) << ',' << fmt(r.f_mean.mean) << ','
            << fmt(r.f_mean.std_error) << ',' << r.f_mean.n << '\n';
        for (const auto& p : density_curve(f, k, s.times, grid, table, oracle)) {
            curve << k << ',' << fmt(p.t) << ',' << fmt(p.density.mean) << ',' << fmt(p.density.std_error) << ','
                  << fmt(p.oracle.mean) << ',' << fmt(p.oracle.std_error) << ',' << fmt(p.difference.mean) << ','
                  << fmt(p.difference.std_error) << ',' << p.density.n << '\n';
        }
    }
}

void run_local_time(const Settings& s, Output& out) {
    const auto F = state_or_throw(s).fn;
    const auto f = derivative_of(F);
    LocalTimeOptions opt;
    opt.band = s.band;
    opt.t = s.sim.horizon;
    opt.skeleton = s.sim;
    opt.oracle = s.sim;
    opt.oracle.engine = Engine::Grid;
    opt.oracle.n_paths = s.oracle_paths;
    opt.oracle.seed = s.sim.seed + 1;

    const auto curve = local_time_curve(s.k_max, opt);
    auto& lc = out.csv("local_time_curve.csv", "x,L_hat_mean,L_hat_se");
    for (std::size_t i = 0; i < curve.x.size(); ++i)
        lc << fmt(curve.x[i]) << ',' << fmt(curve.l_hat[i].mean) << ',' << fmt(curve.l_hat[i].std_error) << '\n';

    auto& id = out.csv("local_time_identities.csv",
                       "k,identity,skeleton,skeleton_se,stieltjes,stieltjes_se,oracle,oracle_se,"
                       "max_rearrangement_error,n_paths");
    auto row = [&](const IdentityRow& r, const char* name) {
        id << r.k << ',' << name << ',' << fmt(r.skeleton.mean) << ',' << fmt(r.skeleton.std_error) << ','
           << fmt(r.stieltjes.mean) << ',' << fmt(r.stieltjes.std_error) << ',' << fmt(r.oracle.mean) << ','
           << fmt(r.oracle.std_error) << ',' << fmt(r.max_rearrangement_error) << ',' << r.skeleton.n << '\n';
    };
    for (const auto& r : covariation_identity_check(F, f, s.k_min, s.k_max, opt)) row(r, "covariation");
    for (const auto& r : energy_identity_check(F, f, s.k_min, s.k_max, opt)) row(r, "energy");

    auto& tn = out.csv("tanaka.csv",
                       "k,drift_abs,drift_abs_se,two_l_hat,two_l_hat_se,occupation,occupation_se,normalization,"
                       "normalization_se,n_paths");
    for (int k = s.k_min; k <= s.k_max; ++k) {
        const auto r = tanaka_check(k, opt, default_intensity_table());
        tn << k << ',' << fmt(r.drift_abs.mean) << ',' << fmt(r.drift_abs.std_error) << ',' << fmt(r.two_l_hat.mean)
           << ',' << fmt(r.two_l_hat.std_error) << ',' << fmt(r.occupation.mean) << ','
           << fmt(r.occupation.std_error) << ',' << fmt(r.normalization.mean) << ','
           << fmt(r.normalization.std_error) << ',' << r.drift_abs.n << '\n';
    }
}

void run_fbm(const Settings& s, Output& out) {
    // f = sine unless a functional is named; fbm-sin(H) also fixes H.
    double hurst = s.hurst;
    std::function<double(double)> f = [](double x) { return std::sin(x); };
    if (!s.functional.empty()) {
        const auto fn = functional_by_name(s.functional, s.sim.horizon);
        f = fn.fn;
        if (fn.kind == FunctionalKind::FbmState) hurst = fn.hurst;
    }
    SimulationOptions grid = s.sim;
    grid.engine = Engine::Grid;
    const auto rows = fbm_scan(f, hurst, s.k_min, s.k_max, grid);
    auto& csv = out.csv("fbm.csv",
                        "k,hurst,e2_raw,e2_raw_se,e2_decrease,e2_decrease_se,projection_gap,projection_gap_se,"
                        "gap_decrease,gap_decrease_se,martingale_mean,martingale_mean_se,martingale_m2,"
                        "martingale_m2_se,n_paths");
    for (const auto& r : rows) {
        csv << r.k << ',' << fmt(hurst) << ',' << fmt(r.e2_raw.mean) << ',' << fmt(r.e2_raw.std_error) << ','
            << fmt(r.e2_decrease.mean) << ',' << fmt(r.e2_decrease.std_error) << ',' << fmt(r.projection_gap.mean)
            << ',' << fmt(r.projection_gap.std_error) << ',' << fmt(r.gap_decrease.mean) << ','
            << fmt(r.gap_decrease.std_error) << ',' << fmt(r.martingale_mean.mean) << ','
            << fmt(r.martingale_mean.std_error) << ',' << fmt(r.martingale_second_moment.mean) << ','
            << fmt(r.martingale_second_moment.std_error) << ',' << r.e2_raw.n << '\n';
    }
}

void run_chain_rule(const Settings& s, Output& out) {
    const auto F = state_or_throw(s).fn;
    const auto rows = chain_rule_probe(F, derivative_of(F), s.times, kAllTests, s.k_min, s.k_max, s.sim,
                                       default_intensity_table());
    auto& l = out.csv("chain_rule_left.csv", kProbeHeader);
    auto& r = out.csv("chain_rule_right.csv", kProbeHeader);
    auto& d = out.csv("chain_rule_difference.csv", kProbeHeader);
    for (const auto& row : rows) {
        probe_line(l, row.k, row.t, to_string(row.g), row.left);
        probe_line(r, row.k, row.t, to_string(row.g), row.right);
        probe_line(d, row.k, row.t, to_string(row.g), row.difference);
    }
}

constexpr std::array kExperiments{
    Experiment{"tau-moments", 0, 0, "", run_tau_moments},
    Experiment{"intensity-table", 0, 0, "", run_intensity_table},
    Experiment{"skeleton-sim", 2, 6, "", run_skeleton_sim},
    Experiment{"ito-decompose", 4, 6, "square", run_ito_decompose},
    Experiment{"energy-scan", 3, 7, "square", run_energy_scan},
    Experiment{"covariation", 4, 8, "identity-terminal", run_covariation},
    Experiment{"clark-ocone", 4, 6, "square-terminal", run_clark_ocone},
    Experiment{"local-time", 6, 6, "square", run_local_time},
    Experiment{"fbm", 3, 7, "", run_fbm},
    Experiment{"chain-rule", 4, 6, "square", run_chain_rule},
};

const Experiment* find_experiment(const std::string& name) {
    for (const auto& e : kExperiments)
        if (name == e.name) return &e;
    return nullptr;
}

std::string usage_footer() {
    std::ostringstream os;
    os << "\nExperiments:";
    for (const auto& e : kExperiments) os << ' ' << e.name;
    os << "\n\nConfig file (--config): one 'key = value' per line, '#' starts a comment. Keys are the flag names\n"
          "without dashes:";
    for (const auto& k : kKeys) os << ' ' << k.name;
    os << ".\nFlags given on the command line override the file.\n"
          "\nExit codes: 0 ok, 1 failure, 2 unknown experiment, 3 malformed config, 4 unwritable output directory,\n"
          "5 bad arguments.\n";
    return os.str();
}

void write_manifest(const Output& out, const Experiment& e, const Settings& s, const std::string& config,
                    const std::string& command, double seconds) {
    std::ofstream m(out.dir() / "manifest.txt", std::ios::binary);
    m << "experiment=" << e.name << '\n' << "command=" << command << '\n' << "config_file=" << config << '\n';
    for (const auto& k : kKeys) m << "config." << k.name << '=' << s.raw.at(k.name) << '\n';
    m << "resolved.k_min=" << s.k_min << '\n' << "resolved.k_max=" << s.k_max << '\n';
    m << "resolved.functional=" << s.functional << '\n';
    m << "seed=" << s.sim.seed << '\n';
    m << "version=skelcalc " << SKELCALC_VERSION << '\n';
    m << "compiler=" << __VERSION__ << '\n';
    m << "boost=" << BOOST_LIB_VERSION << '\n';
    m << "files=";
    for (std::size_t i = 0; i < out.files().size(); ++i) m << (i ? "," : "") << out.files()[i];
    m << '\n' << "wall_time_s=" << seconds << '\n';
    if (!m) throw ExitError(kUnwritableOutput, "cannot write manifest.txt");
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty() && args.front() == "run") args.erase(args.begin());

    CLI::App app{"skelcalc: Brownian skeleton calculus experiments", "skelcalc"};
    app.footer(usage_footer());
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    for (const auto& k : kKeys) {
        values[k.name] = k.fallback;
        options[k.name] = app.add_option(std::string("--") + k.name, values[k.name], k.help);
    }
    std::string config;
    app.add_option("--config", config, "flat key = value config file");
    std::string experiment;
    app.add_option("experiment", experiment, "experiment to run")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        if (experiment.empty() || find_experiment(experiment)) {
            app.exit(e);
            return kBadArguments;
        }
    }
    const Experiment* exp = find_experiment(experiment);
    if (!exp) {
        std::cerr << "skelcalc: unknown experiment '" << experiment << "'" << usage_footer();
        return kUnknownExperiment;
    }

    std::set<std::string> from_file;
    if (!config.empty()) {
        for (const auto& [key, value] : read_config(config))
            if (options[key]->count() == 0) {
                values[key] = value;
                from_file.insert(key);
            }
    }
    Settings s;
    try {
        s = resolve(values, *exp);
    } catch (const std::invalid_argument& e) {
        // Blame the config file only when the bad value came from it.
        std::string msg = e.what();
        const auto key = msg.substr(0, msg.find(':'));
        const bool from_config = from_file.count(key) > 0;
        std::cerr << "skelcalc: " << msg << '\n';
        return from_config ? kMalformedConfig : kBadArguments;
    }

    std::string command = "skelcalc";
    for (const auto& a : args) command += ' ' + a;
    Output out(s.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    exp->run(s, out);
    out.close();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out, *exp, s, config.empty() ? "none" : config, command, seconds);
    std::cout << "skelcalc: " << exp->name << " wrote";
    for (const auto& f : out.files()) std::cout << ' ' << f;
    std::cout << " to " << out.dir().string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ExitError& e) {
        std::cerr << "skelcalc: " << e.what() << '\n';
        return e.code;
    } catch (const UsageError& e) {
        std::cerr << "skelcalc: " << e.what() << '\n';
        return kBadArguments;
    } catch (const std::exception& e) {
        std::cerr << "skelcalc: " << e.what() << '\n';
        return kFailure;
    }
}
