#include "kg/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "kg/analytic.hpp"
#include "kg/bgp_solver.hpp"
#include "kg/diagnostics.hpp"
#include "kg/kpp.hpp"
#include "kg/ktransform.hpp"
#include "kg/quadrature.hpp"
#include "kg/td_solver.hpp"

namespace kg::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::set<std::string>& allowed_keys(RunMode mode) {
    static const std::set<std::string> td = {
        "x_max", "n_cells", "alpha0", "n", "alpha_const", "r", "nu", "tau", "T",
        "outer_tol", "max_outer", "snapshot_stride", "mass_tol", "f0_mean", "f0_sd"};
    static const std::set<std::string> bgp = {
        "x_max", "n_cells", "alpha0", "n", "alpha_const", "r", "nu", "theta", "k_tail",
        "omega", "fp_tol", "max_iters", "eps_hjb", "ktr_step", "ktr_xtilde_max"};
    static const std::set<std::string> kt = {
        "k_tilde", "theta", "alpha0", "n", "alpha_const", "s_tilde",
        "xtilde_max", "xtilde_cells", "x_max", "n_cells"};
    static const std::set<std::string> kpp = {
        "nu", "alpha0", "y_min", "y_max", "n_cells", "tau", "T", "front_level"};
    static const std::set<std::string> analytic = {"alpha0", "theta", "k", "nu",
                                                   "x_max", "n_cells"};
    static const std::set<std::string> sweep = [] {
        std::set<std::string> s = bgp;
        s.erase("nu");
        s.insert("sweep_nu");
        return s;
    }();
    switch (mode) {
        case RunMode::Td: return td;
        case RunMode::Bgp: return bgp;
        case RunMode::Ktransform: return kt;
        case RunMode::Kpp: return kpp;
        case RunMode::Analytic: return analytic;
        case RunMode::Sweep: return sweep;
    }
    throw std::logic_error("allowed_keys: bad mode");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

class KeyReader {
public:
    KeyReader(const std::map<std::string, std::string>& keys, std::vector<std::string>& errors)
        : keys_(keys), errors_(errors) {}

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
        auto it = keys_.find(key);
        if (it == keys_.end()) {
            if (fallback) return *fallback;
            errors_.push_back("missing required key '" + key + "'");
            return 0.0;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            errors_.push_back("key '" + key + "': not a number: '" + it->second + "'");
            return 0.0;
        }
    }

    long integer(const std::string& key, std::optional<long> fallback = std::nullopt) const {
        const double v = number(key, fallback ? std::optional<double>(*fallback) : std::nullopt);
        return std::lround(v);
    }

    bool flag(const std::string& key, bool fallback) const {
        auto it = keys_.find(key);
        if (it == keys_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        errors_.push_back("key '" + key + "': not a boolean: '" + it->second + "'");
        return fallback;
    }

    bool has(const std::string& key) const { return keys_.count(key) > 0; }
    const std::string& raw(const std::string& key) const { return keys_.at(key); }

private:
    const std::map<std::string, std::string>& keys_;
    std::vector<std::string>& errors_;
};

LearningFunction read_lf(const KeyReader& rd, std::vector<std::string>& errors) {
    const double alpha0 = rd.number("alpha0");
    const bool constant = rd.flag("alpha_const", false);
    if (constant && rd.has("n")) errors.push_back("key 'n' conflicts with alpha_const=true");
    if (!constant && !rd.has("n")) errors.push_back("missing required key 'n'");
    try {
        if (constant) return LearningFunction::constant(alpha0);
        return LearningFunction::power(alpha0, rd.number("n", 0.5));
    } catch (const std::exception& e) {
        errors.push_back(e.what());
        return LearningFunction::power(0.075, 0.3);
    }
}

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

json config_json(const RunSpec& spec) {
    json j;
    j["mode"] = mode_name(spec.mode);
    for (const auto& [k, v] : spec.keys) j[k] = v;
    return j;
}

void write_report(const RunSpec& spec, json body) {
    body["config"] = config_json(spec);
    write_text(std::filesystem::path(spec.out_dir) / "report.json", body.dump(2) + "\n");
}

// ---------------------------------------------------------------- td mode

struct TdSetup {
    TdConfig cfg;
    double f0_mean, f0_sd;
};

TdSetup read_td(const RunSpec& spec, std::vector<std::string>& errors) {
    KeyReader rd(spec.keys, errors);
    TdSetup s{};
    const double xmax = rd.number("x_max", 20.0);
    const long cells = rd.integer("n_cells", 1000);
    try {
        s.cfg.grid = UniformGrid(xmax, static_cast<std::size_t>(std::max(2L, cells)));
    } catch (const std::exception& e) {
        errors.push_back(e.what());
    }
    s.cfg.lf = read_lf(rd, errors);
    s.cfg.tau = rd.number("tau", 0.05);
    s.cfg.horizon = rd.number("T", 100.0);
    s.cfg.nu = rd.number("nu", 0.0);
    s.cfg.r = rd.number("r", 0.05);
    s.cfg.outer_tol = rd.number("outer_tol", 1e-6);
    s.cfg.max_outer = static_cast<int>(rd.integer("max_outer", 200));
    s.cfg.snapshot_stride = static_cast<std::size_t>(rd.integer("snapshot_stride", 0));
    s.cfg.mass_tol = rd.number("mass_tol", tol::mass_tol);
    s.f0_mean = rd.number("f0_mean", 5.0);
    s.f0_sd = rd.number("f0_sd", 1.0);
    if (errors.empty()) {
        try {
            s.cfg.validate();
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    }
    return s;
}

void write_td_outputs(const RunSpec& spec, const TdConfig& cfg, const TdTrace& trace) {
    const std::filesystem::path dir(spec.out_dir);
    for (std::size_t j = 0; j < trace.snapshot_times.size(); ++j) {
        char tbuf[32];
        std::snprintf(tbuf, sizeof tbuf, "%g", trace.snapshot_times[j]);
        std::ostringstream name;
        name << "profiles_" << tbuf << ".csv";
        std::ostringstream body;
        body << "x,f,V,S\n";
        for (std::size_t i = 0; i < cfg.grid.n_nodes(); ++i)
            body << fmt(cfg.grid.node(i)) << ',' << fmt(trace.f_snapshots[j].values[i]) << ','
                 << fmt(trace.v_snapshots[j].values[i]) << ','
                 << fmt(trace.s_snapshots[j].values[i]) << '\n';
        write_text(dir / name.str(), body.str());
    }
    std::ostringstream series;
    series << "t,Y,mass\n";
    for (std::size_t k = 0; k < trace.times.size(); ++k)
        series << fmt(trace.times[k]) << ',' << fmt(trace.production[k]) << ','
               << fmt(trace.total_mass[k]) << '\n';
    write_text(dir / "series.csv", series.str());
}

int exec_td(const RunSpec& spec) {
    std::vector<std::string> errors;
    TdSetup s = read_td(spec, errors);
    if (!errors.empty()) {
        for (const auto& e : errors) std::fprintf(stderr, "config error: %s\n", e.c_str());
        return 3;
    }
    const DensityProfile f0 = gaussian_density(s.cfg.grid, s.f0_mean, s.f0_sd);
    const TdTrace trace = run_td(s.cfg, f0);
    write_td_outputs(spec, s.cfg, trace);

    const GrowthReport growth = growth_rate_fit(trace.production, trace.times);
    const DegeneracyReport degen = degeneracy_check(trace);
    double mass_defect = 0.0;
    for (double m : trace.total_mass) mass_defect = std::max(mass_defect, std::abs(m - 1.0));

    json rep;
    rep["converged"] = trace.converged;
    rep["outer_iterations"] = trace.outer_iterations;
    rep["growth_fit"] = {{"gamma_hat", growth.gamma_hat},
                         {"t_a", growth.t_a},
                         {"t_b", growth.t_b},
                         {"r_squared", growth.r_squared},
                         {"monotone", growth.monotone},
                         {"fit_valid", growth.fit_valid}};
    rep["degeneracy"] = {{"degenerate", degen.degenerate},
                         {"low_mass_fraction", degen.low_mass_fraction},
                         {"production_decreasing", degen.production_decreasing}};
    rep["invariants"] = {{"mass_defect_max", mass_defect},
                         {"mass_conserved", mass_defect <= s.cfg.mass_tol},
                         {"min_density", trace.min_density},
                         {"density_nonnegative", trace.min_density >= -1e-12},
                         {"policy_monotone", trace.policy_monotone}};
    write_report(spec, rep);
    return trace.converged ? 0 : 2;
}

// --------------------------------------------------------------- bgp mode

BgpConfig read_bgp(const RunSpec& spec, std::vector<std::string>& errors,
                   std::optional<double> nu_override = std::nullopt) {
    KeyReader rd(spec.keys, errors);
    BgpConfig cfg{};
    const double xmax = rd.number("x_max", 20.0);
    const long cells = rd.integer("n_cells", 1000);
    try {
        cfg.grid = UniformGrid(xmax, static_cast<std::size_t>(std::max(2L, cells)));
    } catch (const std::exception& e) {
        errors.push_back(e.what());
    }
    cfg.lf = read_lf(rd, errors);
    cfg.nu = nu_override ? *nu_override : rd.number("nu", 0.0);
    cfg.r = rd.number("r", 0.1);
    cfg.theta = rd.number("theta", 0.0);
    cfg.k_tail = rd.number("k_tail", 0.0);
    cfg.omega = rd.number("omega", 0.75);
    cfg.fp_tol = rd.number("fp_tol", 1e-8);
    cfg.max_iters = static_cast<int>(rd.integer("max_iters", 5000));
    cfg.eps_hjb = rd.number("eps_hjb", 0.0);
    cfg.ktr_step = rd.number("ktr_step", 2e-3);
    cfg.ktr_xtilde_max = rd.number("ktr_xtilde_max", 4000.0);
    if (errors.empty()) {
        try {
            cfg.validate();
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    }
    return cfg;
}

json bgp_solution_json(const BgpSolution& sol, const BgpConfig& cfg) {
    json rep;
    rep["converged"] = sol.converged;
    rep["degenerate"] = sol.degenerate;
    rep["iterations"] = sol.iterations;
    rep["gamma"] = sol.gamma;
    rep["x0"] = sol.x0.x0;
    rep["Y0"] = production_level(sol);
    rep["residuals"] = {{"boltzmann", sol.residuals.boltzmann},
                        {"hjb", sol.residuals.hjb},
                        {"gamma_defect", sol.residuals.gamma_defect},
                        {"constraint_force", sol.residuals.constraint_force}};
    json inv = json::array();
    for (const auto& r : check_bgp_invariants(sol, cfg))
        inv.push_back({{"name", r.name},
                       {"pass", r.pass},
                       {"measured", r.measured},
                       {"threshold", r.threshold}});
    rep["invariants"] = inv;
    try {
        const ParetoFit fit = pareto_fit(cdf_from_density(sol.phi));
        rep["pareto_fit"] = {{"theta_hat", fit.theta_hat},
                             {"k_hat", fit.k_hat},
                             {"x_a", fit.x_a},
                             {"x_b", fit.x_b},
                             {"residual", fit.residual}};
    } catch (const std::exception& e) {
        rep["pareto_fit"] = {{"error", e.what()}};
    }
    const DegeneracyReport degen = degeneracy_check(sol);
    rep["degeneracy"] = {{"degenerate", degen.degenerate},
                         {"low_mass_fraction", degen.low_mass_fraction},
                         {"gamma", degen.gamma}};
    return rep;
}

void write_bgp_profiles(const std::filesystem::path& dir, const BgpSolution& sol) {
    std::ostringstream body;
    body << "x,phi,v,S\n";
    for (std::size_t i = 0; i < sol.phi.values.size(); ++i)
        body << fmt(sol.phi.grid.node(i)) << ',' << fmt(sol.phi.values[i]) << ','
             << fmt(sol.v.values[i]) << ',' << fmt(sol.s.values[i]) << '\n';
    write_text(dir / "profiles.csv", body.str());
}

int exec_bgp(const RunSpec& spec) {
    std::vector<std::string> errors;
    BgpConfig cfg = read_bgp(spec, errors);
    if (!errors.empty()) {
        for (const auto& e : errors) std::fprintf(stderr, "config error: %s\n", e.c_str());
        return 3;
    }
    const BgpSolution sol = run_bgp(cfg);
    write_bgp_profiles(spec.out_dir, sol);
    write_report(spec, bgp_solution_json(sol, cfg));
    return sol.converged || sol.degenerate ? 0 : 2;
}

// ------------------------------------------------------------- sweep mode

std::vector<double> parse_value_list(const std::string& csv, std::vector<std::string>& errors) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(trim(item)));
        } catch (const std::exception&) {
            errors.push_back("sweep_nu: not a number: '" + item + "'");
        }
    }
    if (out.empty()) errors.push_back("sweep_nu: empty value list");
    return out;
}

unsigned sweep_parallelism(std::size_t cells) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("KG_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) n = static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    if (n == 0) n = 1;
    return static_cast<unsigned>(std::min<std::size_t>(n, cells));
}

int exec_sweep(const RunSpec& spec) {
    std::vector<std::string> errors;
    KeyReader rd(spec.keys, errors);
    std::vector<double> nus;
    if (!rd.has("sweep_nu"))
        errors.push_back("missing required key 'sweep_nu'");
    else
        nus = parse_value_list(rd.raw("sweep_nu"), errors);
    std::vector<BgpConfig> cfgs;
    for (double nu : nus) cfgs.push_back(read_bgp(spec, errors, nu));
    if (!errors.empty()) {
        for (const auto& e : errors) std::fprintf(stderr, "config error: %s\n", e.c_str());
        return 3;
    }

    std::vector<std::optional<BgpSolution>> sols(cfgs.size());
    std::vector<std::string> failures(cfgs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfgs.size()) return;
            try {
                sols[i] = run_bgp(cfgs[i]);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    const unsigned nthreads = sweep_parallelism(cfgs.size());
    {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const std::filesystem::path dir(spec.out_dir);
    std::ostringstream series;
    series << "nu,gamma,x0,Y0\n";
    json cells = json::array();
    bool all_converged = true;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        if (!sols[i]) {
            std::fprintf(stderr, "sweep cell nu=%s failed: %s\n", fmt(cfgs[i].nu).c_str(),
                         failures[i].c_str());
            return 2;
        }
        const BgpSolution& sol = *sols[i];
        const std::filesystem::path cell = dir / ("cell_" + std::to_string(i));
        std::filesystem::create_directories(cell);
        write_bgp_profiles(cell, sol);
        series << fmt(cfgs[i].nu) << ',' << fmt(sol.gamma) << ',' << fmt(sol.x0.x0) << ','
               << fmt(production_level(sol)) << '\n';
        json cj = bgp_solution_json(sol, cfgs[i]);
        cj["nu"] = cfgs[i].nu;
        cells.push_back(cj);
        all_converged = all_converged && (sol.converged || sol.degenerate);
    }
    write_text(dir / "series.csv", series.str());
    json rep;
    rep["cells"] = cells;
    write_report(spec, rep);
    return all_converged ? 0 : 2;
}

// --------------------------------------------------------- ktransform mode

int exec_ktransform(const RunSpec& spec) {
    std::vector<std::string> errors;
    KeyReader rd(spec.keys, errors);
    const double k_tilde = rd.number("k_tilde", 1.0);
    const double theta = rd.number("theta", 0.3);
    LearningFunction lf = read_lf(rd, errors);
    const double s_tilde = rd.number("s_tilde", 1.0);
    const double xtilde_max = rd.number("xtilde_max", 1000.0 / lf.alpha(1.0) * k_tilde);
    const auto cells = static_cast<std::size_t>(rd.integer("xtilde_cells", 1000000));
    if (!(s_tilde >= 0.0 && s_tilde <= 1.0)) errors.push_back("s_tilde must lie in [0,1]");
    if (!errors.empty()) {
        for (const auto& e : errors) std::fprintf(stderr, "config error: %s\n", e.c_str());
        return 3;
    }

    const std::vector<double> alpha_samples(cells + 1, lf.alpha(s_tilde));
    const KProfile kp = solve_k(k_tilde, alpha_samples, theta, xtilde_max, cells);
    const double gamma = gamma_from_k(kp);

    const std::filesystem::path dir(spec.out_dir);
    std::ostringstream body;
    body << "xtilde,K,I\n";
    const std::size_t stride = std::max<std::size_t>(1, cells / 2000);
    for (std::size_t i = 0; i <= cells; i += stride)
        body << fmt(kp.node(i)) << ',' << fmt(kp.k_values[i]) << ',' << fmt(kp.constraint[i])
             << '\n';
    write_text(dir / "kprofile.csv", body.str());

    json rep;
    rep["gamma"] = gamma;
    rep["xtk_limit"] = xtk_limit(kp);
    rep["k"] = gamma * k_tilde / theta;
    rep["constraint_final"] = kp.constraint.back();
    if (rd.has("x_max")) {
        const UniformGrid xgrid(rd.number("x_max", 20.0),
                                static_cast<std::size_t>(rd.integer("n_cells", 1000)));
        const CdfProfile cdf = phi_from_k(kp, gamma, xgrid);
        std::ostringstream cb;
        cb << "x,Phi\n";
        for (std::size_t i = 0; i < cdf.values.size(); ++i)
            cb << fmt(xgrid.node(i)) << ',' << fmt(cdf.values[i]) << '\n';
        write_text(dir / "cdf.csv", cb.str());
    }
    write_report(spec, rep);
    return 0;
}

// --------------------------------------------------------------- kpp mode

int exec_kpp(const RunSpec& spec) {
    std::vector<std::string> errors;
    KeyReader rd(spec.keys, errors);
    KppConfig cfg{};
    cfg.nu = rd.number("nu", 0.005);
    cfg.alpha0 = rd.number("alpha0", 0.075);
    cfg.y_min = rd.number("y_min", -15.0);
    cfg.y_max = rd.number("y_max", 80.0);
    cfg.n_cells = static_cast<std::size_t>(rd.integer("n_cells", 3800));
    cfg.tau = rd.number("tau", 0.5);
    cfg.horizon = rd.number("T", 800.0);
    const double level = rd.number("front_level", 0.5);
    if (errors.empty()) {
        try {
            cfg.validate();
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    }
    if (!errors.empty()) {
        for (const auto& e : errors) std::fprintf(stderr, "config error: %s\n", e.c_str());
        return 3;
    }
    const KppTrace trace = kpp_run(cfg, kpp_step_front(cfg));
    const double speed = front_speed(trace, level);
    const double oracle = kpp_wave_speed(cfg.nu, cfg.alpha0);

    const std::filesystem::path dir(spec.out_dir);
    std::ostringstream series;
    series << "t,front_pos\n";
    for (std::size_t k = 0; k < trace.snapshot_times.size(); ++k) {
        const auto& g = trace.g_snapshots[k];
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            if (g[i] >= level && g[i + 1] < level) {
                const double t = (g[i] - level) / (g[i] - g[i + 1]);
                series << fmt(trace.snapshot_times[k]) << ','
                       << fmt(trace.y[i] + t * (trace.y[i + 1] - trace.y[i])) << '\n';
                break;
            }
        }
    }
    write_text(dir / "series.csv", series.str());

    json rep;
    rep["measured_speed"] = speed;
    rep["oracle_speed"] = oracle;
    rep["relative_error"] = (speed - oracle) / oracle;
    rep["truncation_warning"] = trace.truncation_warning;
    write_report(spec, rep);
    return 0;
}

// ----------------------------------------------------------- analytic mode

int exec_analytic(const RunSpec& spec) {
    std::vector<std::string> errors;
    KeyReader rd(spec.keys, errors);
    const double alpha0 = rd.number("alpha0", 0.075);
    const double theta = rd.number("theta", 0.3);
    const double k = rd.number("k", 1.0);
    const double xmax = rd.number("x_max", 20.0);
    const long cells = rd.integer("n_cells", 1000);
    if (!errors.empty()) {
        for (const auto& e : errors) std::fprintf(stderr, "config error: %s\n", e.c_str());
        return 3;
    }
    try {
        const UniformGrid grid(xmax, static_cast<std::size_t>(std::max(2L, cells)));
        const ConstantAlphaBgp sol = constant_alpha_bgp(alpha0, ParetoParams(k, theta), grid);
        std::ostringstream body;
        body << "x,Phi\n";
        for (std::size_t i = 0; i < sol.cdf.values.size(); ++i)
            body << fmt(grid.node(i)) << ',' << fmt(sol.cdf.values[i]) << '\n';
        write_text(std::filesystem::path(spec.out_dir) / "cdf.csv", body.str());
        json rep;
        rep["gamma"] = sol.gamma;
        if (rd.has("nu")) rep["kpp_speed"] = kpp_wave_speed(rd.number("nu", 0.0), alpha0);
        write_report(spec, rep);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 3;
    }
}

} // namespace

RunMode parse_mode(const std::string& word) {
    if (word == "td") return RunMode::Td;
    if (word == "bgp") return RunMode::Bgp;
    if (word == "ktransform") return RunMode::Ktransform;
    if (word == "kpp") return RunMode::Kpp;
    if (word == "analytic") return RunMode::Analytic;
    if (word == "sweep") return RunMode::Sweep;
    throw std::invalid_argument("unknown mode '" + word +
                                "' (expected td|bgp|ktransform|kpp|analytic|sweep)");
}

std::string mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::Td: return "td";
        case RunMode::Bgp: return "bgp";
        case RunMode::Ktransform: return "ktransform";
        case RunMode::Kpp: return "kpp";
        case RunMode::Analytic: return "analytic";
        case RunMode::Sweep: return "sweep";
    }
    return "?";
}

RunSpec parse_config(RunMode mode, const std::string& config_path,
                     std::span<const std::string> overrides, const std::string& out_dir) {
    RunSpec spec;
    spec.mode = mode;
    spec.out_dir = out_dir;
    const auto& allowed = allowed_keys(mode);

    auto put = [&](const std::string& key, const std::string& value, const std::string& where) {
        if (!allowed.count(key))
            throw std::invalid_argument("unknown key '" + key + "' (" + where + ")");
        spec.keys[key] = value;
    };

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(config_path + ":" + std::to_string(lineno) +
                                            ": expected key = value");
            put(trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                config_path + ":" + std::to_string(lineno));
        }
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override '" + ov + "': expected key=value");
        put(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)), "command line");
    }
    return spec;
}

int execute(const RunSpec& spec) {
    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    if (ec || !std::filesystem::is_directory(spec.out_dir)) {
        std::fprintf(stderr, "cannot create output directory %s\n", spec.out_dir.c_str());
        return 3;
    }
    try {
        switch (spec.mode) {
            case RunMode::Td: return exec_td(spec);
            case RunMode::Bgp: return exec_bgp(spec);
            case RunMode::Ktransform: return exec_ktransform(spec);
            case RunMode::Kpp: return exec_kpp(spec);
            case RunMode::Analytic: return exec_analytic(spec);
            case RunMode::Sweep: return exec_sweep(spec);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    }
    return 3;
}

int run_main(std::span<const std::string> args) {
    if (args.empty()) {
        std::fprintf(stderr,
                     "usage: kg <td|bgp|ktransform|kpp|analytic|sweep> [--config <path>] "
                     "[--key=value ...] --out <dir>\n");
        return 3;
    }
    try {
        const RunMode mode = parse_mode(args[0]);
        std::string config_path, out_dir;
        std::vector<std::string> overrides;
        for (std::size_t i = 1; i < args.size(); ++i) {
            const std::string& a = args[i];
            auto value_of = [&](const std::string& flag) -> std::string {
                if (a.size() > flag.size() && a.compare(0, flag.size() + 1, flag + "=") == 0)
                    return a.substr(flag.size() + 1);
                if (++i >= args.size())
                    throw std::invalid_argument(flag + " needs a value");
                return args[i];
            };
            if (a == "--config" || a.rfind("--config=", 0) == 0) {
                config_path = value_of("--config");
            } else if (a == "--out" || a.rfind("--out=", 0) == 0) {
                out_dir = value_of("--out");
            } else if (a.rfind("--", 0) == 0) {
                overrides.push_back(a.substr(2));
            } else {
                throw std::invalid_argument("unexpected argument '" + a + "'");
            }
        }
        if (out_dir.empty()) throw std::invalid_argument("--out <dir> is required");
        const RunSpec spec = parse_config(mode, config_path, overrides, out_dir);
        return execute(spec);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace kg::cli
