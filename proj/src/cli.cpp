#include "cgame/cli.hpp"

#include "cgame/errors.hpp"
#include "cgame/simulate.hpp"
#include "cgame/single_game.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace cgame::cli {

using nlohmann::json;

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

namespace {

json params_json(const ModelParams& p) {
    return {{"mu", round12(p.mu)},
            {"sigma", round12(p.sigma)},
            {"r", round12(p.r)},
            {"alpha", round12(p.alpha_profit)},
            {"k", round12(p.k)}};
}

template <class T>
T read_key(const json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("equilibrium record: key '") + key + "': " + e.what());
    }
}

}  // namespace

json equilibrium_to_json(const MixedEquilibrium& eq, const ModelParams& params) {
    return {{"game", "mixed"},
            {"params", params_json(params)},
            {"c1", round12(eq.c1)},
            {"c2", round12(eq.c2)},
            {"theta_star", round12(eq.theta_star)},
            {"z1", round12(eq.z1)},
            {"z2", round12(eq.z2)},
            {"q", round12(eq.q)},
            {"w", round12(eq.w)},
            {"u1", round12(eq.u1)}};
}

MixedEquilibrium equilibrium_from_json(const json& doc, ModelParams& params) {
    if (!doc.is_object()) throw ConfigError("equilibrium record must be a JSON object");
    const auto p = read_key<json>(doc, "params");
    params.mu = read_key<double>(p, "mu");
    params.sigma = read_key<double>(p, "sigma");
    params.r = read_key<double>(p, "r");
    params.alpha_profit = read_key<double>(p, "alpha");
    params.k = read_key<double>(p, "k");
    MixedEquilibrium eq{};
    eq.theta_star = read_key<double>(doc, "theta_star");
    eq.z1 = read_key<double>(doc, "z1");
    eq.z2 = read_key<double>(doc, "z2");
    eq.q = read_key<double>(doc, "q");
    eq.w = read_key<double>(doc, "w");
    eq.u1 = read_key<double>(doc, "u1");
    eq.c1 = read_key<double>(doc, "c1");
    eq.c2 = read_key<double>(doc, "c2");
    return eq;
}

json error_json(const std::string& condition, const std::string& message) {
    return {{"error", {{"condition", condition}, {"message", message}}}};
}

namespace {

struct Common {
    ModelParams params;
    double c1 = 0.0165;
    double c2 = 0.015;
    std::string out_dir = ".";
};

void check_inputs(const Common& c) {
    validate(c.params);
    if (!(c.c1 > 0.0 && std::isfinite(c.c1)) || !(c.c2 > 0.0 && std::isfinite(c.c2))) {
        throw ParameterError("costs c1 and c2 must be positive");
    }
}

void write_file(const Common& c, const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir(c.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream f(dir / name, std::ios::binary);
    f << content;
    if (!f) throw Error("cannot write " + (dir / name).string());
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json residual_json(const EquilibriumCheck& chk) {
    return {{"i_level", round12(chk.i_level)},
            {"j_gap_c2", round12(chk.j_gap_c2)},
            {"j_gap_c1", round12(chk.j_gap_c1)},
            {"u1_boundary", round12(chk.u1_boundary)},
            {"w_mismatch", round12(chk.w_mismatch)},
            {"u1_mismatch", round12(chk.u1_mismatch)}};
}

json condition_json(const EquilibriumCheck& chk) {
    return {{"optimal_u", chk.optimal_u},
            {"q_range", chk.q_range},
            {"ordering", chk.ordering},
            {"coefficients", chk.coefficients}};
}

struct SolveOpts {
    std::string game = "mixed";
    double scale = 1.0;
};

json cmd_solve(const Common& c, const SolveOpts& o) {
    const auto& p = c.params;
    if (o.game == "single") {
        const GbmModel m(p);
        const auto s1 = stopping_threshold(m, c.c1);
        const auto s2 = stopping_threshold(m, c.c2);
        const auto gap = asymmetry_diagnostic(m, c.c1, c.c2);
        auto player = [](const StoppingSolution& s) {
            return json{{"theta", round12(s.theta)}, {"alpha_coef", round12(s.alpha_coef)},
                        {"cost", round12(s.cost)}};
        };
        return {{"game", "single"},          {"params", params_json(p)},
                {"c1", round12(c.c1)},        {"c2", round12(c.c2)},
                {"z_star", round12(s1.z_star)}, {"player1", player(s1)},
                {"player2", player(s2)},      {"gap", round12(gap.gap)}};
    }
    if (o.game == "impulse") {
        const auto pol = solve_single_impulse(p, c.c2, o.scale);
        return {{"game", "impulse"},       {"params", params_json(p)},
                {"cost", round12(pol.cost)}, {"scale", round12(pol.profit_scale)},
                {"theta", round12(pol.theta)}, {"z", round12(pol.z)},
                {"coef", round12(pol.coef)}};
    }
    const auto eq = solve_mixed_tsspe(p, c.c1, c.c2);
    const auto chk = check_equilibrium(eq, p);
    const auto pe = pure_equilibrium(p, c.c1, c.c2);
    auto doc = equilibrium_to_json(eq, p);
    doc["residuals"] = residual_json(chk);
    doc["conditions"] = condition_json(chk);
    doc["pure"] = {{"beta", round12(pe.beta)},
                   {"neg_I_xhat", round12(pe.neg_I_xhat)},
                   {"valid", pe.valid}};
    return doc;
}

struct SweepOpts {
    double from = 0.0;
    double to = 0.0;
    double step = 5e-4;
};

std::string cmd_sweep(const Common& c, const SweepOpts& o) {
    if (!(o.step > 0.0)) throw ConfigError("sweep step must be positive");
    std::ostringstream csv;
    csv << std::setprecision(12) << "c1,valid,theta_star,z1,z2,q\n";
    if (o.from > o.to) return csv.str();
    const auto n = static_cast<long>(std::floor((o.to - o.from) / o.step + 1e-9)) + 1;
    // theta* and z2 depend on c2 only.
    const auto p2 = solve_single_impulse(c.params, c.c2);
    for (long i = 0; i < n; ++i) {
        const double c1 = o.from + static_cast<double>(i) * o.step;
        csv << round12(c1) << ',';
        try {
            const auto eq = solve_mixed_tsspe(c.params, c1, c.c2);
            csv << "1," << eq.theta_star << ',' << eq.z1 << ',' << eq.z2 << ',' << eq.q << '\n';
        } catch (const EquilibriumError&) {
            csv << "0," << p2.theta << ",," << p2.z << ",\n";
        }
    }
    return csv.str();
}

struct SimOpts {
    SimConfig cfg;
    bool t_max_given = false;
    std::uint64_t path_index = 0;
};

json cmd_simulate(const Common& c, SimOpts o) {
    const auto& p = c.params;
    if (!o.t_max_given) o.cfg.t_max = default_sim_config(p).t_max;
    if (o.cfg.n_paths < 2) throw ConfigError("n-paths must be at least 2 for a standard error");
    const auto eq = solve_mixed_tsspe(p, c.c1, c.c2);
    validate_config(o.cfg, eq, p);
    const auto est = estimate_payoffs(eq, p, o.cfg);
    const GbmModel m(p);
    const double u1 = value_U1(eq, m, o.cfg.x0);
    const double v2 = value_V(eq, m, Player::Two, o.cfg.x0);

    const auto path = simulate_path(eq, p, o.cfg, o.path_index);
    std::ostringstream path_csv, events_csv;
    write_path_csv(path, path_csv);
    write_events_csv(path, events_csv);
    write_file(c, "path.csv", path_csv.str());
    write_file(c, "events.csv", events_csv.str());

    json doc = {{"mean1", round12(est.mean1)},
                {"mean2", round12(est.mean2)},
                {"se1", round12(est.se1)},
                {"se2", round12(est.se2)},
                {"n", est.n},
                {"analytic", {{"U1", round12(u1)}, {"V2", round12(v2)}}},
                {"z_scores",
                 {{"player1", round12((est.mean1 - u1) / est.se1)},
                  {"player2", round12((est.mean2 - v2) / est.se2)}}},
                {"config",
                 {{"dt", round12(o.cfg.dt)},
                  {"t_max", round12(o.cfg.t_max)},
                  {"seed", o.cfg.seed},
                  {"x0", round12(o.cfg.x0)},
                  {"path_index", o.path_index}}},
                {"equilibrium", equilibrium_to_json(eq, p)}};
    write_file(c, "payoff.json", dump(doc));
    return doc;
}

struct CompareOpts {
    std::optional<double> from;
    std::optional<double> to;
    int points = 50;
};

std::string cmd_compare(const Common& c, const CompareOpts& o) {
    if (o.points < 1) throw ConfigError("compare needs at least one grid point");
    const auto& p = c.params;
    const auto pe = pure_equilibrium(p, c.c1, c.c2);
    const double lo = o.from.value_or(0.5 * pe.policy2.theta);
    const double hi = o.to.value_or(4.0 * pe.policy2.z);
    if (!(lo > 0.0) || (o.points > 1 && !(hi > lo))) {
        throw ConfigError("compare grid needs 0 < from < to");
    }
    std::vector<double> grid(o.points);
    for (int i = 0; i < o.points; ++i) {
        grid[i] = o.points == 1 ? lo : lo + (hi - lo) * i / (o.points - 1);
    }
    const auto rows = efficiency_compare(p, c.c1, c.c2, grid);
    std::ostringstream csv;
    csv << std::setprecision(12);
    csv << "# beta=" << pe.beta << "\n# neg_I_xhat=" << pe.neg_I_xhat << '\n';
    csv << "x,V_M,V_P,V_S\n";
    for (const auto& r : rows) {
        csv << r.x << ',' << r.v_mixed << ',' << r.v_pure << ',' << r.v_planner << '\n';
    }
    return csv.str();
}

json cmd_check(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path);
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    ModelParams p;
    const auto eq = equilibrium_from_json(doc, p);
    validate(p);
    const auto chk = check_equilibrium(eq, p);
    return {{"ok", chk.ok()}, {"residuals", residual_json(chk)}, {"conditions", condition_json(chk)}};
}

int fail(std::ostream& out, std::ostream& err, const std::string& condition, const char* what,
         int code) {
    out << dump(error_json(condition, what));
    err << "error: " << what << '\n';
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Solve and simulate the two-player impulse investment game.", "cgame"};
    app.require_subcommand(1, 1);
    app.set_config("--config", "", "Flat key=value file with option values");

    Common c;
    app.add_option("--mu", c.params.mu, "Drift coefficient (< 0)")->capture_default_str();
    app.add_option("--sigma", c.params.sigma, "Volatility (> 0)")->capture_default_str();
    app.add_option("--r", c.params.r, "Discount rate (> 0)")->capture_default_str();
    app.add_option("--alpha", c.params.alpha_profit, "Profit exponent in (0, 1)")
        ->capture_default_str();
    app.add_option("--k", c.params.k, "Proportional boost cost (> 0)")->capture_default_str();
    app.add_option("--c1", c.c1, "Upfront cost of player 1")->capture_default_str();
    app.add_option("--c2", c.c2, "Upfront cost of player 2")->capture_default_str();
    app.add_option("--out", c.out_dir, "Output directory")->capture_default_str();

    SolveOpts so;
    auto* solve = app.add_subcommand("solve", "Solve an equilibrium and print it as JSON");
    solve->add_option("--game", so.game, "mixed | single | impulse")
        ->check(CLI::IsMember({"mixed", "single", "impulse"}))
        ->capture_default_str();
    solve->add_option("--scale", so.scale, "Profit scale for --game impulse (2 = planner)")
        ->capture_default_str();

    SweepOpts sw;
    auto* sweep = app.add_subcommand("sweep", "Solve over a c1 range and print CSV");
    sweep->add_option("--c1-from", sw.from, "First c1")->required();
    sweep->add_option("--c1-to", sw.to, "Last c1 (inclusive)")->required();
    sweep->add_option("--c1-step", sw.step, "Step")->capture_default_str();

    SimOpts sim{default_sim_config(c.params)};
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo payoffs of the mixed equilibrium");
    simulate->add_option("--n-paths", sim.cfg.n_paths, "Number of paths (>= 2)")
        ->capture_default_str();
    simulate->add_option("--dt", sim.cfg.dt, "Time step")->capture_default_str();
    auto* t_max = simulate->add_option("--t-max", sim.cfg.t_max, "Horizon (default 20 / r)");
    simulate->add_option("--seed", sim.cfg.seed, "Base seed")->capture_default_str();
    simulate->add_option("--x0", sim.cfg.x0, "Initial state")->capture_default_str();
    simulate->add_option("--threads", sim.cfg.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    simulate->add_option("--path-index", sim.path_index, "Path exported to path.csv/events.csv")
        ->capture_default_str();

    CompareOpts co;
    auto* compare = app.add_subcommand("compare", "Total payoffs: mixed, pure and planner");
    compare->add_option("--x-from", co.from, "First grid point (default theta*/2)");
    compare->add_option("--x-to", co.to, "Last grid point (default 4 z2)");
    compare->add_option("--points", co.points, "Number of grid points")->capture_default_str();

    std::string check_in;
    auto* check = app.add_subcommand("check", "Re-validate a JSON equilibrium record");
    check->add_option("file", check_in, "Record written by solve")->required();

    for (auto* s : {solve, sweep, simulate, compare, check}) s->fallthrough();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
    }
    sim.t_max_given = t_max->count() > 0;

    try {
        if (check->parsed()) {
            const auto doc = cmd_check(check_in);
            out << dump(doc);
            return doc["ok"].get<bool>() ? kSuccess : kFailure;
        }
        check_inputs(c);
        if (solve->parsed()) {
            const auto doc = cmd_solve(c, so);
            write_file(c, "solve.json", dump(doc));
            out << dump(doc);
        } else if (sweep->parsed()) {
            const auto csv = cmd_sweep(c, sw);
            write_file(c, "sweep.csv", csv);
            out << csv;
        } else if (simulate->parsed()) {
            out << dump(cmd_simulate(c, sim));
        } else if (compare->parsed()) {
            const auto csv = cmd_compare(c, co);
            write_file(c, "compare.csv", csv);
            out << csv;
        }
        return kSuccess;
    } catch (const EquilibriumError& e) {
        return fail(out, err, std::string(condition_name(e.condition())), e.what(), kFailure);
    } catch (const NoSolutionError& e) {
        const bool pure = std::string_view(e.what()).starts_with("pure-suff");
        return fail(out, err, pure ? "pure-suff" : "no-solution", e.what(), kFailure);
    } catch (const ParameterError& e) {
        return fail(out, err, "parameter", e.what(), kUsage);
    } catch (const ConfigError& e) {
        return fail(out, err, "config", e.what(), kUsage);
    } catch (const DomainError& e) {
        return fail(out, err, "domain", e.what(), kFailure);
    } catch (const NumericalError& e) {
        return fail(out, err, "numerical", e.what(), kFailure);
    } catch (const std::exception& e) {
        return fail(out, err, "internal", e.what(), kFailure);
    }
}

}  // namespace cgame::cli
