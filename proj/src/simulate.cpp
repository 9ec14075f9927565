#include "cgame/simulate.hpp"

#include "cgame/errors.hpp"
#include "cgame/roots.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace cgame {

SimConfig default_sim_config(const ModelParams& params) {
    SimConfig cfg;
    cfg.t_max = 20.0 / params.r;
    return cfg;
}

HazardTable::HazardTable(const MixedEquilibrium& eq, const GbmModel& m)
    : slope_((m.params().r - m.params().mu) * m.params().k), k_(m.params().k) {
    for (Player i : {Player::One, Player::Two}) {
        const Player j = other(i);
        const double zj = j == Player::One ? eq.z1 : eq.z2;
        const double cj = j == Player::One ? eq.c1 : eq.c2;
        const double zi = i == Player::One ? eq.z1 : eq.z2;
        const double a = first_stage_value(eq, m, j, zj) - k_ * zj - cj;
        numer_const_[index(i)] = m.params().r * a;
        denom_const_[index(i)] = first_stage_value(eq, m, j, zi) - a;
    }
}

double HazardTable::rate(Player investor, double x, double profit) const {
    const int i = index(investor);
    return (numer_const_[i] + slope_ * x - profit) / (denom_const_[i] - k_ * x);
}

void validate_config(const SimConfig& cfg, const MixedEquilibrium& eq, const ModelParams& params) {
    std::ostringstream msg;
    if (!(cfg.dt > 0.0)) msg << "dt must be positive; ";
    else if (!(cfg.dt < 1.0 / (10.0 * params.r))) msg << "dt must be below 1/(10 r); ";
    if (!(std::exp(-params.r * cfg.t_max) < 1e-6)) msg << "t_max too short: exp(-r t_max) >= 1e-6; ";
    if (cfg.n_paths < 1) msg << "n_paths must be at least 1; ";
    if (!(cfg.x0 > 0.0) || !std::isfinite(cfg.x0)) msg << "x0 must be positive; ";
    if (!(eq.q >= 0.0 && eq.q <= 1.0)) msg << "q must lie in [0, 1]; ";
    if (!(eq.theta_star > 0.0 && eq.theta_star < eq.z1 && eq.theta_star < eq.z2)) {
        msg << "targets must exceed theta*; ";
    }
    if (msg.tellp() == 0) {
        const GbmModel m(params);
        const HazardTable table(eq, m);
        for (double x : geometric_grid(1e-6 * eq.theta_star, eq.theta_star * (1.0 - 1e-12), 200)) {
            const double pi = m.profit(x);
            const double worst = std::max(table.rate(Player::One, x, pi), table.rate(Player::Two, x, pi));
            if (!(worst * cfg.dt < 0.5)) {
                msg << "dt too coarse for hazard " << worst << " at x = " << x << "; ";
                break;
            }
        }
    }
    const auto s = msg.str();
    if (!s.empty()) throw ConfigError(s.substr(0, s.size() - 2));
}

namespace {

boost::random::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path_index),
                      static_cast<std::uint32_t>(path_index >> 32)};
    return boost::random::mt19937_64(seq);
}

// Per-step constants shared by every path.
struct Kernel {
    Kernel(const MixedEquilibrium& eq, const ModelParams& p, const SimConfig& cfg)
        : eq(eq), model(p), hazards(eq, model), params(p), dt(cfg.dt),
          n_steps(static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt))),
          log_drift((p.mu - 0.5 * p.sigma * p.sigma) * cfg.dt),
          log_vol(p.sigma * std::sqrt(cfg.dt)),
          step_discount(std::exp(-p.r * cfg.dt)),
          profit_weight(step_profit_weight(model, cfg.dt)) {}

    // Integral of E[pi(X_s) | X_0 = x] e^{-rs} over one step, per unit pi(x).
    static double step_profit_weight(const GbmModel& m, double dt) {
        const double gap = m.discount_gap();
        return -std::expm1(-gap * dt) / gap;
    }

    MixedEquilibrium eq;
    GbmModel model;
    HazardTable hazards;
    ModelParams params;
    double dt;
    std::size_t n_steps;
    double log_drift;
    double log_vol;
    double step_discount;
    double profit_weight;
};

struct NullRecorder {
    static constexpr bool records = false;
    void step(double, double) {}
    void event(const PathEvent&) {}
};

struct PathRecorder {
    static constexpr bool records = true;
    SimulatedPath* path;
    void step(double t, double x) {
        path->times.push_back(t);
        path->states.push_back(x);
    }
    void event(const PathEvent& e) { path->events.push_back(e); }
};

template <class Recorder>
std::array<double, 2> run_path(const Kernel& kn, double x0, std::uint64_t seed,
                               std::uint64_t path_index, Recorder& rec) {
    auto rng = path_rng(seed, path_index);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    boost::random::uniform_01<double> uniform;

    const auto& eq = kn.eq;
    const double k = kn.params.k;
    const double alpha = kn.params.alpha_profit;
    const double scale = kn.model.profit_scale();
    const double log_theta = std::log(eq.theta_star);

    std::array<double, 2> payoff{0.0, 0.0};
    double lx = std::log(x0);
    double x = x0;
    bool x_fresh = true;  // x == exp(lx) is only materialised on demand
    double disc = 1.0;
    bool first_stage = x0 >= eq.theta_star;

    auto state = [&] {
        if (!x_fresh) {
            x = std::exp(lx);
            x_fresh = true;
        }
        return x;
    };
    auto invest = [&](Player who, EventKind kind, double t) {
        const bool one = who == Player::One;
        const double target = one ? eq.z1 : eq.z2;
        const double c = one ? eq.c1 : eq.c2;
        const double pre = state();
        payoff[index(who)] -= disc * (k * (target - pre) + c);
        rec.event(PathEvent{t, who, pre, target, kind});
        x = target;
        lx = std::log(target);
        first_stage = true;
    };

    for (std::size_t n = 0; n < kn.n_steps; ++n) {
        const double t = static_cast<double>(n) * kn.dt;
        if (first_stage && lx <= log_theta) {
            if (uniform(rng) < eq.q) {
                invest(Player::Two, EventKind::HitQ, t);
            } else {
                first_stage = false;
            }
        }
        double pi = scale * std::exp(alpha * lx);
        if (!first_stage && lx < log_theta) {
            const double xs = state();
            const double p1 = -std::expm1(-kn.hazards.rate(Player::One, xs, pi) * kn.dt);
            const double p2 = -std::expm1(-kn.hazards.rate(Player::Two, xs, pi) * kn.dt);
            const bool fire1 = uniform(rng) < p1;
            const bool fire2 = uniform(rng) < p2;
            if (fire1 || fire2) {
                Player who = fire1 ? Player::One : Player::Two;
                if (fire1 && fire2) who = uniform(rng) < 0.5 ? Player::One : Player::Two;
                invest(who, EventKind::Hazard, t);
                pi = scale * std::exp(alpha * lx);
            }
        }
        const double flow = pi * disc * kn.profit_weight;
        payoff[0] += flow;
        payoff[1] += flow;
        if constexpr (Recorder::records) rec.step(t, state());

        lx += kn.log_drift + kn.log_vol * normal(rng);
        x_fresh = false;
        disc *= kn.step_discount;
    }
    return payoff;
}

void require_valid(const SimConfig& cfg, const MixedEquilibrium& eq, const ModelParams& params) {
    validate(params);
    validate_config(cfg, eq, params);
}

}  // namespace

SimulatedPath simulate_path(const MixedEquilibrium& eq, const ModelParams& params,
                            const SimConfig& cfg, std::uint64_t path_index) {
    require_valid(cfg, eq, params);
    const Kernel kn(eq, params, cfg);
    SimulatedPath path;
    path.times.reserve(kn.n_steps);
    path.states.reserve(kn.n_steps);
    PathRecorder rec{&path};
    path.payoff = run_path(kn, cfg.x0, cfg.seed, path_index, rec);
    return path;
}

std::array<double, 2> path_payoff(const MixedEquilibrium& eq, const ModelParams& params,
                                  const SimConfig& cfg, std::uint64_t path_index) {
    require_valid(cfg, eq, params);
    const Kernel kn(eq, params, cfg);
    NullRecorder rec;
    return run_path(kn, cfg.x0, cfg.seed, path_index, rec);
}

std::array<double, 2> resum_payoff(const SimulatedPath& path, const MixedEquilibrium& eq,
                                   const ModelParams& params, const SimConfig& cfg) {
    const GbmModel m(params);
    const double weight = -std::expm1(-m.discount_gap() * cfg.dt) / m.discount_gap();
    std::array<double, 2> out{0.0, 0.0};
    for (std::size_t n = 0; n < path.times.size(); ++n) {
        const double flow = m.profit(path.states[n]) * std::exp(-params.r * path.times[n]) * weight;
        out[0] += flow;
        out[1] += flow;
    }
    for (const auto& e : path.events) {
        const double c = e.investor == Player::One ? eq.c1 : eq.c2;
        out[index(e.investor)] -= std::exp(-params.r * e.t) * (params.k * (e.post - e.pre) + c);
    }
    return out;
}

PayoffEstimate estimate_payoffs(const MixedEquilibrium& eq, const ModelParams& params,
                                const SimConfig& cfg) {
    if (cfg.n_paths < 2) throw ConfigError("n_paths must be at least 2 for a standard error");
    require_valid(cfg, eq, params);
    const Kernel kn(eq, params, cfg);

    std::vector<std::array<double, 2>> results(cfg.n_paths);
    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.n_paths));
    auto work = [&](unsigned w) {
        NullRecorder rec;
        for (std::size_t i = w; i < cfg.n_paths; i += workers) {
            results[i] = run_path(kn, cfg.x0, cfg.seed, i, rec);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    const double n = static_cast<double>(cfg.n_paths);
    std::array<double, 2> mean{0.0, 0.0};
    for (const auto& r : results) {
        mean[0] += r[0];
        mean[1] += r[1];
    }
    mean[0] /= n;
    mean[1] /= n;
    std::array<double, 2> ss{0.0, 0.0};
    for (const auto& r : results) {
        ss[0] += (r[0] - mean[0]) * (r[0] - mean[0]);
        ss[1] += (r[1] - mean[1]) * (r[1] - mean[1]);
    }
    const double se1 = std::sqrt(ss[0] / (n - 1.0) / n);
    const double se2 = std::sqrt(ss[1] / (n - 1.0) / n);
    return {mean[0], mean[1], se1, se2, cfg.n_paths};
}

bool ValidationReport::any_flagged() const {
    return std::any_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.flagged; });
}

ValidationReport mc_vs_analytic(const MixedEquilibrium& eq, const ModelParams& params,
                                const SimConfig& cfg, std::span<const double> x0_grid) {
    ValidationReport report;
    const GbmModel m(params);
    for (double x0 : x0_grid) {
        SimConfig run = cfg;
        run.x0 = x0;
        const auto est = estimate_payoffs(eq, params, run);
        ValidationRow row{x0, est, value_U1(eq, m, x0), value_V(eq, m, Player::Two, x0), 0.0, 0.0,
                          false};
        row.z1 = (est.mean1 - row.analytic1) / est.se1;
        row.z2 = (est.mean2 - row.analytic2) / est.se2;
        row.flagged = std::abs(row.z1) > 4.0 || std::abs(row.z2) > 4.0;
        report.rows.push_back(row);
    }
    return report;
}

void write_path_csv(const SimulatedPath& path, std::ostream& out) {
    out << "t,x\n" << std::setprecision(12);
    for (std::size_t n = 0; n < path.times.size(); ++n) {
        out << path.times[n] << ',' << path.states[n] << '\n';
    }
}

void write_events_csv(const SimulatedPath& path, std::ostream& out) {
    out << "t,player,pre,post,kind\n" << std::setprecision(12);
    for (const auto& e : path.events) {
        out << e.t << ',' << static_cast<int>(e.investor) << ',' << e.pre << ',' << e.post << ','
            << event_kind_name(e.kind) << '\n';
    }
}

}  // namespace cgame
