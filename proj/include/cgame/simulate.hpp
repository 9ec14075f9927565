#pragma once

#include "cgame/diffusion.hpp"
#include "cgame/impulse.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cgame {

struct SimConfig {
    double dt = 1e-3;
    double t_max = 20.0;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 42;
    double x0 = 0.1;
    /// Worker threads for estimate_payoffs; 0 picks hardware concurrency.
    /// Results do not depend on this value.
    unsigned threads = 0;
};

/// Defaults for a given discount rate: dt = 1e-3, t_max = 20 / r.
SimConfig default_sim_config(const ModelParams& params);

/// Throws ConfigError unless dt < 1/(10 r), exp(-r t_max) < 1e-6,
/// n_paths >= 1, x0 > 0, and lambda_i(x) dt < 0.5 on (0, theta*).
void validate_config(const SimConfig& cfg, const MixedEquilibrium& eq, const ModelParams& params);

enum class EventKind { HitQ, Hazard };

constexpr const char* event_kind_name(EventKind k) {
    return k == EventKind::HitQ ? "hit-q" : "hazard";
}

struct PathEvent {
    double t;
    Player investor;
    double pre;
    double post;
    EventKind kind;
};

/// One controlled trajectory. states[n] is the state in force over
/// [times[n], times[n] + dt), i.e. after any investment made at times[n].
struct SimulatedPath {
    std::vector<double> times;
    std::vector<double> states;
    std::vector<PathEvent> events;
    /// Discounted payoffs of players 1 and 2 along this path.
    std::array<double, 2> payoff{};
};

struct PayoffEstimate {
    double mean1;
    double mean2;
    double se1;
    double se2;
    std::size_t n;
};

/// Second-stage hazard rates in closed form. Below theta* the reward g_j is
/// linear, so lambda_i(x) = (a_i + b x - s x^alpha) / (d_i - k x).
class HazardTable {
public:
    HazardTable(const MixedEquilibrium& eq, const GbmModel& m);
    /// `profit` is pi(x), passed in because the caller already has it.
    double rate(Player investor, double x, double profit) const;

private:
    std::array<double, 2> numer_const_{};
    std::array<double, 2> denom_const_{};
    double slope_;
    double k_;
};

/// Simulates path `path_index` of the strategy profile. Streams are
/// derived from (cfg.seed, path_index), so a path never depends on which
/// other paths run.
SimulatedPath simulate_path(const MixedEquilibrium& eq, const ModelParams& params,
                            const SimConfig& cfg, std::uint64_t path_index);

/// Discounted payoffs of a single path without recording it.
std::array<double, 2> path_payoff(const MixedEquilibrium& eq, const ModelParams& params,
                                  const SimConfig& cfg, std::uint64_t path_index);

/// Recomputes a recorded path's payoffs from its states and events.
std::array<double, 2> resum_payoff(const SimulatedPath& path, const MixedEquilibrium& eq,
                                   const ModelParams& params, const SimConfig& cfg);

/// Monte Carlo means and standard errors over cfg.n_paths paths (>= 2).
PayoffEstimate estimate_payoffs(const MixedEquilibrium& eq, const ModelParams& params,
                                const SimConfig& cfg);

struct ValidationRow {
    double x0;
    PayoffEstimate estimate;
    double analytic1;  // U1(x0)
    double analytic2;  // V2(x0)
    double z1;
    double z2;
    bool flagged;      // |z| > 4 for either player
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    bool any_flagged() const;
};

ValidationReport mc_vs_analytic(const MixedEquilibrium& eq, const ModelParams& params,
                                const SimConfig& cfg, std::span<const double> x0_grid);

/// CSV exports for plotting: "t,x" rows and "t,player,pre,post,kind" rows.
void write_path_csv(const SimulatedPath& path, std::ostream& out);
void write_events_csv(const SimulatedPath& path, std::ostream& out);

}  // namespace cgame
