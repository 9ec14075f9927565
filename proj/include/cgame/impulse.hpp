#pragma once

#include "cgame/diffusion.hpp"

#include <span>
#include <vector>

namespace cgame {

enum class Player { One = 1, Two = 2 };

constexpr Player other(Player p) { return p == Player::One ? Player::Two : Player::One; }
constexpr int index(Player p) { return p == Player::One ? 0 : 1; }

/// Z(x): the point on the increasing branch (x_hat, z*) of I with the same
/// I-level as x in (0, x_hat).
double Z_map(const GbmModel& m, const CriticalPoints& cp, double x);
/// C(x) = J(Z(x)) - J(x), the upfront cost that makes x the trigger.
double C_func(const GbmModel& m, const CriticalPoints& cp, double x);

/// Single-agent (s, S)-type impulse policy: whenever X falls to `theta`,
/// boost it to `z`. With profit_scale = 2 this is the social planner.
struct ImpulsePolicy {
    double theta;
    double z;
    double coef;  // -I(theta)
    double cost;
    double profit_scale;
};

/// Solves I(theta) = I(z), J(z) - J(theta) = c. Throws NoSolutionError when
/// c lies outside (0, J(z*)) for the scaled profit flow.
ImpulsePolicy solve_single_impulse(const ModelParams& params, double c, double profit_scale = 1.0);

/// Payoff of the policy: -I(theta) phi(x) + (R_r pi)(x) above theta, the
/// linear continuation V(z) - k(z - x) - c at and below it.
double impulse_value(const ImpulsePolicy& policy, const ModelParams& params, double x);

/// Mixed-strategy two-stage SPE of the impulse game. Player 2 (cheaper)
/// invests with probability q when X first reaches theta_star from above;
/// below theta_star both players invest at finite hazard rates.
struct MixedEquilibrium {
    double theta_star;
    double z1;
    double z2;
    double q;
    double w;   // -I(theta_star), second-stage coefficient of both players
    double u1;  // -I(z1), player 1's first-stage coefficient
    double c1;
    double c2;
};

/// Builds the equilibrium for 0 < c2 < c1. Throws EquilibriumError naming
/// the violated condition, or NoSolutionError when c2 admits no
/// single-player policy.
MixedEquilibrium solve_mixed_tsspe(const ModelParams& params, double c1, double c2);

/// Largest c1 for which solve_mixed_tsspe succeeds (bisection on validity,
/// tolerance 1e-6).
double c1_max(const ModelParams& params, double c2);

/// Player value functions of the mixed equilibrium.
double value_V(const MixedEquilibrium& eq, const GbmModel& m, Player player, double x);
double value_U1(const MixedEquilibrium& eq, const GbmModel& m, double x);
/// F_{i,0}: U1 for player 1, V2 for player 2.
double first_stage_value(const MixedEquilibrium& eq, const GbmModel& m, Player player, double x);
/// Reward g_i from investing at x (boost to z_i).
double investment_reward(const MixedEquilibrium& eq, const GbmModel& m, Player player, double x);

/// Investment hazard of `investor` in the second stage; zero for x >= theta_star.
double hazard_rate(const MixedEquilibrium& eq, const GbmModel& m, Player investor, double x);

/// Residuals and sufficient conditions of a (possibly deserialised)
/// equilibrium record.
struct EquilibriumCheck {
    double i_level;     // |I(theta*) - I(z2)|
    double j_gap_c2;    // |J(z2) - J(theta*) - c2|
    double j_gap_c1;    // |J(z1) - J(theta*) - c1|
    double u1_boundary; // |U1(theta*) - q U1(z2) - (1 - q) V1(theta*)|
    double w_mismatch;  // |w + I(theta*)|
    double u1_mismatch; // |u1 + I(z1)|
    bool optimal_u;
    bool q_range;
    bool ordering;
    bool coefficients;  // u1 > w > 0

    bool ok(double tol = 1e-9) const noexcept {
        return i_level < tol && j_gap_c2 < tol && j_gap_c1 < tol && u1_boundary < tol &&
               w_mismatch < tol && u1_mismatch < tol && optimal_u && q_range && ordering &&
               coefficients;
    }
};

EquilibriumCheck check_equilibrium(const MixedEquilibrium& eq, const ModelParams& params);

/// Pure-strategy equilibrium where only player 2 invests, following its
/// single-player policy.
struct PureEquilibrium {
    double beta;
    double neg_I_xhat;
    ImpulsePolicy policy2;
    bool valid;  // beta > -I(x_hat)
};

PureEquilibrium pure_equilibrium(const ModelParams& params, double c1, double c2);

double pure_value(const PureEquilibrium& pe, const ModelParams& params, Player player, double x);

struct EfficiencyRow {
    double x;
    double v_mixed;    // V1 + V2 of the mixed equilibrium (second stage)
    double v_pure;     // sum of pure-equilibrium payoffs
    double v_planner;  // planner with flow 2 pi and cost c2
};

/// Total payoffs of the three regimes on `grid`. Throws NoSolutionError
/// when the pure-equilibrium condition fails.
std::vector<EfficiencyRow> efficiency_compare(const ModelParams& params, double c1, double c2,
                                              std::span<const double> grid);

}  // namespace cgame
