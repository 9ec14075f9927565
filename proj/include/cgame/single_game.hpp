#pragma once

#include "cgame/diffusion.hpp"

#include <utility>

namespace cgame {

/// Reward from stopping (investing once) at x with upfront cost c: boost to
/// z* when below it, otherwise just pay c.
double reward_g(const GbmModel& m, double c, double x);

/// Generator applied to reward_g on its linear branch (x < z*):
/// A g(x) = mu x k - r g(x).
double generator_reward_g(const GbmModel& m, double c, double x);

/// alpha_i(x) = (g(x) - (R_r pi)(x)) / phi(x) and its closed-form derivative.
double alpha_coefficient(const GbmModel& m, double c, double x);
double dalpha_coefficient(const GbmModel& m, double c, double x);

/// Single-player optimal stopping solution.
struct StoppingSolution {
    double theta;
    double z_star;
    double alpha_coef;
    double cost;
};

/// Invest when X first falls to theta, theta = argmax alpha_i on (0, z*).
/// Throws NoSolutionError when alpha_i has no interior maximum.
StoppingSolution stopping_threshold(const GbmModel& m, double c);

/// Optimal single-player payoff: alpha_i(theta) phi(x) + (R_r pi)(x) above
/// theta, g(x) at and below it.
double value_single(const GbmModel& m, const StoppingSolution& s, double x);

/// Symmetric mixed-MPE investment hazard; zero outside (0, theta).
double mixed_mpe_rate(const GbmModel& m, const StoppingSolution& s, double x);

/// Two-stage SPE of the symmetric single-investment game: player 2 invests
/// with probability q2 at the hitting time of (0, theta), player 1 never does.
struct SingleGameTSSPE {
    double theta;
    double q2;
    double cost;
};

/// First-stage payoffs (player 1, player 2) at x > theta.
std::pair<double, double> tsspe_first_stage_value(const GbmModel& m, const StoppingSolution& s,
                                                  double q2, double x);

struct AsymmetryGap {
    double theta1;
    double theta2;
    double gap;
};

/// Stopping thresholds of two players with costs c1 >= c2 > 0. A positive
/// gap means the mixed regions (0, theta1) and (0, theta2) cannot coincide.
AsymmetryGap asymmetry_diagnostic(const GbmModel& m, double c1, double c2);

}  // namespace cgame
