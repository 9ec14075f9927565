#include "cgame/impulse.hpp"

#include "cgame/errors.hpp"
#include "cgame/roots.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace cgame {

double Z_map(const GbmModel& m, const CriticalPoints& cp, double x) {
    if (!(x > 0.0 && x < cp.x_hat)) {
        std::ostringstream msg;
        msg << "Z_map: x = " << x << " outside (0, x_hat = " << cp.x_hat << ")";
        throw DomainError(msg.str());
    }
    const double level = m.I(x);
    auto f = [&](double z) { return m.I(z) - level; };
    // I increases from I(x_hat) to I(z*) = 0 on the upper branch; the
    // level is in (I(x_hat), 0) so the bracket is known up to rounding.
    if (!(f(cp.z_star) > 0.0)) return cp.z_star;
    if (!(f(cp.x_hat) < 0.0)) return cp.x_hat;
    return bisect(f, cp.x_hat, cp.z_star);
}

double C_func(const GbmModel& m, const CriticalPoints& cp, double x) {
    return m.J(Z_map(m, cp, x)) - m.J(x);
}

ImpulsePolicy solve_single_impulse(const ModelParams& params, double c, double profit_scale) {
    const GbmModel m(params, profit_scale);
    const auto cp = critical_points(m);
    if (!(c > 0.0 && c < cp.j_zstar)) {
        std::ostringstream msg;
        msg << "upfront cost " << c << " outside (0, J(z*) = " << cp.j_zstar << ")";
        throw NoSolutionError(msg.str());
    }
    auto f = [&](double x) { return C_func(m, cp, x) - c; };
    // C decreases from J(z*) at 0 to 0 at x_hat.
    const double theta = find_root(f, 1e-9 * cp.x_hat, cp.x_hat * (1.0 - 1e-9), "C(x) - c");
    const double z = Z_map(m, cp, theta);
    return {theta, z, -m.I(theta), c, profit_scale};
}

double impulse_value(const ImpulsePolicy& policy, const ModelParams& params, double x) {
    const GbmModel m(params, policy.profit_scale);
    auto above = [&](double y) { return policy.coef * m.phi(y) + m.resolvent(y); };
    if (x > policy.theta) return above(x);
    return above(policy.z) - params.k * (policy.z - x) - policy.cost;
}

namespace {

struct MixedParts {
    double z1;
    double q;
};

// Everything that depends on c1 once (theta*, z2) are fixed.
struct MixedContext {
    GbmModel m;
    CriticalPoints cp;
    ImpulsePolicy p2;
};

MixedContext make_context(const ModelParams& params, double c2) {
    GbmModel m(params);
    auto cp = critical_points(m);
    auto p2 = solve_single_impulse(params, c2);
    return {m, cp, p2};
}

double q_formula(const GbmModel& m, double theta, double z1, double z2) {
    const double num = m.phi(theta) * (m.I(theta) - m.I(z1));
    const double den = -m.I(z1) * m.phi(z2) + m.resolvent(z2) + m.I(theta) * m.phi(theta) -
                       m.resolvent(theta);
    return num / den;
}

bool optimal_u_holds(const GbmModel& m, double theta, double z1) {
    const double lhs =
        -m.I(z1) * m.phi(theta) + m.resolvent(theta) - m.params().k * theta;
    return lhs < m.J(z1);
}

MixedEquilibrium build_mixed(const MixedContext& ctx, double c1) {
    const auto& m = ctx.m;
    const double c2 = ctx.p2.cost;
    const double theta = ctx.p2.theta;
    const double z2 = ctx.p2.z;
    if (!(c1 > c2)) {
        std::ostringstream msg;
        msg << "c1 = " << c1 << " must exceed c2 = " << c2;
        throw EquilibriumError(Condition::SymmetricDegenerate, msg.str());
    }
    const double target = m.J(theta) + c1;
    auto f = [&](double z) { return m.J(z) - target; };
    const double lo = ctx.cp.x_hat * (1.0 + 1e-9);
    if (!(f(lo) > 0.0)) {
        std::ostringstream msg;
        msg << "c1 = " << c1 << " exceeds J(x_hat) - J(theta*) = " << m.J(ctx.cp.x_hat) - m.J(theta)
            << "; no z1 solves J(z1) = J(theta*) + c1";
        throw EquilibriumError(Condition::NoRoot, msg.str());
    }
    const double z1 = bisect(f, lo, z2);

    MixedEquilibrium eq{theta, z1, z2, q_formula(m, theta, z1, z2), -m.I(theta), -m.I(z1), c1, c2};
    if (!(theta < ctx.cp.x_hat && ctx.cp.x_hat < z1 && z1 < z2)) {
        throw EquilibriumError(Condition::Ordering, "theta* < x_hat < z1 < z2 violated");
    }
    if (!(eq.q > 0.0 && eq.q < 1.0)) {
        std::ostringstream msg;
        msg << "q = " << eq.q << " outside (0, 1)";
        throw EquilibriumError(Condition::QRange, msg.str());
    }
    if (!optimal_u_holds(m, theta, z1)) {
        std::ostringstream msg;
        msg << "U1(theta*) - k theta* >= U1(z1) - k z1 at c1 = " << c1
            << "; z1 is not player 1's optimal boost target";
        throw EquilibriumError(Condition::OptimalU, msg.str());
    }
    return eq;
}

bool mixed_valid(const MixedContext& ctx, double c1) {
    try {
        build_mixed(ctx, c1);
        return true;
    } catch (const EquilibriumError&) {
        return false;
    }
}

}  // namespace

MixedEquilibrium solve_mixed_tsspe(const ModelParams& params, double c1, double c2) {
    if (!(c1 > c2)) {
        std::ostringstream msg;
        msg << "c1 = " << c1 << " must exceed c2 = " << c2;
        throw EquilibriumError(Condition::SymmetricDegenerate, msg.str());
    }
    return build_mixed(make_context(params, c2), c1);
}

double c1_max(const ModelParams& params, double c2) {
    const auto ctx = make_context(params, c2);
    const double upper = ctx.m.J(ctx.cp.x_hat) - ctx.m.J(ctx.p2.theta);
    double lo = c2 + 1e-9 * (upper - c2);
    if (!mixed_valid(ctx, lo)) {
        throw NoSolutionError("no mixed equilibrium even for c1 just above c2");
    }
    double hi = upper;
    if (mixed_valid(ctx, hi)) return hi;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (mixed_valid(ctx, mid) ? lo : hi) = mid;
    }
    return lo;
}

double first_stage_value(const MixedEquilibrium& eq, const GbmModel& m, Player player, double x) {
    return player == Player::One ? value_U1(eq, m, x) : value_V(eq, m, Player::Two, x);
}

double investment_reward(const MixedEquilibrium& eq, const GbmModel& m, Player player, double x) {
    const bool one = player == Player::One;
    const double z = one ? eq.z1 : eq.z2;
    const double c = one ? eq.c1 : eq.c2;
    const double fz = first_stage_value(eq, m, player, z);
    if (x < z) return fz - m.params().k * (z - x) - c;
    return first_stage_value(eq, m, player, x) - c;
}

double value_V(const MixedEquilibrium& eq, const GbmModel& m, Player player, double x) {
    if (x >= eq.theta_star) return m.resolvent(x) + eq.w * m.phi(x);
    return investment_reward(eq, m, player, x);
}

double value_U1(const MixedEquilibrium& eq, const GbmModel& m, double x) {
    if (x >= eq.theta_star) return m.resolvent(x) + eq.u1 * m.phi(x);
    return investment_reward(eq, m, Player::One, x);
}

double hazard_rate(const MixedEquilibrium& eq, const GbmModel& m, Player investor, double x) {
    if (!(x > 0.0)) throw DomainError("hazard_rate: state must be positive");
    if (x >= eq.theta_star) return 0.0;
    const Player j = other(investor);
    const auto& p = m.params();
    const double g = investment_reward(eq, m, j, x);
    const double num = p.r * g - p.mu * x * p.k - m.profit(x);
    const double zi = investor == Player::One ? eq.z1 : eq.z2;
    const double den = first_stage_value(eq, m, j, zi) - g;
    if (!(den > 0.0)) {
        std::ostringstream msg;
        msg << "hazard denominator " << den << " not positive at x = " << x;
        throw InternalError(msg.str());
    }
    return num / den;
}

EquilibriumCheck check_equilibrium(const MixedEquilibrium& eq, const ModelParams& params) {
    const GbmModel m(params);
    const auto cp = critical_points(m);
    EquilibriumCheck out{};
    out.i_level = std::abs(m.I(eq.theta_star) - m.I(eq.z2));
    out.j_gap_c2 = std::abs(m.J(eq.z2) - m.J(eq.theta_star) - eq.c2);
    out.j_gap_c1 = std::abs(m.J(eq.z1) - m.J(eq.theta_star) - eq.c1);
    out.u1_boundary = std::abs(value_U1(eq, m, eq.theta_star) - eq.q * value_U1(eq, m, eq.z2) -
                               (1.0 - eq.q) * value_V(eq, m, Player::One, eq.theta_star));
    out.w_mismatch = std::abs(eq.w + m.I(eq.theta_star));
    out.u1_mismatch = std::abs(eq.u1 + m.I(eq.z1));
    out.optimal_u = optimal_u_holds(m, eq.theta_star, eq.z1);
    out.q_range = eq.q > 0.0 && eq.q < 1.0;
    out.ordering = eq.theta_star < cp.x_hat && cp.x_hat < eq.z1 && eq.z1 < eq.z2;
    out.coefficients = eq.u1 > eq.w && eq.w > 0.0;
    return out;
}

PureEquilibrium pure_equilibrium(const ModelParams& params, double c1, double c2) {
    if (!(c2 > 0.0) || !(c1 >= c2)) throw DomainError("pure_equilibrium requires c1 >= c2 > 0");
    const GbmModel m(params);
    const auto cp = critical_points(m);
    const auto p2 = solve_single_impulse(params, c2);
    const double beta = (m.resolvent(p2.z) - m.resolvent(p2.theta)) / (m.phi(p2.theta) - m.phi(p2.z));
    const double neg_i = -m.I(cp.x_hat);
    return {beta, neg_i, p2, beta > neg_i};
}

double pure_value(const PureEquilibrium& pe, const ModelParams& params, Player player, double x) {
    if (player == Player::Two) return impulse_value(pe.policy2, params, x);
    const GbmModel m(params);
    auto above = [&](double y) { return pe.beta * m.phi(y) + m.resolvent(y); };
    return x >= pe.policy2.theta ? above(x) : above(pe.policy2.z);
}

std::vector<EfficiencyRow> efficiency_compare(const ModelParams& params, double c1, double c2,
                                              std::span<const double> grid) {
    std::vector<EfficiencyRow> rows;
    if (grid.empty()) return rows;
    const GbmModel m(params);
    const auto pe = pure_equilibrium(params, c1, c2);
    if (!pe.valid) {
        std::ostringstream msg;
        msg << "pure-suff: beta = " << pe.beta << " does not exceed -I(x_hat) = " << pe.neg_I_xhat;
        throw NoSolutionError(msg.str());
    }
    const auto eq = solve_mixed_tsspe(params, c1, c2);
    const auto planner = solve_single_impulse(params, c2, 2.0);
    rows.reserve(grid.size());
    for (double x : grid) {
        rows.push_back({x, value_V(eq, m, Player::One, x) + value_V(eq, m, Player::Two, x),
                        pure_value(pe, params, Player::One, x) + pure_value(pe, params, Player::Two, x),
                        impulse_value(planner, params, x)});
    }
    return rows;
}

}  // namespace cgame
