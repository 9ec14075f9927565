#include "cgame/single_game.hpp"

#include "cgame/errors.hpp"
#include "cgame/roots.hpp"

#include <sstream>

namespace cgame {

double reward_g(const GbmModel& m, double c, double x) {
    const double zs = m.z_star_closed_form();
    if (x < zs) {
        return m.resolvent(zs) - m.params().k * (zs - x) - c;
    }
    return m.resolvent(x) - c;
}

double generator_reward_g(const GbmModel& m, double c, double x) {
    const auto& p = m.params();
    return p.mu * x * p.k - p.r * reward_g(m, c, x);
}

double alpha_coefficient(const GbmModel& m, double c, double x) {
    return (reward_g(m, c, x) - m.resolvent(x)) / m.phi(x);
}

double dalpha_coefficient(const GbmModel& m, double c, double x) {
    const double ph = m.phi(x);
    const double dph = m.dphi(x);
    const double gap = reward_g(m, c, x) - m.resolvent(x);
    const double dg = x < m.z_star_closed_form() ? m.params().k : m.dresolvent(x);
    return ((dg - m.dresolvent(x)) * ph - gap * dph) / (ph * ph);
}

StoppingSolution stopping_threshold(const GbmModel& m, double c) {
    if (!(c > 0.0)) throw DomainError("upfront cost must be positive");
    const double zs = m.z_star_closed_form();
    const double lo = 1e-6 * zs;
    const double hi = zs * (1.0 - 1e-9);
    auto f = [&](double x) { return dalpha_coefficient(m, c, x); };
    if (!(f(lo) > 0.0)) {
        std::ostringstream msg;
        msg << "alpha_i has no interior maximum on (0, z*) for c = " << c;
        throw NoSolutionError(msg.str());
    }
    const auto bracket = scan_bracket(f, lo, hi);
    if (!bracket) {
        std::ostringstream msg;
        msg << "alpha_i' keeps its sign on [" << lo << ", " << hi << "] for c = " << c;
        throw NoSolutionError(msg.str());
    }
    const double theta = bisect(f, bracket->first, bracket->second);
    return {theta, zs, alpha_coefficient(m, c, theta), c};
}

double value_single(const GbmModel& m, const StoppingSolution& s, double x) {
    if (x > s.theta) return s.alpha_coef * m.phi(x) + m.resolvent(x);
    return reward_g(m, s.cost, x);
}

double mixed_mpe_rate(const GbmModel& m, const StoppingSolution& s, double x) {
    if (!(x > 0.0)) throw DomainError("mixed_mpe_rate: state must be positive");
    if (x >= s.theta) return 0.0;
    const double g = reward_g(m, s.cost, x);
    const double num = -generator_reward_g(m, s.cost, x) - m.profit(x);
    return num / (m.resolvent(s.z_star) - g);
}

std::pair<double, double> tsspe_first_stage_value(const GbmModel& m, const StoppingSolution& s,
                                                  double q2, double x) {
    if (!(q2 >= 0.0 && q2 <= 1.0)) throw DomainError("q2 must lie in [0, 1]");
    if (!(x > s.theta)) throw DomainError("first-stage value requires x > theta");
    const double boundary = (1.0 - q2) * reward_g(m, s.cost, s.theta) + q2 * m.resolvent(s.z_star);
    const double v1 =
        m.resolvent(x) + (boundary - m.resolvent(s.theta)) * m.phi(x) / m.phi(s.theta);
    return {v1, value_single(m, s, x)};
}

AsymmetryGap asymmetry_diagnostic(const GbmModel& m, double c1, double c2) {
    if (!(c2 > 0.0) || !(c1 >= c2)) {
        throw DomainError("asymmetry_diagnostic requires c1 >= c2 > 0");
    }
    const double t1 = stopping_threshold(m, c1).theta;
    const double t2 = c1 == c2 ? t1 : stopping_threshold(m, c2).theta;
    return {t1, t2, t2 - t1};
}

}  // namespace cgame
