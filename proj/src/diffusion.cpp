#include "cgame/diffusion.hpp"

#include "cgame/errors.hpp"
#include "cgame/roots.hpp"

#include <cmath>
#include <sstream>

namespace cgame {

double growth_rate(const ModelParams& p, double a) {
    return a * p.mu + 0.5 * p.sigma * p.sigma * a * (a - 1.0);
}

void validate(const ModelParams& p) {
    std::ostringstream msg;
    if (!(p.mu < 0.0)) msg << "mu must be negative (got " << p.mu << "); ";
    if (!(p.sigma > 0.0)) msg << "sigma must be positive (got " << p.sigma << "); ";
    if (!(p.r > 0.0)) msg << "r must be positive (got " << p.r << "); ";
    if (!(p.alpha_profit > 0.0 && p.alpha_profit < 1.0)) {
        msg << "alpha must lie in (0,1) (got " << p.alpha_profit << "); ";
    }
    if (!(p.k > 0.0)) msg << "k must be positive (got " << p.k << "); ";
    if (msg.tellp() == 0 && !(p.r - growth_rate(p, p.alpha_profit) > 0.0)) {
        msg << "r - delta(alpha) must be positive; ";
    }
    const auto s = msg.str();
    if (!s.empty()) throw ParameterError(s.substr(0, s.size() - 2));
}

FundamentalPair fundamental_pair(const ModelParams& p) {
    validate(p);
    const double s2 = p.sigma * p.sigma;
    const double b = 0.5 - p.mu / s2;
    const double disc = std::sqrt(b * b + 2.0 * p.r / s2);
    return {b + disc, b - disc};
}

GbmModel::GbmModel(const ModelParams& params, double profit_scale)
    : params_(params), scale_(profit_scale), gammas_(fundamental_pair(params)),
      gap_(params.r - growth_rate(params, params.alpha_profit)) {
    if (!(profit_scale > 0.0)) throw ParameterError("profit scale must be positive");
}

void GbmModel::require_state(double x, const char* what) const {
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << what << ": state must lie in (0, inf), got " << x;
        throw DomainError(msg.str());
    }
}

double GbmModel::profit(double x) const {
    require_state(x, "profit");
    return scale_ * std::pow(x, params_.alpha_profit);
}

double GbmModel::drift(double x) const { return params_.mu * x; }
double GbmModel::volatility(double x) const { return params_.sigma * x; }

double GbmModel::phi(double x) const {
    require_state(x, "phi");
    return std::pow(x, gammas_.gamma_minus);
}

double GbmModel::dphi(double x) const {
    require_state(x, "dphi");
    const double g = gammas_.gamma_minus;
    return g * std::pow(x, g - 1.0);
}

double GbmModel::d2phi(double x) const {
    require_state(x, "d2phi");
    const double g = gammas_.gamma_minus;
    return g * (g - 1.0) * std::pow(x, g - 2.0);
}

double GbmModel::psi(double x) const {
    require_state(x, "psi");
    return std::pow(x, gammas_.gamma_plus);
}

double GbmModel::resolvent(double x) const {
    require_state(x, "resolvent");
    return scale_ * std::pow(x, params_.alpha_profit) / gap_;
}

double GbmModel::dresolvent(double x) const {
    require_state(x, "dresolvent");
    const double a = params_.alpha_profit;
    return scale_ * a * std::pow(x, a - 1.0) / gap_;
}

double GbmModel::d2resolvent(double x) const {
    require_state(x, "d2resolvent");
    const double a = params_.alpha_profit;
    return scale_ * a * (a - 1.0) * std::pow(x, a - 2.0) / gap_;
}

double GbmModel::scale_density(double x) const {
    require_state(x, "scale_density");
    const double s2 = params_.sigma * params_.sigma;
    return std::pow(x, -2.0 * params_.mu / s2);
}

double GbmModel::speed_density(double x) const {
    const double sx = volatility(x);
    return 2.0 / (sx * sx * scale_density(x));
}

double GbmModel::rho(double x) const {
    return profit(x) + params_.k * (params_.mu - params_.r) * x;
}

double GbmModel::drho(double x) const {
    require_state(x, "drho");
    const double a = params_.alpha_profit;
    return scale_ * a * std::pow(x, a - 1.0) + params_.k * (params_.mu - params_.r);
}

double GbmModel::I(double x) const {
    require_state(x, "I");
    const double a = params_.alpha_profit;
    const double g = gammas_.gamma_minus;
    return (scale_ * a * std::pow(x, a - g) / gap_ - params_.k * std::pow(x, 1.0 - g)) / g;
}

double GbmModel::dI(double x) const {
    require_state(x, "dI");
    const double a = params_.alpha_profit;
    const double g = gammas_.gamma_minus;
    return (scale_ * a * (a - g) * std::pow(x, a - g - 1.0) / gap_ -
            params_.k * (1.0 - g) * std::pow(x, -g)) /
           g;
}

double GbmModel::J(double x) const {
    require_state(x, "J");
    const double a = params_.alpha_profit;
    const double g = gammas_.gamma_minus;
    return (1.0 - a / g) * scale_ * std::pow(x, a) / gap_ - params_.k * x * (1.0 - 1.0 / g);
}

double GbmModel::dJ(double x) const {
    require_state(x, "dJ");
    const double a = params_.alpha_profit;
    const double g = gammas_.gamma_minus;
    return (1.0 - a / g) * scale_ * a * std::pow(x, a - 1.0) / gap_ - params_.k * (1.0 - 1.0 / g);
}

double GbmModel::ell(double x) const {
    const double sx = volatility(x);
    const double dp = dphi(x);
    return dI(x) * sx * sx * dp * dp / (2.0 * scale_density(x));
}

double GbmModel::z_star_closed_form() const {
    const double a = params_.alpha_profit;
    return std::pow(scale_ * a / (params_.k * gap_), 1.0 / (1.0 - a));
}

double GbmModel::x_hat_closed_form() const {
    const double a = params_.alpha_profit;
    const double g = gammas_.gamma_minus;
    return std::pow(scale_ * a * (a - g) / (params_.k * gap_ * (1.0 - g)), 1.0 / (1.0 - a));
}

double GbmModel::x_star_closed_form() const {
    const double a = params_.alpha_profit;
    return std::pow(scale_ * a / (params_.k * (params_.r - params_.mu)), 1.0 / (1.0 - a));
}

CriticalPoints critical_points(const GbmModel& model) {
    CriticalPoints cp{};
    cp.z_star = model.z_star_closed_form();
    cp.x_star = model.x_star_closed_form();
    cp.x_hat = find_root([&](double x) { return model.dI(x); }, 1e-6 * cp.z_star, cp.z_star,
                         "I'");
    cp.j_zstar = model.J(cp.z_star);
    return cp;
}

namespace {

int count_sign_changes(const std::vector<double>& values) {
    int n = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if ((values[i - 1] < 0.0) != (values[i] < 0.0)) ++n;
    }
    return n;
}

// Location of the sign change of A g_c + pi on (0, z*), where g_c is the
// single-investment reward with upfront cost c. Negative all the way up to
// z* puts the switch at z* itself.
std::optional<double> locate_xc(const GbmModel& m, double z_star, double c) {
    const auto& p = m.params();
    const double top = m.resolvent(z_star);
    auto f = [&](double x) {
        const double g = top - p.k * (z_star - x) - c;
        return p.mu * x * p.k - p.r * g + m.profit(x);
    };
    const double lo = 1e-6 * z_star;
    const double hi = z_star * (1.0 - 1e-12);
    if (!(f(lo) < 0.0)) return std::nullopt;
    if (f(hi) < 0.0) return z_star;
    return find_root(f, lo, hi, "A g + pi");
}

}  // namespace

std::vector<std::string> AssumptionReport::failures() const {
    std::vector<std::string> out;
    if (!resolvent_finite) out.emplace_back("resolvent_finite");
    if (!z_star_unique) out.emplace_back("z_star_unique");
    if (!rho_single_peaked) out.emplace_back("rho_single_peaked");
    if (!l_negative) out.emplace_back("l_negative");
    if (!x1c_located) out.emplace_back("x1c_located");
    if (!x2c_located) out.emplace_back("x2c_located");
    if (!c2_in_range) out.emplace_back("c2_in_range");
    return out;
}

AssumptionReport check_assumptions(const ModelParams& params, double c1, double c2) {
    if (!(c2 > 0.0) || !(c1 >= c2)) {
        throw ParameterError("check_assumptions requires c1 >= c2 > 0");
    }
    const GbmModel m(params);
    AssumptionReport rep;
    rep.resolvent_finite = m.discount_gap() > 0.0 && std::isfinite(m.resolvent(1.0));

    rep.z_star = m.z_star_closed_form();
    rep.x_star = m.x_star_closed_form();
    const auto grid = geometric_grid(1e-6 * rep.z_star, 1e3 * rep.z_star, 2000);

    std::vector<double> foc, drho, ell;
    foc.reserve(grid.size());
    drho.reserve(grid.size());
    ell.reserve(grid.size());
    for (double x : grid) {
        foc.push_back(m.dresolvent(x) - params.k);
        drho.push_back(m.drho(x));
        ell.push_back(m.ell(x));
    }
    rep.z_star_sign_changes = count_sign_changes(foc);
    rep.z_star_unique = rep.z_star_sign_changes == 1;
    rep.rho_sign_changes = count_sign_changes(drho);
    rep.rho_single_peaked = rep.rho_sign_changes == 1 && drho.front() > 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (ell[i] < 0.0) {
            rep.l_negative = true;
            rep.l_negative_at = grid[i];
            break;
        }
    }

    try {
        const auto cp = critical_points(m);
        rep.x_hat = cp.x_hat;
        rep.j_zstar = cp.j_zstar;
    } catch (const NumericalError&) {
        rep.j_zstar = m.J(rep.z_star);
    }

    rep.x1c = locate_xc(m, rep.z_star, c1);
    rep.x2c = locate_xc(m, rep.z_star, c2);
    rep.x1c_located = rep.x1c.has_value();
    rep.x2c_located = rep.x2c.has_value();
    rep.c2_in_range = c2 > 0.0 && c2 < rep.j_zstar;
    return rep;
}

}  // namespace cgame
