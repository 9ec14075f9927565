#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cgame {

/// Primitives of the GBM common-good model dX = mu X dt + sigma X dW with
/// profit flow pi(x) = x^alpha_profit and proportional boost cost k.
struct ModelParams {
    double mu = -0.5;
    double sigma = 0.25;
    double r = 1.0;
    double alpha_profit = 0.5;
    double k = 1.0;
};

/// Growth rate of E[X_t^a]: delta(a) = a mu + sigma^2 a (a - 1) / 2.
double growth_rate(const ModelParams& p, double a);

/// Throws ParameterError unless every invariant of ModelParams holds
/// (mu < 0, sigma > 0, r > 0, 0 < alpha < 1, k > 0, r > delta(alpha)).
void validate(const ModelParams& p);

/// Exponents of phi(x) = x^gamma_minus and psi(x) = x^gamma_plus.
struct FundamentalPair {
    double gamma_plus;
    double gamma_minus;
};

FundamentalPair fundamental_pair(const ModelParams& p);

/// Closed-form objects of the uncontrolled diffusion. `profit_scale`
/// multiplies pi (2 gives the social planner's aggregate flow).
///
/// All state arguments must lie in (0, inf); anything else throws
/// DomainError.
class GbmModel {
public:
    explicit GbmModel(const ModelParams& params, double profit_scale = 1.0);

    const ModelParams& params() const noexcept { return params_; }
    double profit_scale() const noexcept { return scale_; }
    const FundamentalPair& gammas() const noexcept { return gammas_; }
    /// r - delta(alpha), the denominator of the resolvent.
    double discount_gap() const noexcept { return gap_; }

    double profit(double x) const;
    double drift(double x) const;
    double volatility(double x) const;

    double phi(double x) const;
    double dphi(double x) const;
    double d2phi(double x) const;
    double psi(double x) const;

    /// Expected discounted profit without intervention, (R_r pi)(x).
    double resolvent(double x) const;
    double dresolvent(double x) const;
    double d2resolvent(double x) const;

    /// Scale density with reference point 1.
    double scale_density(double x) const;
    double speed_density(double x) const;

    /// rho(x) = pi(x) + k (mu(x) - r x).
    double rho(double x) const;
    double drho(double x) const;

    /// I(x) = ((R_r pi)'(x) - k) / phi'(x).
    double I(double x) const;
    double dI(double x) const;
    /// J(x) = (R_r pi)(x) - k x - I(x) phi(x).
    double J(double x) const;
    double dJ(double x) const;
    /// L recovered from I' through I'(x) = 2 S'(x) L(x) / (sigma^2(x) phi'(x)^2).
    double ell(double x) const;

    /// Closed-form maximiser of (R_r pi)(z) - k z.
    double z_star_closed_form() const;
    /// Closed-form root of I'. Kept for cross-checks; critical_points()
    /// locates the minimiser by bracketing instead.
    double x_hat_closed_form() const;
    /// Closed-form maximiser of rho.
    double x_star_closed_form() const;

private:
    void require_state(double x, const char* what) const;

    ModelParams params_;
    double scale_;
    FundamentalPair gammas_;
    double gap_;
};

struct CriticalPoints {
    double z_star;
    double x_hat;
    double x_star;
    double j_zstar;
};

/// z* and x* from their first-order conditions; x_hat by bracketed
/// bisection on I' over (1e-6 z*, z*).
CriticalPoints critical_points(const GbmModel& model);

/// Diagnostics of the standing assumptions for a cost pair c1 >= c2 > 0.
/// Failures are flags, never exceptions.
struct AssumptionReport {
    bool resolvent_finite = false;
    bool z_star_unique = false;
    bool rho_single_peaked = false;
    bool l_negative = false;
    bool x1c_located = false;
    bool x2c_located = false;
    bool c2_in_range = false;

    int z_star_sign_changes = 0;
    int rho_sign_changes = 0;
    double z_star = 0.0;
    double x_star = 0.0;
    double x_hat = 0.0;
    double j_zstar = 0.0;
    /// Argument where L < 0 (the witness), if found.
    std::optional<double> l_negative_at;
    std::optional<double> x1c;
    std::optional<double> x2c;

    bool all_ok() const noexcept {
        return resolvent_finite && z_star_unique && rho_single_peaked && l_negative &&
               x1c_located && x2c_located && c2_in_range;
    }
    /// Names of failing flags.
    std::vector<std::string> failures() const;
};

AssumptionReport check_assumptions(const ModelParams& params, double c1, double c2);

}  // namespace cgame
