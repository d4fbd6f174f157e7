#include "outrend/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace outrend {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void AgentFilterParams::validate() const {
    require(std::isfinite(lambda_a) && lambda_a > 0.0, "agent lambda must be positive");
    require(std::isfinite(sigma_mu_a) && sigma_mu_a >= 0.0,
            "agent sigma_mu must be non-negative");
    if (prior_var) {
        require(std::isfinite(*prior_var) && *prior_var >= 0.0,
                "prior variance must be non-negative");
    }
}

std::vector<double> ema_run(std::span<const double> returns, double tau, double delta) {
    require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
    require(std::isfinite(delta) && delta > 0.0, "delta must be positive");
    require(delta < tau, "delta must be smaller than tau");

    std::vector<double> out(returns.size());
    const double gain = delta / tau;
    double est = 0.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        est += gain * (returns[i] - est);
        out[i] = est;
    }
    return out;
}

std::vector<double> steady_state_kalman_run(std::span<const double> returns,
                                            const TrendModelParams& p, double delta) {
    const DerivedQuantities d = derived_quantities(p);
    std::vector<double> out = ema_run(returns, d.tau_star, delta);
    for (double& v : out) v *= d.m_star;
    return out;
}

KalmanResult discrete_kalman_run(std::span<const double> returns,
                                 std::span<const double> variances,
                                 const AgentFilterParams& agent, double delta) {
    agent.validate();
    require(std::isfinite(delta) && delta > 0.0, "delta must be positive");
    require(returns.size() == variances.size(),
            "returns and variances must have equal length");

    const double a = std::exp(-agent.lambda_a * delta);
    const double q = agent.sigma_mu_a * agent.sigma_mu_a *
                     (-std::expm1(-2.0 * agent.lambda_a * delta)) / (2.0 * agent.lambda_a);

    KalmanResult res;
    res.estimates.resize(returns.size());
    res.error_vars.resize(returns.size());

    double mean = 0.0;
    double var = agent.prior_var.value_or(agent.sigma_mu_a * agent.sigma_mu_a /
                                          (2.0 * agent.lambda_a));
    for (std::size_t i = 0; i < returns.size(); ++i) {
        require(variances[i] > 0.0, "observation variance must be positive");
        const double obs_var = variances[i] / delta;
        const double pred_mean = a * mean;
        const double pred_var = a * a * var + q;
        const double gain = pred_var / (pred_var + obs_var);
        mean = pred_mean + gain * (returns[i] - pred_mean);
        var = (1.0 - gain) * pred_var;
        res.estimates[i] = mean;
        res.error_vars[i] = var;
    }
    return res;
}

}  // namespace outrend
