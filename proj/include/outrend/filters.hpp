#pragma once

#include <optional>
#include <span>
#include <vector>

#include "outrend/analytics.hpp"

namespace outrend {

/// Trend parameters assumed by the agent when filtering (they may differ
/// from the true dynamics). `prior_var` is the initial estimation-error
/// variance of the discrete Kalman filter; when unset it defaults to the
/// agent's stationary trend variance sigma_mu_a^2 / (2 lambda_a).
struct AgentFilterParams {
    double lambda_a = 1.0;
    double sigma_mu_a = 0.9;
    std::optional<double> prior_var{};

    void validate() const;
};

/// Filtered trend means and estimation-error variances of the discrete
/// Kalman filter; entry i corresponds to the state after absorbing
/// returns[i].
struct KalmanResult {
    std::vector<double> estimates;
    std::vector<double> error_vars;
};

/// Exponential moving average of per-step returns:
///   est_{k+1} = est_k + (delta/tau) (y_{k+1} - est_k),  est_0 = 0.
/// Output has one entry per input return (the state after that return).
/// Rejects delta >= tau (unstable discretization).
std::vector<double> ema_run(std::span<const double> returns, double tau, double delta);

/// Steady-state Kalman trend estimate: exactly m_star times the
/// exponential average with duration tau_star.
std::vector<double> steady_state_kalman_run(std::span<const double> returns,
                                            const TrendModelParams& p, double delta);

/// Scalar predict/update Kalman recursion for the trend under observed
/// per-step returns. Observation i has noise variance variances[i]/delta
/// (variances[i] is the spot variance at the start of the step producing
/// returns[i]); the state transition uses the agent's parameters.
KalmanResult discrete_kalman_run(std::span<const double> returns,
                                 std::span<const double> variances,
                                 const AgentFilterParams& agent, double delta);

}  // namespace outrend
