#pragma once

#include <stdexcept>

namespace outrend {

/// Parameters of the trend/price model: the price carries an unobservable
/// trend that mean-reverts to zero at speed `lambda`, is driven by noise of
/// size `sigma_mu`, and the price itself has volatility `sigma_s`.
/// Units: lambda in 1/years, sigma_mu in 1/years^(3/2), sigma_s in
/// 1/years^(1/2).
struct TrendModelParams {
    double lambda = 1.0;
    double sigma_mu = 0.9;
    double sigma_s = 0.3;

    /// Signal-to-noise ratio sigma_mu^2 / (2 lambda sigma_s^2), in 1/years.
    double snr() const { return sigma_mu * sigma_mu / (2.0 * lambda * sigma_s * sigma_s); }

    /// Throws std::invalid_argument unless lambda > 0, sigma_s > 0 and
    /// sigma_mu >= 0 (sigma_mu == 0 is the degenerate trend-free case,
    /// accepted everywhere the formulas are continuous in it).
    void validate() const;
};

/// Quantities derived from the model: beta >= 1, the optimal filter
/// duration tau_star = 1/(lambda beta) and the correction factor
/// m_star = (beta-1)/beta of the steady-state Kalman filter.
struct DerivedQuantities {
    double beta;
    double snr;
    double tau_star;
    double m_star;
};

/// Mis-specified optimal strategy: leverage multiplier m applied to an
/// exponential average of returns with duration tau (years).
struct OptimalStrategyConfig {
    double m = 1.0;
    double tau = 1.0;

    void validate() const;  // m >= 0 (0 = no position), tau > 0
};

/// Cross moving-average strategy: allocation gamma plus alpha whenever the
/// short geometric average (window l1 years) exceeds the long one (l2).
struct CrossMaConfig {
    double gamma = -1.0;
    double alpha = 2.0;
    double l1 = 5.0 / 252.0;
    double l2 = 1.0;

    void validate() const;  // 0 <= l1 < l2
};

/// Asymptotic moments of the gap X between the short- and long-window
/// average log prices, and of its covariance with the trend.
struct CrossMaMoments {
    double mean_gap;   // E[X_t], exact for all t past the long window
    double asym_var;   // lim_{t->inf} Var[X_t]
    double cov_limit;  // lim_{t->inf} Cov[X_t, mu_t]
};

/// Result of the optimal-duration search for the mis-specified strategy.
/// Only meaningful when `feasible`; otherwise tau_min/tau_opt are NaN.
struct OptimalDuration {
    bool feasible;
    double tau_min;
    double tau_opt;
};

DerivedQuantities derived_quantities(const TrendModelParams& p);

/// Variance of the exponential average of returns at time t (years) for
/// duration tau. Continuous across tau == 1/lambda (the raw expression has
/// a removable singularity there; the implementation evaluates the
/// analytic limit).
double filter_variance(const TrendModelParams& p, double tau, double t);

/// Stationary (t -> infinity) limit: sigma_s^2/(2 tau) +
/// sigma_mu^2 / (2 lambda (1 + lambda tau)).
double filter_variance_stationary(const TrendModelParams& p, double tau);

/// Asymptotic expected logarithmic return per year of the mis-specified
/// optimal strategy:
///   m (2 tau (2-m) SNR - m (lambda tau + 1)) / (4 tau (lambda tau + 1)).
double misspecified_rate(const TrendModelParams& p, const OptimalStrategyConfig& c);
double misspecified_rate_snr(double lambda, double snr, double m, double tau);

/// Rate of the well-calibrated strategy (m_star, tau_star):
///   (SNR + lambda - sqrt(lambda (lambda + 2 SNR))) / 2,
/// evaluated in the cancellation-free form SNR^2 / (2 (SNR + lambda + sqrt(...))).
double well_specified_rate(const TrendModelParams& p);
double well_specified_rate_snr(double lambda, double snr);

/// Smallest profitable duration and the rate-maximizing duration for
/// leverage m in (0,2). Feasible iff SNR/lambda > 2m/(2-m) (strict).
OptimalDuration optimal_duration(const TrendModelParams& p, double m);
OptimalDuration optimal_duration_snr(double lambda, double snr, double m);

CrossMaMoments crossma_moments(const TrendModelParams& p, const CrossMaConfig& c);

/// Asymptotic expected logarithmic return per year of the cross
/// moving-average strategy. With l1 == 0 delegates to single_ma_rate.
double crossma_rate(const TrendModelParams& p, const CrossMaConfig& c);

/// Single moving-average strategy (the l1 -> 0 limit of the cross rule):
/// invest gamma + alpha when the price is above its geometric average over
/// the window l (years).
double single_ma_rate(const TrendModelParams& p, double gamma, double alpha, double l);

/// Standard normal CDF and density.
double std_normal_cdf(double x);
double std_normal_pdf(double x);

}  // namespace outrend
