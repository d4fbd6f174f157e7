#include "outrend/analytics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace outrend {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// (1 - e^{-x}(1+x)) / x^2, series branch near 0 where the direct form cancels.
double one_minus_exp_decay_over_x2(double x) {
    if (std::abs(x) < 1e-3) {
        return 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0;
    }
    return (1.0 - std::exp(-x) * (1.0 + x)) / (x * x);
}

// (e^{-x} - 1 + x) / x^2 = 1/2 - x/6 + x^2/24 - ...
double expm1_residual_over_x2(double x) {
    if (std::abs(x) < 1e-3) {
        return 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0;
    }
    return (std::expm1(-x) + x) / (x * x);
}

}  // namespace

void TrendModelParams::validate() const {
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
    require(std::isfinite(sigma_mu) && sigma_mu >= 0.0, "sigma_mu must be non-negative");
    require(std::isfinite(sigma_s) && sigma_s > 0.0, "sigma_s must be positive");
}

void OptimalStrategyConfig::validate() const {
    require(std::isfinite(m) && m >= 0.0, "leverage m must be non-negative");
    require(std::isfinite(tau) && tau > 0.0, "duration tau must be positive");
}

void CrossMaConfig::validate() const {
    require(std::isfinite(l1) && l1 >= 0.0, "l1 must be non-negative");
    require(std::isfinite(l2) && l1 < l2, "windows must satisfy l1 < l2");
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double std_normal_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

DerivedQuantities derived_quantities(const TrendModelParams& p) {
    p.validate();
    const double snr = p.snr();
    const double eps = 2.0 * snr / p.lambda;  // beta^2 - 1
    const double beta = std::sqrt(1.0 + eps);
    // m_star = (beta-1)/beta without the beta-1 cancellation at small SNR.
    const double m_star = eps / (beta * (beta + 1.0));
    return {beta, snr, 1.0 / (p.lambda * beta), m_star};
}

double filter_variance_stationary(const TrendModelParams& p, double tau) {
    p.validate();
    require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
    return p.sigma_s * p.sigma_s / (2.0 * tau) +
           p.sigma_mu * p.sigma_mu / (2.0 * p.lambda * (1.0 + p.lambda * tau));
}

double filter_variance(const TrendModelParams& p, double tau, double t) {
    p.validate();
    require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
    require(std::isfinite(t) && t >= 0.0, "t must be non-negative");
    if (t == 0.0) return 0.0;

    const double lam = p.lambda;
    const double k = 1.0 / tau;
    const double wiener = p.sigma_s * p.sigma_s / (2.0 * tau) * (-std::expm1(-2.0 * k * t));

    // Trend contribution: (sigma_mu^2 k^2 / lambda) * B(t) with
    //   B = (1-e^{-2kt})/(2k(k+lam)) - D/(k+lam) - E/2,
    //   D = t e^{-2kt} phi(u),  E = t^2 e^{-2kt} phi(u)^2,  u = (k-lam) t,
    //   phi(u) = (e^u - 1)/u.
    // phi removes the u -> 0 (tau -> 1/lambda) singularity; for |u| away
    // from 0 both D and E are evaluated as differences of decaying
    // exponentials, which also avoids expm1 overflow at large u.
    const double u = (k - lam) * t;
    double d_term, e_term;
    if (std::abs(u) < 1e-4) {
        const double phi = (std::abs(u) < 1e-12) ? 1.0 + u / 2.0 + u * u / 6.0
                                                 : std::expm1(u) / u;
        const double te = t * std::exp(-2.0 * k * t);
        d_term = te * phi;
        e_term = t * te * phi * phi;
    } else {
        const double ekl = std::exp(-(k + lam) * t);
        const double e2k = std::exp(-2.0 * k * t);
        const double e2l = std::exp(-2.0 * lam * t);
        d_term = (ekl - e2k) / (k - lam);
        e_term = (e2l - 2.0 * ekl + e2k) / ((k - lam) * (k - lam));
    }
    const double b = (-std::expm1(-2.0 * k * t)) / (2.0 * k * (k + lam)) -
                     d_term / (k + lam) - 0.5 * e_term;
    return wiener + p.sigma_mu * p.sigma_mu * k * k / lam * b;
}

double misspecified_rate_snr(double lambda, double snr, double m, double tau) {
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
    require(std::isfinite(snr) && snr >= 0.0, "snr must be non-negative");
    require(std::isfinite(m) && m >= 0.0, "leverage m must be non-negative");
    require(std::isfinite(tau) && tau > 0.0, "duration tau must be positive");
    const double lt1 = lambda * tau + 1.0;
    return m * (2.0 * tau * (2.0 - m) * snr - m * lt1) / (4.0 * tau * lt1);
}

double misspecified_rate(const TrendModelParams& p, const OptimalStrategyConfig& c) {
    p.validate();
    c.validate();
    return misspecified_rate_snr(p.lambda, p.snr(), c.m, c.tau);
}

double well_specified_rate_snr(double lambda, double snr) {
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
    require(std::isfinite(snr) && snr >= 0.0, "snr must be non-negative");
    const double root = std::sqrt(lambda * (lambda + 2.0 * snr));
    return snr * snr / (2.0 * (snr + lambda + root));
}

double well_specified_rate(const TrendModelParams& p) {
    p.validate();
    return well_specified_rate_snr(p.lambda, p.snr());
}

OptimalDuration optimal_duration_snr(double lambda, double snr, double m) {
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
    require(std::isfinite(snr) && snr >= 0.0, "snr must be non-negative");
    require(std::isfinite(m) && m > 0.0 && m < 2.0, "leverage m must lie in (0,2)");
    if (!(snr / lambda > 2.0 * m / (2.0 - m))) {
        return {false, kNaN, kNaN};
    }
    const double denom = 2.0 * (2.0 - m) * snr - lambda * m;
    const double tau_min = m / denom;
    const double tau_opt = (m + std::sqrt((2.0 - m) * 2.0 * m * snr / lambda)) / denom;
    return {true, tau_min, tau_opt};
}

OptimalDuration optimal_duration(const TrendModelParams& p, double m) {
    p.validate();
    return optimal_duration_snr(p.lambda, p.snr(), m);
}

CrossMaMoments crossma_moments(const TrendModelParams& p, const CrossMaConfig& c) {
    p.validate();
    c.validate();
    require(c.l1 > 0.0, "l1 must be positive (use single_ma_rate for l1 == 0)");

    const double lam = p.lambda;
    const double smu2 = p.sigma_mu * p.sigma_mu;
    const double ss2 = p.sigma_s * p.sigma_s;
    const double l1 = c.l1, l2 = c.l2;
    const double dl = l2 - l1;

    const double e1 = -std::expm1(-lam * l1);  // 1 - e^{-lam l1}
    const double e2 = -std::expm1(-lam * l2);

    const double mean_gap = -ss2 * dl / 4.0;

    // The 1/l1 and e1/l1^2 terms cancel to O(1) as l1 -> 0; they are grouped
    // as -(e^{-lam l1} - 1 + lam l1)/l1^2 so the variance stays accurate for
    // windows down to the single-average limit.
    const double x1 = lam * l1;
    const double g1 = -lam * lam * expm1_residual_over_x2(x1);
    const double lam5 = lam * lam * lam * lam * lam;
    const double bracket = g1 + lam / l2 + e2 / (l2 * l2) -
                           (e1 / l1) * (e2 / l2) -
                           2.0 * std::exp(-lam * l2) * std::sinh(x1) / (l1 * l2);
    const double asym_var = (smu2 / (lam * lam) + ss2) * dl * dl / (3.0 * l2) +
                            smu2 / lam5 * bracket;

    const double cov_limit = smu2 / (2.0 * lam * lam * lam) * (e1 / l1 - e2 / l2);
    return {mean_gap, asym_var, cov_limit};
}

namespace {

double indicator_rate(double gamma, double alpha, double ss2, double mean_gap,
                      double asym_var, double cov_limit) {
    const double z = mean_gap / std::sqrt(asym_var);
    return -gamma * gamma * ss2 / 2.0 -
           (alpha * alpha + 2.0 * alpha * gamma) * ss2 / 2.0 * std_normal_cdf(z) +
           alpha * cov_limit / std::sqrt(asym_var) * std_normal_pdf(z);
}

}  // namespace

double crossma_rate(const TrendModelParams& p, const CrossMaConfig& c) {
    p.validate();
    c.validate();
    if (c.l1 == 0.0) return single_ma_rate(p, c.gamma, c.alpha, c.l2);
    const CrossMaMoments mo = crossma_moments(p, c);
    return indicator_rate(c.gamma, c.alpha, p.sigma_s * p.sigma_s, mo.mean_gap,
                          mo.asym_var, mo.cov_limit);
}

double single_ma_rate(const TrendModelParams& p, double gamma, double alpha, double l) {
    p.validate();
    require(std::isfinite(l) && l > 0.0, "window l must be positive");

    const double lam = p.lambda;
    const double smu2 = p.sigma_mu * p.sigma_mu;
    const double ss2 = p.sigma_s * p.sigma_s;
    const double x = lam * l;

    const double mean_gap = -ss2 * l / 4.0;
    const double asym_var = (smu2 / (lam * lam) + ss2) * l / 3.0 -
                            smu2 / (2.0 * lam * lam * lam) *
                                (1.0 - 2.0 * one_minus_exp_decay_over_x2(x));
    // (1 - (1-e^{-x})/x) = x/2 - x^2/6 + ..., computed as x * series.
    const double q = x * expm1_residual_over_x2(x);
    const double cov_limit = smu2 * q / (2.0 * lam * lam);
    return indicator_rate(gamma, alpha, ss2, mean_gap, asym_var, cov_limit);
}

}  // namespace outrend
