#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "outrend/analytics.hpp"

namespace outrend {

/// Uniform time grid: n_steps steps of size delta (years).
struct PathGrid {
    double delta = 1.0 / 252.0;
    std::int64_t n_steps = 0;

    double horizon() const { return delta * static_cast<double>(n_steps); }
    void validate() const;
};

/// Square-root variance process parameters. `kappa` is the variance
/// mean-reversion speed (1/years), `v_inf` the long-run variance, `eps` the
/// vol-of-vol, `rho` the instantaneous price/variance shock correlation and
/// `v0` the initial variance.
struct HestonParams {
    double kappa = 4.0;
    double v_inf = 0.09;
    double eps = 0.05;
    double rho = -0.6;
    double v0 = 0.09;

    /// True when 2 kappa v_inf < eps^2, i.e. the variance can touch zero;
    /// the full-truncation scheme stays well defined either way.
    bool feller_warning() const { return 2.0 * kappa * v_inf < eps * eps; }
    void validate() const;
};

/// One simulated path on a uniform grid. prices/trends/times (and
/// variances under stochastic volatility) have n_steps+1 entries; returns
/// has n_steps entries with returns[k] = (S_{k+1} - S_k) / (delta S_k).
struct SimulatedPath {
    std::vector<double> times;
    std::vector<double> prices;
    std::vector<double> trends;
    std::vector<double> returns;
    std::vector<double> variances;  // empty for the constant-volatility model

    /// CSV dump: header t,price,trend[,variance], 17 significant digits.
    void write_csv(std::ostream& out) const;
};

/// Constant-volatility model. The trend advances by its exact transition
///   mu_{k+1} = e^{-lambda delta} mu_k + v_k,
///   Var[v_k] = sigma_mu^2 (1 - e^{-2 lambda delta}) / (2 lambda),
/// the log price by
///   ln S_{k+1} = ln S_k + (mu_k - sigma_s^2/2) delta + sigma_s sqrt(delta) xi.
/// mu_0 = 0, S_0 = 1. A pure function of (params, grid, seed).
SimulatedPath simulate_ou_gbm(const TrendModelParams& p, const PathGrid& g,
                              std::uint64_t seed);

/// Stochastic-volatility model: same trend, price shock scaled by
/// sqrt(max(V_k,0)), and full-truncation variance updates
///   V_{k+1} = V_k + kappa (v_inf - V_k^+) delta + eps sqrt(V_k^+ delta) xi_V
/// with corr(xi_S, xi_V) = rho. Stored variances are the raw V_k.
SimulatedPath simulate_heston(double lambda, double sigma_mu, const HestonParams& h,
                              const PathGrid& g, std::uint64_t seed);

}  // namespace outrend
