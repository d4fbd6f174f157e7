#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "outrend/analytics.hpp"
#include "outrend/filters.hpp"

namespace outrend {

/// Wealth evolution of a self-financing strategy on a uniform grid.
///
/// The strategy becomes active at grid step `start_index` (0 for the
/// filter-based strategy; the first step with a full long window for the
/// cross moving average). `allocations[i]` is the wealth fraction held over
/// active step i. `log_wealth` is the compounded track
///   ln P, P_{k+1} = P_k (1 + w_k y_{k+1} delta),
/// starting at 0; it ends early when a step drives the wealth non-positive
/// (`bankrupt` set, `bankrupt_step` = offending active step). The
/// compounded track is what a daily-rebalanced account realizes.
/// `log_return_cont` accumulates the continuous-trading limit
///   sum_k (w_k y_{k+1} delta - w_k^2 v_k delta / 2),
/// which stays defined past a compounded bankruptcy and is the quantity the
/// asymptotic rate formulas describe; it is empty when the caller provided
/// no variance information.
struct WealthTrack {
    std::size_t start_index = 0;
    std::vector<double> allocations;
    std::vector<double> log_wealth;
    std::vector<double> log_return_cont;
    bool bankrupt = false;
    std::size_t bankrupt_step = 0;

    std::size_t active_steps() const { return allocations.size(); }
    double active_years(double delta) const {
        return delta * static_cast<double>(allocations.size());
    }
    /// Final compounded log wealth divided by the active span. NaN for a
    /// bankrupt track (log wealth is undefined at non-positive wealth).
    double annualized_log_wealth(double delta) const;
    /// Final continuous-limit log return divided by the active span.
    double annualized_cont_rate(double delta) const;

    /// CSV dump: t,log_wealth,allocation over the active window.
    void write_csv(std::ostream& out, double delta) const;
};

/// Discrete geometric moving average over the last `window_steps` prices:
///   G[k] = exp( (1/L) sum_{j=k-L+1..k} ln S_j ),
/// defined from index window_steps-1 onward (output size
/// prices.size() - window_steps + 1).
std::vector<double> geometric_ma(std::span<const double> prices,
                                 std::size_t window_steps);

/// Mis-specified optimal strategy under constant volatility: allocation
/// w_k = m est_k / sigma_s_sq with est the exponential average of the
/// returns (est_0 = 0, so the first step is uninvested).
WealthTrack run_misspecified_optimal(std::span<const double> returns,
                                     double sigma_s_sq, double m, double tau,
                                     double delta);

/// Optimal strategy under stochastic volatility: the trend estimate comes
/// from the discrete Kalman filter with the agent's parameters and the
/// allocation is w_k = est_k / V_k with the decision-time spot variance.
/// variances[i] is the spot variance at the start of step i
/// (size == returns.size()).
WealthTrack run_misspecified_optimal(std::span<const double> returns,
                                     std::span<const double> variances,
                                     const AgentFilterParams& agent, double delta);

/// Cross moving-average strategy on a price path: allocation
/// gamma + alpha while the short geometric average strictly exceeds the
/// long one (ties allocate gamma). Window lengths come from the config in
/// years and are converted to steps with the grid delta. `step_variances`
/// (size 1 for a constant, or prices.size()-1 per step) enables the
/// continuous-limit track; pass empty to skip it.
WealthTrack run_crossma(std::span<const double> prices, const CrossMaConfig& cfg,
                        double delta, std::span<const double> step_variances = {});

}  // namespace outrend
