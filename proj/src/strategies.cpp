#include "outrend/strategies.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace outrend {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Core accumulation loop shared by both strategies. allocations[i] applies
// to returns[offset + i]; step_var(i) is the variance used by the
// continuous-limit track (negative disables it).
template <typename AllocFn, typename VarFn>
WealthTrack accumulate(std::span<const double> returns, std::size_t offset,
                       std::size_t n_active, double delta, AllocFn alloc_at,
                       VarFn step_var) {
    WealthTrack track;
    track.start_index = offset;
    track.allocations.resize(n_active);
    const bool with_cont = n_active == 0 || step_var(0) >= 0.0;
    track.log_wealth.reserve(n_active + 1);
    track.log_wealth.push_back(0.0);
    if (with_cont) {
        track.log_return_cont.reserve(n_active + 1);
        track.log_return_cont.push_back(0.0);
    }

    double log_w = 0.0;
    double cont = 0.0;
    for (std::size_t i = 0; i < n_active; ++i) {
        const double w = alloc_at(i);
        track.allocations[i] = w;
        const double y = returns[offset + i];
        if (with_cont) {
            const double v = step_var(i);
            cont += w * y * delta - 0.5 * w * w * v * delta;
            track.log_return_cont.push_back(cont);
        }
        if (!track.bankrupt) {
            const double growth = 1.0 + w * y * delta;
            if (growth <= 0.0) {
                track.bankrupt = true;
                track.bankrupt_step = i;
            } else {
                log_w += std::log(growth);
                track.log_wealth.push_back(log_w);
            }
        }
    }
    return track;
}

}  // namespace

double WealthTrack::annualized_log_wealth(double delta) const {
    if (bankrupt || allocations.empty()) {
        return bankrupt ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    }
    return log_wealth.back() / active_years(delta);
}

double WealthTrack::annualized_cont_rate(double delta) const {
    if (log_return_cont.empty() || allocations.empty()) return 0.0;
    return log_return_cont.back() / active_years(delta);
}

void WealthTrack::write_csv(std::ostream& out, double delta) const {
    out << "t,log_wealth,allocation\n";
    char buf[96];
    for (std::size_t i = 0; i + 1 < log_wealth.size(); ++i) {
        const double t = delta * static_cast<double>(start_index + i);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t, log_wealth[i],
                      allocations[i]);
        out << buf;
    }
    if (!log_wealth.empty() && !bankrupt) {
        const double t = delta * static_cast<double>(start_index + log_wealth.size() - 1);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,\n", t, log_wealth.back());
        out << buf;
    }
}

std::vector<double> geometric_ma(std::span<const double> prices,
                                 std::size_t window_steps) {
    require(window_steps >= 1, "window must be at least one step");
    require(prices.size() >= window_steps, "price series shorter than the window");
    if (window_steps == 1) {
        for (double p : prices) require(p > 0.0, "prices must be positive");
        return {prices.begin(), prices.end()};
    }

    // Prefix sums of log prices; G[k] = exp((cum[k+1]-cum[k+1-L])/L).
    std::vector<double> cum(prices.size() + 1, 0.0);
    for (std::size_t i = 0; i < prices.size(); ++i) {
        require(prices[i] > 0.0, "prices must be positive");
        cum[i + 1] = cum[i] + std::log(prices[i]);
    }
    std::vector<double> out(prices.size() - window_steps + 1);
    const double inv_w = 1.0 / static_cast<double>(window_steps);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::exp((cum[k + window_steps] - cum[k]) * inv_w);
    }
    return out;
}

WealthTrack run_misspecified_optimal(std::span<const double> returns,
                                     double sigma_s_sq, double m, double tau,
                                     double delta) {
    require(std::isfinite(sigma_s_sq) && sigma_s_sq > 0.0,
            "sigma_s_sq must be positive");
    require(std::isfinite(m) && m >= 0.0, "leverage m must be non-negative");
    const std::vector<double> est = ema_run(returns, tau, delta);
    const double scale = m / sigma_s_sq;
    return accumulate(
        returns, 0, returns.size(), delta,
        [&](std::size_t i) { return i == 0 ? 0.0 : scale * est[i - 1]; },
        [&](std::size_t) { return sigma_s_sq; });
}

WealthTrack run_misspecified_optimal(std::span<const double> returns,
                                     std::span<const double> variances,
                                     const AgentFilterParams& agent, double delta) {
    const KalmanResult kf = discrete_kalman_run(returns, variances, agent, delta);
    return accumulate(
        returns, 0, returns.size(), delta,
        [&](std::size_t i) {
            return i == 0 ? 0.0 : kf.estimates[i - 1] / variances[i];
        },
        [&](std::size_t i) { return variances[i]; });
}

WealthTrack run_crossma(std::span<const double> prices, const CrossMaConfig& cfg,
                        double delta, std::span<const double> step_variances) {
    cfg.validate();
    require(std::isfinite(delta) && delta > 0.0, "delta must be positive");
    const auto l1s = static_cast<std::size_t>(std::llround(cfg.l1 / delta));
    const auto l2s = static_cast<std::size_t>(std::llround(cfg.l2 / delta));
    require(l1s >= 1, "short window rounds to zero steps");
    require(l1s < l2s, "short window must be shorter than the long window");
    require(prices.size() >= l2s + 1, "price series shorter than the long window");
    const std::size_t n_steps = prices.size() - 1;
    require(step_variances.empty() || step_variances.size() == 1 ||
                step_variances.size() == n_steps,
            "step_variances must be empty, size 1, or one per step");

    const std::vector<double> g_short = geometric_ma(prices, l1s);
    const std::vector<double> g_long = geometric_ma(prices, l2s);

    std::vector<double> returns(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        returns[k] = (prices[k + 1] - prices[k]) / (delta * prices[k]);
    }

    const std::size_t start = l2s - 1;  // first step with both windows full
    const std::size_t n_active = n_steps - start;
    const bool const_var = step_variances.size() == 1;
    return accumulate(
        returns, start, n_active, delta,
        [&](std::size_t i) {
            const std::size_t k = start + i;
            const bool above = g_short[k - l1s + 1] > g_long[k - l2s + 1];
            return cfg.gamma + (above ? cfg.alpha : 0.0);
        },
        [&](std::size_t i) {
            if (step_variances.empty()) return -1.0;
            return const_var ? step_variances[0] : step_variances[start + i];
        });
}

}  // namespace outrend
