#include "outrend/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "outrend/rng.hpp"

namespace outrend {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void PathGrid::validate() const {
    require(std::isfinite(delta) && delta > 0.0, "grid delta must be positive");
    require(n_steps > 0, "grid must have at least one step");
}

void HestonParams::validate() const {
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be positive");
    require(std::isfinite(v_inf) && v_inf > 0.0, "v_inf must be positive");
    require(std::isfinite(eps) && eps > 0.0, "eps must be positive");
    require(std::isfinite(rho) && rho >= -1.0 && rho <= 1.0, "rho must lie in [-1,1]");
    require(std::isfinite(v0) && v0 > 0.0, "v0 must be positive");
}

void SimulatedPath::write_csv(std::ostream& out) const {
    const bool has_var = !variances.empty();
    out << (has_var ? "t,price,trend,variance\n" : "t,price,trend\n");
    char buf[128];
    for (std::size_t k = 0; k < prices.size(); ++k) {
        if (has_var) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", times[k],
                          prices[k], trends[k], variances[k]);
        } else {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", times[k], prices[k],
                          trends[k]);
        }
        out << buf;
    }
}

SimulatedPath simulate_ou_gbm(const TrendModelParams& p, const PathGrid& g,
                              std::uint64_t seed) {
    p.validate();
    g.validate();

    const auto n = static_cast<std::size_t>(g.n_steps);
    const double delta = g.delta;
    const double decay = std::exp(-p.lambda * delta);
    const double trend_shock_sd =
        p.sigma_mu * std::sqrt(-std::expm1(-2.0 * p.lambda * delta) / (2.0 * p.lambda));
    const double vol_sd = p.sigma_s * std::sqrt(delta);
    const double drift_adj = -0.5 * p.sigma_s * p.sigma_s;

    SimulatedPath path;
    path.times.resize(n + 1);
    path.prices.resize(n + 1);
    path.trends.resize(n + 1);
    path.returns.resize(n);

    rng::Stream rng(seed);
    double mu = 0.0;
    double log_s = 0.0;
    path.times[0] = 0.0;
    path.prices[0] = 1.0;
    path.trends[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double xi_s = rng.next_normal();
        const double step = (mu + drift_adj) * delta + vol_sd * xi_s;
        const double prev_price = path.prices[k];
        log_s += step;
        const double price = std::exp(log_s);
        path.returns[k] = (price - prev_price) / (delta * prev_price);
        mu = decay * mu + trend_shock_sd * rng.next_normal();
        path.times[k + 1] = delta * static_cast<double>(k + 1);
        path.prices[k + 1] = price;
        path.trends[k + 1] = mu;
    }
    return path;
}

SimulatedPath simulate_heston(double lambda, double sigma_mu, const HestonParams& h,
                              const PathGrid& g, std::uint64_t seed) {
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
    require(std::isfinite(sigma_mu) && sigma_mu >= 0.0, "sigma_mu must be non-negative");
    h.validate();
    g.validate();

    const auto n = static_cast<std::size_t>(g.n_steps);
    const double delta = g.delta;
    const double sqrt_delta = std::sqrt(delta);
    const double decay = std::exp(-lambda * delta);
    const double trend_shock_sd =
        sigma_mu * std::sqrt(-std::expm1(-2.0 * lambda * delta) / (2.0 * lambda));
    const double rho_perp = std::sqrt(1.0 - h.rho * h.rho);

    SimulatedPath path;
    path.times.resize(n + 1);
    path.prices.resize(n + 1);
    path.trends.resize(n + 1);
    path.variances.resize(n + 1);
    path.returns.resize(n);

    rng::Stream rng(seed);
    double mu = 0.0;
    double log_s = 0.0;
    double v = h.v0;
    path.times[0] = 0.0;
    path.prices[0] = 1.0;
    path.trends[0] = 0.0;
    path.variances[0] = h.v0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v_plus = v > 0.0 ? v : 0.0;
        const double xi_s = rng.next_normal();
        const double xi_perp = rng.next_normal();
        const double xi_v = h.rho * xi_s + rho_perp * xi_perp;

        const double step = (mu - 0.5 * v_plus) * delta + std::sqrt(v_plus) * sqrt_delta * xi_s;
        const double prev_price = path.prices[k];
        log_s += step;
        const double price = std::exp(log_s);
        path.returns[k] = (price - prev_price) / (delta * prev_price);

        v = v + h.kappa * (h.v_inf - v_plus) * delta +
            h.eps * std::sqrt(v_plus) * sqrt_delta * xi_v;
        mu = decay * mu + trend_shock_sd * rng.next_normal();

        path.times[k + 1] = delta * static_cast<double>(k + 1);
        path.prices[k + 1] = price;
        path.trends[k + 1] = mu;
        path.variances[k + 1] = v;
    }
    return path;
}

}  // namespace outrend
