#include "outrend/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "outrend/rng.hpp"
#include "outrend/strategies.hpp"

namespace outrend {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Fixed-order pairwise sum: deterministic and accurate for large n.
double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct PathResult {
    double value = 0.0;
    bool bankrupt = false;
};

PathResult run_one_path(const McExperimentConfig& c, std::uint64_t path_index) {
    const std::uint64_t seed = rng::derive_stream_seed(c.base_seed, path_index);

    SimulatedPath path;
    if (c.model == ModelKind::OuGbm) {
        path = simulate_ou_gbm(c.params, c.grid, seed);
    } else {
        path = simulate_heston(c.params.lambda, c.params.sigma_mu, c.heston, c.grid, seed);
    }

    WealthTrack track;
    if (c.strategy == StrategyKind::MisspecifiedOptimal) {
        if (c.model == ModelKind::OuGbm) {
            track = run_misspecified_optimal(path.returns, c.params.sigma_s * c.params.sigma_s,
                                             c.optimal.m, c.optimal.tau, c.grid.delta);
        } else {
            // Decision-time spot variances; the truncated value drives both
            // the price shock and the filter, floored to keep the
            // observation variance positive if the scheme ever dips to zero.
            std::vector<double> variances(path.returns.size());
            for (std::size_t i = 0; i < variances.size(); ++i) {
                variances[i] = std::max(path.variances[i], 1e-12);
            }
            track = run_misspecified_optimal(path.returns, variances, c.agent, c.grid.delta);
        }
    } else {
        if (c.model == ModelKind::OuGbm) {
            const double var = c.params.sigma_s * c.params.sigma_s;
            track = run_crossma(path.prices, c.crossma, c.grid.delta, std::span(&var, 1));
        } else {
            std::vector<double> variances(path.returns.size());
            for (std::size_t i = 0; i < variances.size(); ++i) {
                variances[i] = std::max(path.variances[i], 0.0);
            }
            track = run_crossma(path.prices, c.crossma, c.grid.delta, variances);
        }
    }

    PathResult r;
    r.bankrupt = track.bankrupt;
    r.value = c.metric == WealthMetric::ContinuousLimit
                  ? track.annualized_cont_rate(c.grid.delta)
                  : track.annualized_log_wealth(c.grid.delta);
    return r;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void McExperimentConfig::validate() const {
    require(n_paths >= 2, "need at least two paths");
    grid.validate();
    if (model == ModelKind::OuGbm) {
        params.validate();
    } else {
        require(std::isfinite(params.lambda) && params.lambda > 0.0,
                "lambda must be positive");
        require(std::isfinite(params.sigma_mu) && params.sigma_mu >= 0.0,
                "sigma_mu must be non-negative");
        heston.validate();
    }
    if (strategy == StrategyKind::MisspecifiedOptimal) {
        if (model == ModelKind::OuGbm) {
            optimal.validate();
        } else {
            agent.validate();
        }
    } else {
        crossma.validate();
    }
    require(histogram_bins >= 1, "histogram needs at least one bin");
}

McSummary run_mc(const McExperimentConfig& config) {
    config.validate();
    const int n = config.n_paths;
    std::vector<PathResult> results(static_cast<std::size_t>(n));

    const int workers = std::min(resolve_workers(config.workers), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) {
            results[static_cast<std::size_t>(i)] =
                run_one_path(config, static_cast<std::uint64_t>(i));
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int i = w; i < n; i += workers) {
                    results[static_cast<std::size_t>(i)] =
                        run_one_path(config, static_cast<std::uint64_t>(i));
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    McSummary summary;
    summary.m_paths = n;
    for (const PathResult& r : results) summary.bankrupts += r.bankrupt ? 1 : 0;

    std::vector<double> values;
    values.reserve(results.size());
    for (const PathResult& r : results) {
        if (config.metric == WealthMetric::Compounded && r.bankrupt) continue;
        values.push_back(r.value);
    }
    summary.n_used = static_cast<int>(values.size());
    if (values.empty()) return summary;

    const double nn = static_cast<double>(values.size());
    summary.mean = pairwise_sum(values) / nn;
    if (values.size() >= 2) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - summary.mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / (nn - 1.0);
        summary.stderr_ = std::sqrt(var / nn);
    }

    if (config.with_histogram) {
        const int bins = config.histogram_bins;
        const double sd = summary.stderr_ * std::sqrt(nn);
        const double lo = summary.mean - 4.0 * sd;
        const double hi = summary.mean + 4.0 * sd;
        const double width = (hi > lo) ? (hi - lo) / bins : 1.0;
        summary.hist_edges.resize(static_cast<std::size_t>(bins) + 1);
        for (int b = 0; b <= bins; ++b) {
            summary.hist_edges[static_cast<std::size_t>(b)] = lo + width * b;
        }
        summary.hist_counts.assign(static_cast<std::size_t>(bins), 0);
        for (double v : values) {
            int b = static_cast<int>(std::floor((v - lo) / width));
            b = std::clamp(b, 0, bins - 1);  // tail mass lands in the edge bins
            ++summary.hist_counts[static_cast<std::size_t>(b)];
        }
    }
    return summary;
}

std::string McSummary::to_json() const {
    nlohmann::ordered_json j;
    j["mean"] = mean;
    j["stderr"] = stderr_;
    j["m_paths"] = m_paths;
    j["n_used"] = n_used;
    j["bankrupts"] = bankrupts;
    if (hist_edges.empty()) {
        j["histogram"] = nullptr;
    } else {
        j["histogram"] = {{"edges", hist_edges}, {"counts", hist_counts}};
    }
    return j.dump();
}

std::vector<RateSweepRow> sweep_rates(const RateSweepConfig& config) {
    require(!config.sigma_mu_grid.empty(), "sigma_mu grid must be non-empty");
    std::vector<RateSweepRow> rows;
    rows.reserve(config.sigma_mu_grid.size());
    for (std::size_t i = 0; i < config.sigma_mu_grid.size(); ++i) {
        const double sigma_mu = config.sigma_mu_grid[i];
        const TrendModelParams p{config.lambda, sigma_mu, config.sigma_s};
        RateSweepRow row;
        row.sigma_mu = sigma_mu;
        row.rate_optimal_cf = misspecified_rate(p, config.optimal);
        row.rate_crossma_cf = crossma_rate(p, config.crossma);
        if (config.with_mc) {
            row.with_mc = true;
            McExperimentConfig mc;
            mc.model = ModelKind::OuGbm;
            mc.params = p;
            mc.grid = config.grid;
            mc.n_paths = config.n_paths;
            mc.workers = config.workers;
            // Each grid point gets its own stream block; both strategies
            // reuse the same seed so they see identical paths.
            mc.base_seed = rng::derive_stream_seed(config.base_seed, 0x5EED0000 + i);
            mc.strategy = StrategyKind::MisspecifiedOptimal;
            mc.optimal = config.optimal;
            const McSummary opt = run_mc(mc);
            row.rate_optimal_mc = opt.mean;
            row.se_optimal = opt.stderr_;
            mc.strategy = StrategyKind::CrossMa;
            mc.crossma = config.crossma;
            const McSummary xma = run_mc(mc);
            row.rate_crossma_mc = xma.mean;
            row.se_crossma = xma.stderr_;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string rate_sweep_csv(const std::vector<RateSweepRow>& rows) {
    const bool with_mc = !rows.empty() && rows.front().with_mc;
    std::string out = with_mc
                          ? "sigma_mu,rate_optimal_cf,rate_crossma_cf,rate_optimal_mc,"
                            "se_optimal,rate_crossma_mc,se_crossma\n"
                          : "sigma_mu,rate_optimal_cf,rate_crossma_cf\n";
    char buf[256];
    for (const RateSweepRow& r : rows) {
        if (with_mc) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                          r.sigma_mu, r.rate_optimal_cf, r.rate_crossma_cf,
                          r.rate_optimal_mc, r.se_optimal, r.rate_crossma_mc,
                          r.se_crossma);
        } else {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", r.sigma_mu,
                          r.rate_optimal_cf, r.rate_crossma_cf);
        }
        out += buf;
    }
    return out;
}

std::vector<DurationSweepRow> sweep_durations(const DurationSweepConfig& config) {
    require(!config.lambda_grid.empty() && !config.snr_grid.empty(),
            "lambda and snr grids must be non-empty");
    std::vector<DurationSweepRow> rows;
    rows.reserve(config.lambda_grid.size() * config.snr_grid.size());
    for (double lambda : config.lambda_grid) {
        for (double snr : config.snr_grid) {
            const double beta = std::sqrt(1.0 + 2.0 * snr / lambda);
            const OptimalDuration d = optimal_duration_snr(lambda, snr, config.m);
            rows.push_back({lambda, snr, 1.0 / (lambda * beta), d.feasible, d.tau_min,
                            d.tau_opt});
        }
    }
    return rows;
}

std::string duration_sweep_csv(const std::vector<DurationSweepRow>& rows) {
    std::string out = "lambda,snr,tau_star,feasible,tau_min,tau_opt\n";
    char buf[192];
    for (const DurationSweepRow& r : rows) {
        if (r.feasible) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,1,%.12g,%.12g\n", r.lambda,
                          r.snr, r.tau_star, r.tau_min, r.tau_opt);
        } else {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,0,,\n", r.lambda, r.snr,
                          r.tau_star);
        }
        out += buf;
    }
    return out;
}

}  // namespace outrend
