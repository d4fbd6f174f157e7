#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "outrend/analytics.hpp"
#include "outrend/filters.hpp"
#include "outrend/simulation.hpp"

namespace outrend {

enum class ModelKind { OuGbm, Heston };
enum class StrategyKind { MisspecifiedOptimal, CrossMa };

/// Which per-path statistic the experiment aggregates.
/// ContinuousLimit: the continuous-trading log-return accumulation, defined
/// on every path (this is what the closed-form asymptotic rates describe).
/// Compounded: ln of the daily-compounded wealth; paths whose compounded
/// wealth goes non-positive are flagged bankrupt and excluded.
enum class WealthMetric { ContinuousLimit, Compounded };

struct McExperimentConfig {
    ModelKind model = ModelKind::OuGbm;
    TrendModelParams params{};  // sigma_s unused under Heston
    HestonParams heston{};
    StrategyKind strategy = StrategyKind::MisspecifiedOptimal;
    OptimalStrategyConfig optimal{};  // constant-vol optimal strategy
    AgentFilterParams agent{};        // stochastic-vol optimal strategy
    CrossMaConfig crossma{};
    PathGrid grid{1.0 / 252.0, 25200};
    int n_paths = 2000;
    std::uint64_t base_seed = 0;
    int workers = 0;  // 0 = hardware concurrency
    WealthMetric metric = WealthMetric::ContinuousLimit;
    bool with_histogram = false;
    int histogram_bins = 50;

    void validate() const;
};

/// Aggregated Monte Carlo result. `mean`/`stderr_` are over the per-path
/// annualized log-returns of the `n_used` paths entering the statistics
/// (n_used = m_paths - excluded; only Compounded excludes bankrupt paths,
/// but bankruptcies of the compounded wealth are counted either way).
struct McSummary {
    double mean = 0.0;
    double stderr_ = 0.0;
    int m_paths = 0;
    int n_used = 0;
    int bankrupts = 0;
    std::vector<double> hist_edges;  // histogram_bins+1 edges, empty if disabled
    std::vector<std::int64_t> hist_counts;

    std::string to_json() const;
};

/// Runs the experiment: per-path seeds derive from (base_seed, path index),
/// paths are distributed over `workers` threads and reduced in path order,
/// so the result is identical for any worker count.
McSummary run_mc(const McExperimentConfig& config);

/// One row of the rate sweep over trend volatility: closed forms for both
/// strategies and optional Monte Carlo estimates with standard errors.
struct RateSweepRow {
    double sigma_mu;
    double rate_optimal_cf;
    double rate_crossma_cf;
    bool with_mc = false;
    double rate_optimal_mc = 0.0;
    double se_optimal = 0.0;
    double rate_crossma_mc = 0.0;
    double se_crossma = 0.0;
};

struct RateSweepConfig {
    std::vector<double> sigma_mu_grid;
    double lambda = 1.0;
    double sigma_s = 0.3;
    OptimalStrategyConfig optimal{};
    CrossMaConfig crossma{};
    bool with_mc = false;
    PathGrid grid{1.0 / 252.0, 25200};
    int n_paths = 2000;
    std::uint64_t base_seed = 0;
    int workers = 0;
};

std::vector<RateSweepRow> sweep_rates(const RateSweepConfig& config);
std::string rate_sweep_csv(const std::vector<RateSweepRow>& rows);

/// One row of the duration sweep over (lambda, SNR): the optimal filter
/// duration tau_star and, for the given leverage, the mis-specified
/// strategy's tau_min/tau_opt (flagged infeasible outside the existence
/// region).
struct DurationSweepRow {
    double lambda;
    double snr;
    double tau_star;
    bool feasible;
    double tau_min;
    double tau_opt;
};

struct DurationSweepConfig {
    std::vector<double> lambda_grid;
    std::vector<double> snr_grid;
    double m = 1.0;
};

std::vector<DurationSweepRow> sweep_durations(const DurationSweepConfig& config);
std::string duration_sweep_csv(const std::vector<DurationSweepRow>& rows);

}  // namespace outrend
