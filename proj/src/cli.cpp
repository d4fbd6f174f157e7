#include "outrend/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "outrend/backtest.hpp"
#include "outrend/montecarlo.hpp"
#include "outrend/strategies.hpp"

namespace outrend {

namespace {

constexpr double kDaysPerYear = 252.0;

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Grid syntax: either "lo:hi:count" (inclusive linear spacing) or a comma
// separated list of values.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    const auto parse_num = [&](const std::string& s) {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("bad grid number '" + s + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::stringstream ss(text);
        std::string lo_s, hi_s, n_s;
        if (!std::getline(ss, lo_s, ':') || !std::getline(ss, hi_s, ':') ||
            !std::getline(ss, n_s)) {
            throw std::invalid_argument("grid must be lo:hi:count or v1,v2,...");
        }
        const double lo = parse_num(lo_s), hi = parse_num(hi_s);
        const long n = std::stol(n_s);
        if (n < 1) throw std::invalid_argument("grid count must be >= 1");
        for (long i = 0; i < n; ++i) {
            out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                            static_cast<double>(n - 1));
        }
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_num(item));
    if (out.empty()) throw std::invalid_argument("empty grid");
    return out;
}

// A duration that may be given in years or in (252-per-year) days.
struct DurationFlag {
    double years = 0.0;
    double days = 0.0;
    CLI::Option* years_opt = nullptr;
    CLI::Option* days_opt = nullptr;

    void add(CLI::App* cmd, const std::string& name, double default_years,
             const std::string& what) {
        years = default_years;
        years_opt = cmd->add_option("--" + name + ",--" + name + "-years", years,
                                    what + " in years");
        days_opt =
            cmd->add_option("--" + name + "-days", days, what + " in business days");
        years_opt->excludes(days_opt);
        days_opt->excludes(years_opt);
    }

    double value() const {
        if (days_opt && days_opt->count() > 0) return days / kDaysPerYear;
        return years;
    }
};

void emit(const std::string& text, const std::string& output_path, std::ostream& out) {
    if (output_path.empty()) {
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
        return;
    }
    std::ofstream f(output_path);
    if (!f) throw std::runtime_error("cannot write " + output_path);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

int env_default_workers() {
    const char* env = std::getenv("OUTREND_WORKERS");
    if (env == nullptr) return 0;
    try {
        const int v = std::stoi(env);
        return v > 0 ? v : 0;
    } catch (const std::exception&) {
        return 0;
    }
}

struct AnalyticCmd {
    TrendModelParams params{};
    double m = 1.0;
    double gamma = -1.0, alpha = 2.0;
    double t = 0.0, x = 0.0;
    bool stationary = false;
    DurationFlag tau, l1, l2, l;
    CLI::App* cmd = nullptr;
    CLI::Option *derived = nullptr, *filter_var = nullptr, *misspec = nullptr,
                *well = nullptr, *opt_dur = nullptr, *xma = nullptr,
                *xma_moments = nullptr, *single_ma = nullptr, *phi = nullptr,
                *pdf = nullptr;

    void attach(CLI::App& app) {
        cmd = app.add_subcommand("analytic", "Evaluate one closed-form quantity");
        cmd->add_option("--lambda", params.lambda, "trend mean-reversion speed (1/years)");
        cmd->add_option("--sigma-mu", params.sigma_mu, "trend volatility");
        cmd->add_option("--sigma-s", params.sigma_s, "price volatility");
        cmd->add_option("--m", m, "leverage multiplier");
        cmd->add_option("--gamma", gamma, "fixed allocation weight");
        cmd->add_option("--alpha", alpha, "crossover allocation weight");
        tau.add(cmd, "tau", 1.0, "filter duration");
        l1.add(cmd, "l1", 5.0 / kDaysPerYear, "short window");
        l2.add(cmd, "l2", 1.0, "long window");
        l.add(cmd, "l", 1.0, "single-MA window");
        cmd->add_option("--t", t, "time (years) for --filter-variance");
        cmd->add_flag("--stationary", stationary, "stationary filter variance limit");
        cmd->add_option("--x", x, "argument for --phi/--phi-density");
        derived = cmd->add_flag("--derived", "beta, SNR, tau*, m*");
        filter_var = cmd->add_flag("--filter-variance", "exponential-average variance");
        misspec = cmd->add_flag("--misspecified", "mis-specified strategy rate");
        well = cmd->add_flag("--well-specified", "well-calibrated strategy rate");
        opt_dur = cmd->add_flag("--optimal-duration", "tau_min and tau_opt");
        xma = cmd->add_flag("--crossma", "cross moving-average rate");
        xma_moments = cmd->add_flag("--crossma-moments", "mean/variance/covariance of the gap");
        single_ma = cmd->add_flag("--single-ma", "single moving-average rate");
        phi = cmd->add_flag("--phi", "standard normal CDF at --x");
        pdf = cmd->add_flag("--phi-density", "standard normal density at --x");
    }

    std::string run() const {
        const int selected = static_cast<int>(derived->count() + filter_var->count() +
                                              misspec->count() + well->count() +
                                              opt_dur->count() + xma->count() +
                                              xma_moments->count() + single_ma->count() +
                                              phi->count() + pdf->count());
        if (selected != 1) {
            throw CLI::ValidationError("analytic",
                                       "select exactly one quantity (e.g. --misspecified)");
        }
        if (derived->count() > 0) {
            const DerivedQuantities d = derived_quantities(params);
            nlohmann::ordered_json j{{"beta", d.beta},
                                     {"snr", d.snr},
                                     {"tau_star", d.tau_star},
                                     {"m_star", d.m_star}};
            return j.dump();
        }
        if (filter_var->count() > 0) {
            return fmt(stationary ? filter_variance_stationary(params, tau.value())
                                  : filter_variance(params, tau.value(), t));
        }
        if (misspec->count() > 0) {
            return fmt(misspecified_rate(params, {m, tau.value()}));
        }
        if (well->count() > 0) return fmt(well_specified_rate(params));
        if (opt_dur->count() > 0) {
            const OptimalDuration d = optimal_duration(params, m);
            if (!d.feasible) {
                throw InfeasibleError("no optimal duration: SNR/lambda <= 2m/(2-m)");
            }
            nlohmann::ordered_json j{{"feasible", true},
                                     {"tau_min", d.tau_min},
                                     {"tau_opt", d.tau_opt}};
            return j.dump();
        }
        if (xma->count() > 0) {
            return fmt(crossma_rate(params, {gamma, alpha, l1.value(), l2.value()}));
        }
        if (xma_moments->count() > 0) {
            const CrossMaMoments mo =
                crossma_moments(params, {gamma, alpha, l1.value(), l2.value()});
            nlohmann::ordered_json j{{"mean_gap", mo.mean_gap},
                                     {"asym_var", mo.asym_var},
                                     {"cov_limit", mo.cov_limit}};
            return j.dump();
        }
        if (single_ma->count() > 0) {
            return fmt(single_ma_rate(params, gamma, alpha, l.value()));
        }
        if (phi->count() > 0) return fmt(std_normal_cdf(x));
        return fmt(std_normal_pdf(x));
    }
};

struct SimulateCmd {
    std::string model = "ou-gbm";
    TrendModelParams params{};
    HestonParams heston{};
    double years = 1.0;
    double delta = 1.0 / kDaysPerYear;
    std::uint64_t seed = 0;
    CLI::App* cmd = nullptr;

    void attach(CLI::App& app) {
        cmd = app.add_subcommand("simulate", "Simulate one path and dump it as CSV");
        cmd->add_option("--model", model, "ou-gbm or heston")
            ->check(CLI::IsMember({"ou-gbm", "heston"}));
        cmd->add_option("--lambda", params.lambda, "trend mean-reversion speed");
        cmd->add_option("--sigma-mu", params.sigma_mu, "trend volatility");
        cmd->add_option("--sigma-s", params.sigma_s, "price volatility (ou-gbm)");
        cmd->add_option("--heston-kappa", heston.kappa, "variance mean-reversion speed");
        cmd->add_option("--heston-v-inf", heston.v_inf, "long-run variance");
        cmd->add_option("--heston-eps", heston.eps, "vol of vol");
        cmd->add_option("--heston-rho", heston.rho, "price/variance correlation");
        cmd->add_option("--heston-v0", heston.v0, "initial variance");
        cmd->add_option("--years", years, "horizon in years");
        cmd->add_option("--delta", delta, "step size in years");
        cmd->add_option("--seed", seed, "random seed");
    }

    std::string run(std::ostream& err) const {
        PathGrid grid{delta, static_cast<std::int64_t>(std::llround(years / delta))};
        SimulatedPath path;
        if (model == "heston") {
            if (heston.feller_warning()) {
                err << "warning: 2*kappa*v_inf < eps^2, variance may touch zero\n";
            }
            path = simulate_heston(params.lambda, params.sigma_mu, heston, grid, seed);
        } else {
            path = simulate_ou_gbm(params, grid, seed);
        }
        std::ostringstream os;
        path.write_csv(os);
        return os.str();
    }
};

struct McCmd {
    McExperimentConfig config{};
    std::string model = "ou-gbm";
    std::string strategy = "optimal";
    std::string metric = "cont";
    double years = 100.0;
    double m = 1.0;
    double gamma = -1.0, alpha = 2.0;
    DurationFlag tau, l1, l2;
    CLI::App* cmd = nullptr;
    CLI::Option* workers_opt = nullptr;

    void attach(CLI::App& app) {
        cmd = app.add_subcommand("mc", "Monte Carlo estimate of a strategy's log-return rate");
        cmd->add_option("--model", model, "ou-gbm or heston")
            ->check(CLI::IsMember({"ou-gbm", "heston"}));
        cmd->add_option("--strategy", strategy, "optimal or crossma")
            ->check(CLI::IsMember({"optimal", "crossma"}));
        cmd->add_option("--lambda", config.params.lambda, "trend mean-reversion speed");
        cmd->add_option("--sigma-mu", config.params.sigma_mu, "trend volatility");
        cmd->add_option("--sigma-s", config.params.sigma_s, "price volatility (ou-gbm)");
        cmd->add_option("--heston-kappa", config.heston.kappa, "variance mean-reversion speed");
        cmd->add_option("--heston-v-inf", config.heston.v_inf, "long-run variance");
        cmd->add_option("--heston-eps", config.heston.eps, "vol of vol");
        cmd->add_option("--heston-rho", config.heston.rho, "price/variance correlation");
        cmd->add_option("--heston-v0", config.heston.v0, "initial variance");
        cmd->add_option("--m", m, "leverage multiplier (ou-gbm optimal)");
        tau.add(cmd, "tau", 1.0, "filter duration");
        cmd->add_option("--agent-lambda", config.agent.lambda_a,
                        "agent trend speed (heston optimal)");
        cmd->add_option("--agent-sigma-mu", config.agent.sigma_mu_a,
                        "agent trend volatility (heston optimal)");
        cmd->add_option("--gamma", gamma, "fixed allocation weight");
        cmd->add_option("--alpha", alpha, "crossover allocation weight");
        l1.add(cmd, "l1", 5.0 / kDaysPerYear, "short window");
        l2.add(cmd, "l2", 1.0, "long window");
        cmd->add_option("--paths", config.n_paths, "number of Monte Carlo paths");
        cmd->add_option("--years", years, "horizon in years");
        cmd->add_option("--delta", config.grid.delta, "step size in years");
        cmd->add_option("--seed", config.base_seed, "base seed");
        workers_opt = cmd->add_option("--workers", config.workers, "worker thread count");
        cmd->add_option("--metric", metric, "cont (continuous-limit) or compounded")
            ->check(CLI::IsMember({"cont", "compounded"}));
        cmd->add_flag("--histogram", config.with_histogram, "include a histogram");
        cmd->add_option("--bins", config.histogram_bins, "histogram bin count");
    }

    std::string run() {
        config.model = model == "heston" ? ModelKind::Heston : ModelKind::OuGbm;
        config.strategy = strategy == "crossma" ? StrategyKind::CrossMa
                                                : StrategyKind::MisspecifiedOptimal;
        config.metric = metric == "compounded" ? WealthMetric::Compounded
                                               : WealthMetric::ContinuousLimit;
        config.optimal = {m, tau.value()};
        config.crossma = {gamma, alpha, l1.value(), l2.value()};
        config.grid.n_steps = static_cast<std::int64_t>(std::llround(years / config.grid.delta));
        if (workers_opt->count() == 0) config.workers = env_default_workers();
        return run_mc(config).to_json();
    }
};

struct SweepRatesCmd {
    RateSweepConfig config{};
    std::string grid_spec = "0:1.5:16";
    double years = 100.0;
    double m = 1.0;
    double gamma = -1.0, alpha = 2.0;
    DurationFlag tau, l1, l2;
    CLI::App* cmd = nullptr;
    CLI::Option* workers_opt = nullptr;

    void attach(CLI::App& app) {
        cmd = app.add_subcommand("sweep-rates",
                                 "Closed-form (and optional MC) rates on a sigma_mu grid");
        cmd->add_option("--sigma-mu-grid", grid_spec, "grid: lo:hi:count or v1,v2,...");
        cmd->add_option("--lambda", config.lambda, "trend mean-reversion speed");
        cmd->add_option("--sigma-s", config.sigma_s, "price volatility");
        cmd->add_option("--m", m, "leverage multiplier");
        tau.add(cmd, "tau", 1.0, "filter duration");
        cmd->add_option("--gamma", gamma, "fixed allocation weight");
        cmd->add_option("--alpha", alpha, "crossover allocation weight");
        l1.add(cmd, "l1", 5.0 / kDaysPerYear, "short window");
        l2.add(cmd, "l2", 1.0, "long window");
        cmd->add_flag("--with-mc", config.with_mc, "add Monte Carlo columns");
        cmd->add_option("--paths", config.n_paths, "paths per grid point");
        cmd->add_option("--years", years, "MC horizon in years");
        cmd->add_option("--delta", config.grid.delta, "step size in years");
        cmd->add_option("--seed", config.base_seed, "base seed");
        workers_opt = cmd->add_option("--workers", config.workers, "worker thread count");
    }

    std::string run() {
        config.sigma_mu_grid = parse_grid(grid_spec);
        config.optimal = {m, tau.value()};
        config.crossma = {gamma, alpha, l1.value(), l2.value()};
        config.grid.n_steps = static_cast<std::int64_t>(std::llround(years / config.grid.delta));
        if (workers_opt->count() == 0) config.workers = env_default_workers();
        return rate_sweep_csv(sweep_rates(config));
    }
};

struct SweepDurationsCmd {
    std::string lambda_spec = "0.1:1:10";
    std::string snr_spec = "0.01:1:10";
    double m = 1.0;
    CLI::App* cmd = nullptr;

    void attach(CLI::App& app) {
        cmd = app.add_subcommand("sweep-durations",
                                 "Optimal filter/strategy durations on a (lambda, SNR) grid");
        cmd->add_option("--lambda-grid", lambda_spec, "grid: lo:hi:count or v1,v2,...");
        cmd->add_option("--snr-grid", snr_spec, "grid: lo:hi:count or v1,v2,...");
        cmd->add_option("--m", m, "leverage multiplier in (0,2)");
    }

    std::string run() const {
        DurationSweepConfig config{parse_grid(lambda_spec), parse_grid(snr_spec), m};
        return duration_sweep_csv(sweep_durations(config));
    }
};

struct BacktestCmd {
    std::string input;
    std::string name;
    BacktestProtocol protocol{};
    CLI::App* cmd = nullptr;

    void attach(CLI::App& app) {
        cmd = app.add_subcommand("backtest", "Daily-reallocation backtest on a price CSV");
        cmd->add_option("--input", input, "CSV file with header date,close")->required();
        cmd->add_option("--name", name, "instrument label (default: file stem)");
        cmd->add_option("--tau-days", protocol.tau_days, "filter duration in days");
        cmd->add_option("--m", protocol.m, "leverage multiplier");
        cmd->add_option("--l1-days", protocol.l1_days, "short window in days");
        cmd->add_option("--l2-days", protocol.l2_days, "long window in days");
        cmd->add_option("--gamma", protocol.gamma, "fixed allocation weight");
        cmd->add_option("--alpha", protocol.alpha, "crossover allocation weight");
    }

    std::string run() const {
        PriceSeries series = load_price_csv(input);
        if (!name.empty()) series.name = name;
        return run_backtest(series, protocol).to_json();
    }
};

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trend-following analytics and simulation toolkit"};
    app.require_subcommand(1);
    std::string output_path;
    app.add_option("--output", output_path, "write the result to this file");

    AnalyticCmd analytic;
    SimulateCmd simulate;
    McCmd mc;
    SweepRatesCmd sweep_rates_cmd;
    SweepDurationsCmd sweep_durations_cmd;
    BacktestCmd backtest_cmd;
    analytic.attach(app);
    simulate.attach(app);
    mc.attach(app);
    sweep_rates_cmd.attach(app);
    sweep_durations_cmd.attach(app);
    backtest_cmd.attach(app);
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();  // lets --output appear after the subcommand
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        std::ostringstream os;
        const int code = app.exit(e, os, os);
        (code == 0 ? out : err) << os.str();
        return code == 0 ? kOk : kUsageError;
    }

    try {
        std::string result;
        if (analytic.cmd->parsed()) {
            result = analytic.run();
        } else if (simulate.cmd->parsed()) {
            result = simulate.run(err);
        } else if (mc.cmd->parsed()) {
            result = mc.run();
        } else if (sweep_rates_cmd.cmd->parsed()) {
            result = sweep_rates_cmd.run();
        } else if (sweep_durations_cmd.cmd->parsed()) {
            result = sweep_durations_cmd.run();
        } else {
            result = backtest_cmd.run();
        }
        emit(result, output_path, out);
        return kOk;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const CsvError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace outrend
