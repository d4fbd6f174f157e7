#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace outrend {

/// Input-data failure (malformed CSV, bad dates, non-positive closes).
/// The message names the offending row where applicable.
class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dated close prices for one instrument. Dates are ISO-8601 strings,
/// strictly increasing; closes are positive. Rows are treated as
/// consecutive business days.
struct PriceSeries {
    std::vector<std::string> dates;
    std::vector<double> closes;
    std::string name;

    std::size_t size() const { return closes.size(); }
};

/// Reads `date,close` CSV (header required, UTF-8, ascending ISO dates).
PriceSeries load_price_csv(const std::filesystem::path& path);

/// Serializes a series back to the same CSV format, closes at 17
/// significant digits so a round trip reproduces them exactly.
void write_price_csv(const PriceSeries& series, const std::filesystem::path& path);

/// Annualized Sharpe ratio of daily relative returns: mean/stdev * sqrt(252)
/// with the (n-1)-normalized standard deviation and zero risk-free rate.
/// Empty when the returns have zero dispersion (undefined).
std::optional<double> annualized_sharpe(std::span<const double> daily_returns);

/// Daily backtest protocol. Window lengths are in business days (252 per
/// year); the filter-based strategy uses the full-sample annualized
/// volatility, deliberately including future data.
struct BacktestProtocol {
    std::size_t tau_days = 252;
    double m = 0.1;
    std::size_t l1_days = 5;
    std::size_t l2_days = 252;
    double gamma = -1.0;
    double alpha = 2.0;
};

struct BacktestReport {
    std::string instrument;
    std::size_t n_days = 0;        // price rows consumed
    std::size_t active_start = 0;  // first decision index (long window full)
    double sigma_s_annualized = 0.0;
    std::vector<double> returns_optimal;  // daily strategy relative returns
    std::vector<double> returns_crossma;  // over the common active window
    std::optional<double> sharpe_optimal;
    std::optional<double> sharpe_crossma;
    BacktestProtocol config;

    std::string to_json() const;
};

/// Runs both strategies with daily reallocation and no transaction costs.
/// Both consume the same return series and start at the first index where
/// the long cross-MA window is full.
BacktestReport run_backtest(const PriceSeries& series, const BacktestProtocol& protocol);

}  // namespace outrend
