#include "outrend/backtest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "outrend/strategies.hpp"

namespace outrend {

namespace {

std::string row_msg(const std::string& what, std::size_t row) {
    return what + " at row " + std::to_string(row);
}

// ISO-8601 calendar date, used only for ordering/duplicate checks.
struct Date {
    int y, m, d;
    auto operator<=>(const Date&) const = default;
};

Date parse_date(const std::string& s, std::size_t row) {
    Date date{};
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw CsvError(row_msg("malformed date '" + s + "'", row));
    }
    auto num = [&](std::size_t pos, std::size_t len, int& out) {
        auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
        if (ec != std::errc{} || p != s.data() + pos + len) {
            throw CsvError(row_msg("malformed date '" + s + "'", row));
        }
    };
    num(0, 4, date.y);
    num(5, 2, date.m);
    num(8, 2, date.d);
    if (date.m < 1 || date.m > 12 || date.d < 1 || date.d > 31) {
        throw CsvError(row_msg("invalid calendar date '" + s + "'", row));
    }
    return date;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.pop_back();
    }
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

double sample_stdev(std::span<const double> v, double mean) {
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / (static_cast<double>(v.size()) - 1.0));
}

}  // namespace

PriceSeries load_price_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());

    PriceSeries series;
    series.name = path.stem().string();

    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty file " + path.string());
    if (trim(line) != "date,close") {
        throw CsvError("malformed header '" + trim(line) + "' (expected 'date,close')");
    }

    Date prev{};
    bool have_prev = false;
    std::size_t row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw CsvError(row_msg("missing comma", row));
        }
        const std::string date_str = line.substr(0, comma);
        const std::string close_str = line.substr(comma + 1);
        const Date date = parse_date(date_str, row);
        if (have_prev) {
            if (date == prev) throw CsvError(row_msg("duplicate date '" + date_str + "'", row));
            if (date < prev) throw CsvError(row_msg("unsorted date '" + date_str + "'", row));
        }
        double close = 0.0;
        const auto [p, ec] =
            std::from_chars(close_str.data(), close_str.data() + close_str.size(), close);
        if (ec != std::errc{} || p != close_str.data() + close_str.size()) {
            throw CsvError(row_msg("non-numeric close '" + close_str + "'", row));
        }
        if (!(close > 0.0) || !std::isfinite(close)) {
            throw CsvError(row_msg("non-positive close", row));
        }
        series.dates.push_back(date_str);
        series.closes.push_back(close);
        prev = date;
        have_prev = true;
    }
    return series;
}

void write_price_csv(const PriceSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path.string());
    out << "date,close\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", series.closes[i]);
        out << series.dates[i] << ',' << buf << '\n';
    }
}

std::optional<double> annualized_sharpe(std::span<const double> daily_returns) {
    if (daily_returns.size() < 2) {
        throw std::invalid_argument("need at least two returns for a Sharpe ratio");
    }
    const auto [lo, hi] = std::minmax_element(daily_returns.begin(), daily_returns.end());
    if (*lo == *hi) return std::nullopt;  // zero dispersion, ratio undefined
    double mean = 0.0;
    for (double r : daily_returns) mean += r;
    mean /= static_cast<double>(daily_returns.size());
    const double sd = sample_stdev(daily_returns, mean);
    if (sd == 0.0) return std::nullopt;
    return mean / sd * std::sqrt(252.0);
}

BacktestReport run_backtest(const PriceSeries& series, const BacktestProtocol& protocol) {
    if (protocol.l1_days < 1 || protocol.l1_days >= protocol.l2_days) {
        throw std::invalid_argument("cross-MA windows must satisfy 1 <= l1 < l2");
    }
    if (protocol.tau_days < 2) {
        throw std::invalid_argument("filter duration must be at least two days");
    }
    const std::size_t n = series.size();
    if (n < protocol.l2_days + 2) {
        throw std::invalid_argument("price series too short for the long window");
    }

    const double delta = 1.0 / 252.0;
    const std::size_t n_steps = n - 1;
    std::vector<double> rel(n_steps);  // daily relative returns of the asset
    for (std::size_t k = 0; k < n_steps; ++k) {
        rel[k] = (series.closes[k + 1] - series.closes[k]) / series.closes[k];
    }

    // Full-sample annualized volatility, used from the first day on.
    double mean_ret = 0.0;
    for (double r : rel) mean_ret += r;
    mean_ret /= static_cast<double>(n_steps);
    const double sigma_s = sample_stdev(rel, mean_ret) * std::sqrt(252.0);
    if (sigma_s == 0.0) {
        throw std::invalid_argument("price series has zero volatility");
    }

    // Filter on per-step returns y = rel/delta; trend estimate after day k.
    std::vector<double> per_step(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) per_step[k] = rel[k] / delta;
    const double tau = static_cast<double>(protocol.tau_days) * delta;
    const std::vector<double> est = ema_run(per_step, tau, delta);

    const std::vector<double> g_short = geometric_ma(series.closes, protocol.l1_days);
    const std::vector<double> g_long = geometric_ma(series.closes, protocol.l2_days);

    BacktestReport report;
    report.instrument = series.name;
    report.n_days = n;
    report.config = protocol;
    report.sigma_s_annualized = sigma_s;

    const std::size_t start = protocol.l2_days - 1;  // both windows full here
    report.active_start = start;
    const std::size_t n_active = n_steps - start;
    report.returns_optimal.resize(n_active);
    report.returns_crossma.resize(n_active);
    const double alloc_scale = protocol.m / (sigma_s * sigma_s);
    for (std::size_t i = 0; i < n_active; ++i) {
        const std::size_t k = start + i;
        const double omega = k == 0 ? 0.0 : alloc_scale * est[k - 1];
        const bool above =
            g_short[k - protocol.l1_days + 1] > g_long[k - protocol.l2_days + 1];
        const double theta = protocol.gamma + (above ? protocol.alpha : 0.0);
        report.returns_optimal[i] = omega * rel[k];
        report.returns_crossma[i] = theta * rel[k];
    }
    report.sharpe_optimal = annualized_sharpe(report.returns_optimal);
    report.sharpe_crossma = annualized_sharpe(report.returns_crossma);
    return report;
}

std::string BacktestReport::to_json() const {
    nlohmann::ordered_json j;
    j["instrument"] = instrument;
    if (sharpe_optimal) {
        j["sharpe_optimal"] = *sharpe_optimal;
    } else {
        j["sharpe_optimal"] = nullptr;
    }
    if (sharpe_crossma) {
        j["sharpe_crossma"] = *sharpe_crossma;
    } else {
        j["sharpe_crossma"] = nullptr;
    }
    j["n_days"] = n_days;
    j["config"] = {{"tau_days", config.tau_days},
                   {"m", config.m},
                   {"l1_days", config.l1_days},
                   {"l2_days", config.l2_days},
                   {"gamma", config.gamma},
                   {"alpha", config.alpha},
                   {"sigma_s_annualized", sigma_s_annualized},
                   {"active_start", active_start}};
    return j.dump();
}

}  // namespace outrend
