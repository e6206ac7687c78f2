#include "hedge/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "hedge/metrics.hpp"

namespace hedge {

namespace {

// Trailing slice of a stitched path: the last min(window_years * 250, all)
// returns, re-compounded into a value series starting at 1.
struct WindowView {
    Eigen::VectorXd returns;
    Eigen::VectorXd values;  // [1, ...], returns.size() + 1 entries
};

WindowView trailing_window(const PortfolioPath& path, int window_years) {
    const int n = path.n_days();
    const int take = std::min(n, static_cast<int>(window_years * kDaysPerYear));
    if (take < 2) throw DomainError("comparison window: path too short");
    WindowView w;
    w.returns = path.returns.tail(take);
    w.values.resize(take + 1);
    w.values[0] = 1.0;
    for (int i = 0; i < take; ++i) w.values[i + 1] = w.values[i] * (1.0 + w.returns[i]);
    return w;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? csv::format_number(*v) : std::string();
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string opt_fixed3(const std::optional<double>& v) {
    return v ? fixed3(*v) : std::string("-");
}

void pad_to(std::string& s, size_t width) {
    while (s.size() < width) s += ' ';
}

}  // namespace

std::vector<ComparisonRow> comparison_rows(const std::vector<StitchedResult>& results,
                                           const std::vector<int>& windows) {
    std::vector<ComparisonRow> rows;
    for (const auto& r : results) {
        for (int w : windows) {
            if (w < 1) throw DomainError("comparison window: years must be >= 1");
            const WindowView view = trailing_window(r.stitched, w);
            ComparisonRow row;
            row.model = r.model;
            row.window_years = w;
            row.return_ann = annualized_return_compound(view.values);
            row.sortino_ratio = sortino(view.returns);
            row.sharpe_ratio = annualized_sharpe(view.returns);
            row.max_dd = max_drawdown(view.values);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "model,window_years,return,sortino,sharpe,max_dd\n";
    for (const auto& r : rows) {
        out += r.model + "," + std::to_string(r.window_years) + "," +
               csv::format_number(r.return_ann) + "," + opt_field(r.sortino_ratio) + "," +
               opt_field(r.sharpe_ratio) + "," + csv::format_number(r.max_dd) + "\n";
    }
    return out;
}

std::string comparison_text(const std::vector<ComparisonRow>& rows) {
    const std::vector<std::string> headers = {"model",   "window", "return",
                                              "Sortino", "Sharpe", "max DD"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows)
        cells.push_back({r.model, std::to_string(r.window_years) + "y",
                         fixed3(r.return_ann), opt_fixed3(r.sortino_ratio),
                         opt_fixed3(r.sharpe_ratio), fixed3(r.max_dd)});

    std::vector<size_t> widths;
    for (size_t c = 0; c < headers.size(); ++c) {
        size_t w = headers[c].size();
        for (const auto& row : cells) w = std::max(w, row[c].size());
        widths.push_back(w);
    }
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (size_t c = 0; c < row.size(); ++c) {
            std::string cell = row[c];
            pad_to(cell, widths[c]);
            line += cell;
            if (c + 1 < row.size()) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    };
    emit(headers);
    std::string rule;
    for (size_t c = 0; c < widths.size(); ++c)
        rule += std::string(widths[c], '-') + (c + 1 < widths.size() ? "  " : "");
    out += rule + "\n";
    for (const auto& row : cells) emit(row);
    return out;
}

std::string weights_csv(const MarketData& data, const std::vector<StitchedResult>& results) {
    std::string out = "date,model,strategy,weight\n";
    for (const auto& r : results) {
        for (const auto& split : r.splits) {
            for (const auto& d : split.decisions) {
                if (d.t < 0 || d.t >= data.n_days())
                    throw RangeError("weights report: decision day off the calendar");
                const std::string date = format_date(data.dates[d.t]);
                for (int s = 0; s < data.n_strategies(); ++s)
                    out += date + "," + r.model + "," + data.strategy_names[s] + "," +
                           csv::format_number(d.decision.weights[s]) + "\n";
            }
        }
    }
    return out;
}

std::string value_chart(const std::vector<StitchedResult>& results) {
    if (results.empty()) throw ShapeError("value chart: no results");
    const auto& dates = results[0].stitched.dates;
    std::vector<std::string> labels;
    labels.reserve(dates.size());
    for (Date d : dates) labels.push_back(format_date(d));

    std::vector<svg::Series> series;
    for (const auto& r : results) {
        if (r.stitched.dates != dates)
            throw ShapeError("value chart: model '" + r.model +
                             "' covers a different date range");
        svg::Series s;
        s.label = r.model;
        s.y.assign(r.stitched.values.data(),
                   r.stitched.values.data() + r.stitched.values.size());
        series.push_back(std::move(s));
    }
    return svg::line_chart("Out-of-sample portfolio value", labels, series);
}

std::string weights_chart(const MarketData& data, const StitchedResult& result) {
    // year -> (sum of weights, count)
    std::map<int, std::pair<Eigen::VectorXd, int>> by_year;
    for (const auto& split : result.splits) {
        for (const auto& d : split.decisions) {
            if (d.t < 0 || d.t >= data.n_days())
                throw RangeError("weights chart: decision day off the calendar");
            const int y = year_of(data.dates[d.t]);
            auto it = by_year.find(y);
            if (it == by_year.end())
                by_year.emplace(y, std::make_pair(d.decision.weights, 1));
            else {
                it->second.first += d.decision.weights;
                it->second.second += 1;
            }
        }
    }
    if (by_year.empty()) throw ShapeError("weights chart: no decisions");

    std::vector<std::string> groups;
    std::vector<svg::Series> segments(data.n_strategies());
    for (int s = 0; s < data.n_strategies(); ++s)
        segments[s].label = data.strategy_names[s];
    for (const auto& [year, acc] : by_year) {
        groups.push_back(std::to_string(year));
        for (int s = 0; s < data.n_strategies(); ++s)
            segments[s].y.push_back(acc.first[s] / acc.second);
    }
    return svg::stacked_bars("Mean decision weights by year (" + result.model + ")",
                             groups, segments);
}

std::string ablation_csv(const std::vector<AblationCell>& cells) {
    std::string out = "reward,adversarial,context,action_lag,net_profit\n";
    for (const auto& c : cells)
        out += reward_kind_name(c.reward) + "," + (c.adversarial ? "yes" : "no") + "," +
               (c.use_context ? "yes" : "no") + "," + std::to_string(c.action_lag) + "," +
               csv::format_number(c.net_profit_total) + "\n";
    return out;
}

}  // namespace hedge
