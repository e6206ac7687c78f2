#include "hedge/panels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hedge {

void RawPanel::validate(const std::string& what) const {
    if (dates.empty()) throw DataError(what + ": empty panel");
    if (values.rows() != n_rows() || values.cols() != n_cols())
        throw DataError(what + ": value matrix does not match dates/names");
    for (size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i - 1] < dates[i]))
            throw DataError(what + ": dates not strictly ascending at " +
                            format_date(dates[i]));
    if (!values.array().isFinite().all())
        throw DataError(what + ": non-finite value in panel");
}

RawPanel read_panel(const std::string& path) {
    csv::Table t = csv::read_file(path);
    if (t.header.size() < 2 || t.header[0] != "date")
        throw DataError(path + ": header must be 'date,<name>,...'");
    RawPanel p;
    p.names.assign(t.header.begin() + 1, t.header.end());
    p.dates.reserve(t.rows.size());
    p.values.resize(static_cast<int>(t.rows.size()), p.n_cols());
    for (size_t r = 0; r < t.rows.size(); ++r) {
        p.dates.push_back(parse_date(t.rows[r][0]));
        for (int c = 0; c < p.n_cols(); ++c)
            p.values(static_cast<int>(r), c) =
                csv::parse_number(t.rows[r][c + 1], path + " row " + std::to_string(r + 2));
    }
    p.validate(path);
    return p;
}

void write_panel(const std::string& path, const RawPanel& panel) {
    std::ostringstream out;
    out << "date";
    for (const auto& n : panel.names) out << "," << n;
    out << "\n";
    for (int r = 0; r < panel.n_rows(); ++r) {
        out << format_date(panel.dates[r]);
        for (int c = 0; c < panel.n_cols(); ++c) out << "," << csv::format_number(panel.values(r, c));
        out << "\n";
    }
    csv::write_file(path, out.str());
}

AlignedPanels align_calendars(const RawPanel& prices, const RawPanel& context,
                              int ffill_limit) {
    prices.validate("prices");
    context.validate("context");
    if (ffill_limit < 0) throw ConfigError("align_calendars: negative fill limit");

    const Date start = std::max(prices.dates.front(), context.dates.front());
    const Date end = std::min(prices.dates.back(), context.dates.back());
    if (start > end) throw DataError("align_calendars: price and context ranges do not overlap");

    AlignedPanels out;
    out.prices.names = prices.names;
    out.context.names = context.names;

    std::vector<int> keep;
    for (int i = 0; i < prices.n_rows(); ++i)
        if (prices.dates[i] >= start && prices.dates[i] <= end) keep.push_back(i);
    if (keep.empty()) throw DataError("align_calendars: no price dates inside the overlap");

    out.prices.dates.reserve(keep.size());
    out.prices.values.resize(static_cast<int>(keep.size()), prices.n_cols());
    out.context.dates.reserve(keep.size());
    out.context.values.resize(static_cast<int>(keep.size()), context.n_cols());

    int ci = 0;  // index of the next unconsumed context row
    int stale = -1;  // price dates served by the current context row so far
    Eigen::RowVectorXd last = context.values.row(0);
    for (size_t k = 0; k < keep.size(); ++k) {
        const Date d = prices.dates[keep[k]];
        bool fresh = false;
        while (ci < context.n_rows() && context.dates[ci] <= d) {
            last = context.values.row(ci);
            ++ci;
            fresh = true;
        }
        stale = fresh ? 0 : stale + 1;
        if (stale > ffill_limit)
            throw DataError("align_calendars: context gap exceeds fill limit of " +
                            std::to_string(ffill_limit) + " at " + format_date(d));
        out.prices.dates.push_back(d);
        out.prices.values.row(static_cast<int>(k)) = prices.values.row(keep[k]);
        out.context.dates.push_back(d);
        out.context.values.row(static_cast<int>(k)) = last;
    }
    return out;
}

Eigen::MatrixXd compute_returns(const RawPanel& prices) {
    if (prices.n_rows() < 2) throw DataError("compute_returns: need at least two price rows");
    for (int r = 0; r < prices.n_rows(); ++r)
        for (int c = 0; c < prices.n_cols(); ++c)
            if (!(prices.values(r, c) > 0.0))
                throw DataError("non-positive price for '" + prices.names[c] + "' on " +
                                format_date(prices.dates[r]));
    Eigen::MatrixXd ret(prices.n_rows() - 1, prices.n_cols());
    for (int r = 1; r < prices.n_rows(); ++r)
        ret.row(r - 1) =
            prices.values.row(r).array() / prices.values.row(r - 1).array() - 1.0;
    return ret;
}

int MarketData::index_of(Date d) const {
    auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d)
        throw RangeError("date " + format_date(d) + " not in the return calendar");
    return static_cast<int>(it - dates.begin());
}

MarketData build_market_data(const RawPanel& prices, const RawPanel* context,
                             const std::string& risky_column, int ffill_limit) {
    RawPanel px = prices;
    RawPanel ctx;
    if (context) {
        AlignedPanels aligned = align_calendars(prices, *context, ffill_limit);
        px = std::move(aligned.prices);
        ctx = std::move(aligned.context);
    } else {
        px.validate("prices");
    }

    auto it = std::find(px.names.begin(), px.names.end(), risky_column);
    if (it == px.names.end())
        throw DataError("risky column '" + risky_column + "' not found in price panel");
    const int risky = static_cast<int>(it - px.names.begin());
    if (px.n_cols() < 2)
        throw DataError("price panel needs the risky series plus at least one strategy");

    Eigen::MatrixXd ret = compute_returns(px);
    const int n = static_cast<int>(ret.rows());

    MarketData md;
    md.dates.assign(px.dates.begin() + 1, px.dates.end());
    md.risky_name = px.names[risky];
    md.risky_returns = ret.col(risky);
    md.strat_returns.resize(n, px.n_cols() - 1);
    int sc = 0;
    for (int c = 0; c < px.n_cols(); ++c) {
        if (c == risky) continue;
        md.strategy_names.push_back(px.names[c]);
        md.strat_returns.col(sc++) = ret.col(c);
    }
    if (context) {
        md.context_names = ctx.names;
        // Context enters on the same date as the return it accompanies;
        // the first price date has no return and is dropped.
        md.context_raw = ctx.values.bottomRows(n);
    } else {
        md.context_raw.resize(n, 0);
    }
    return md;
}

}  // namespace hedge
