#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hedge/csv.hpp"
#include "hedge/dates.hpp"

namespace hedge {

// A dated panel as read from disk: one row per date, one column per named
// series. Dates strictly ascending.
struct RawPanel {
    std::vector<Date> dates;
    std::vector<std::string> names;
    Eigen::MatrixXd values;  // rows align with dates, cols with names

    int n_rows() const { return static_cast<int>(dates.size()); }
    int n_cols() const { return static_cast<int>(names.size()); }
    void validate(const std::string& what) const;
};

// CSV layout: header "date,<name>,...", one ISO date plus one value per
// column per row.
RawPanel read_panel(const std::string& path);
void write_panel(const std::string& path, const RawPanel& panel);

// Restricts both panels to their overlapping date range with the price
// calendar as master. Context observations are forward-filled onto price
// dates; more than `ffill_limit` consecutive price dates without a fresh
// context observation is a DataError.
struct AlignedPanels {
    RawPanel prices;
    RawPanel context;  // reindexed onto prices.dates
};
AlignedPanels align_calendars(const RawPanel& prices, const RawPanel& context, int ffill_limit);

// Simple returns r_t = p_t / p_{t-1} - 1. Non-positive prices are a
// DataError naming the date and series.
Eigen::MatrixXd compute_returns(const RawPanel& prices);

// Everything downstream works on the return calendar (price dates minus
// the first). One designated risky series, the rest are hedging strategies.
struct MarketData {
    std::vector<Date> dates;  // return dates
    std::string risky_name;
    std::vector<std::string> strategy_names;
    std::vector<std::string> context_names;
    Eigen::VectorXd risky_returns;   // [n]
    Eigen::MatrixXd strat_returns;   // [n x l]
    Eigen::MatrixXd context_raw;     // [n x p], context value on the return date

    int n_days() const { return static_cast<int>(dates.size()); }
    int n_strategies() const { return static_cast<int>(strategy_names.size()); }
    int n_context() const { return static_cast<int>(context_names.size()); }

    int index_of(Date d) const;  // exact match or RangeError
};

// `context` may be null (no context series available). The risky column is
// looked up by name in the price panel; remaining columns become
// strategies in file order.
MarketData build_market_data(const RawPanel& prices, const RawPanel* context,
                             const std::string& risky_column, int ffill_limit);

}  // namespace hedge
