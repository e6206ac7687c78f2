#pragma once

#include "hedge/svg.hpp"
#include "hedge/walkforward.hpp"

namespace hedge {

// One row of the model-comparison table: metrics of a stitched
// out-of-sample path over its trailing `window_years` (clamped to the
// available history, so short runs still produce a row).
struct ComparisonRow {
    std::string model;
    int window_years = 0;
    double return_ann = 0.0;  // compounded annualized return
    std::optional<double> sortino_ratio;
    std::optional<double> sharpe_ratio;
    double max_dd = 0.0;
};

std::vector<ComparisonRow> comparison_rows(const std::vector<StitchedResult>& results,
                                           const std::vector<int>& windows = {3, 5});

// Columns: model,window_years,return,sortino,sharpe,max_dd. Undefined
// ratios serialize as empty fields.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

// Fixed-width text table of the same rows for terminal output.
std::string comparison_text(const std::vector<ComparisonRow>& rows);

// Long-format decision log: date,model,strategy,weight with one row per
// strategy per decision, dated by the day the decision was computed on.
std::string weights_csv(const MarketData& data, const std::vector<StitchedResult>& results);

// Stitched portfolio values, one line per model, shared date axis.
std::string value_chart(const std::vector<StitchedResult>& results);

// Mean decision weight per calendar year for one model, stacked by
// strategy (bars reach 1 since weights do).
std::string weights_chart(const MarketData& data, const StitchedResult& result);

// Columns: reward,adversarial,context,action_lag,net_profit.
std::string ablation_csv(const std::vector<AblationCell>& cells);

}  // namespace hedge
