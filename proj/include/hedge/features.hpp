#pragma once

#include "hedge/panels.hpp"

namespace hedge {

struct ObservationSpec {
    std::vector<int> return_lags{0, 1, 2, 3, 4, 20, 60};   // lags into returns/vols
    std::vector<int> context_lags{0, 1, 2, 3, 4, 20, 60};  // independent set for context
    int vol_window = 20;

    int max_return_lag() const { return return_lags.back(); }
    int max_context_lag() const { return context_lags.back(); }
    void validate() const;  // lags start at 0, strictly increasing; window >= 2
};

// One observation: everything the policy sees at a decision date.
struct ObservationBatch {
    Eigen::MatrixXd a1;  // strategy returns   [l x |lags|]
    Eigen::MatrixXd a2;  // strategy vols      [l x |lags|]
    Eigen::MatrixXd c;   // context rows       [(p_raw + 3) x |context lags|]
};

// Rolling population volatility (1/d variance) per column; rows before the
// window fills (t < d-1) are NaN and must never be read.
Eigen::MatrixXd rolling_vol(const Eigen::MatrixXd& returns, int d);

// Builds observations for one walk-forward split. Raw context rows are
// standardized with mean/std taken over the training range only, so test
// observations carry no test-range statistics. The three derived rows
// (max/min strategy return, max strategy vol of the day) are appended
// unstandardized.
class ObservationAssembler {
  public:
    ObservationAssembler(const MarketData& data, const ObservationSpec& spec, int train_begin,
                         int train_end);

    // First index with full lag + volatility history.
    int first_feasible() const { return first_feasible_; }

    ObservationBatch at(int t) const;  // RangeError if t < first_feasible or t >= n_days

    int n_strategies() const { return static_cast<int>(data_->strat_returns.cols()); }
    int n_context_rows() const { return static_cast<int>(data_->context_raw.cols()) + 3; }
    const ObservationSpec& spec() const { return spec_; }

  private:
    const MarketData* data_;
    ObservationSpec spec_;
    int first_feasible_;
    Eigen::MatrixXd vols_;          // [n x l]
    Eigen::MatrixXd context_std_;   // standardized raw context [n x p]
    Eigen::VectorXd max_ret_, min_ret_, max_vol_;  // derived rows per date
};

}  // namespace hedge
