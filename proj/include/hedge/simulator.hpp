#pragma once

#include "hedge/panels.hpp"
#include "hedge/policy.hpp"

namespace hedge {

struct EpisodeConfig {
    int action_lag = 1;            // 0 or 1 days
    double cost_rate = 0.0005;     // per unit turnover
    double leverage_cap = 3.0;
    double initial_value = 1.0;

    void validate() const;
};

// Inclusive index range on the return calendar.
struct PathRange {
    int begin = 0;
    int end = 0;
    int n_days() const { return end - begin + 1; }
};

struct DatedDecision {
    int t = 0;  // return-calendar index the decision was computed on
    AllocationDecision decision;
};

struct PortfolioPath {
    std::vector<Date> dates;      // one entry per day in the range
    double initial_value = 1.0;
    Eigen::VectorXd values;       // P_t after each day
    Eigen::VectorXd returns;      // daily portfolio returns
    Eigen::VectorXd turnover;     // L1 exposure change per day
    Eigen::VectorXd costs;        // cost drag per day (rate * turnover)
    Eigen::MatrixXd exposures;    // applied exposure per day [days x l]
    bool blew_up = false;         // some P_t <= 0

    int n_days() const { return static_cast<int>(returns.size()); }
    // [initial, P_1, ..., P_T]; the natural input for drawdown/net profit.
    Eigen::VectorXd value_series() const;
};

// A decision computed on day t takes effect on the day t+1+lag return:
// observation day t, execution next day, plus the optional extra lag day.
struct DatedExposure {
    int t_effective = 0;
    Eigen::VectorXd exposure;  // leverage * weights
};
std::vector<DatedExposure> exposure_schedule(const std::vector<DatedDecision>& decisions,
                                             const EpisodeConfig& config);

// Replays decisions over [range.begin, range.end]. Exposures carry forward
// between decisions and are zero before the first effective date. Daily
// return = risky + sum_i exposure_i * strategy_return_i - cost * turnover.
PortfolioPath run_episode(const std::vector<DatedDecision>& decisions,
                          const MarketData& data, const PathRange& range,
                          const EpisodeConfig& config);

// Differentiable twin of run_episode for training: decisions arrive as tape
// nodes (policy actions) or as constants (random exploration actions), and
// the realized daily returns/final value come back as nodes.
struct TapeDecision {
    int t = 0;
    NodeId weights{-1};  // valid() => differentiable policy action
    NodeId leverage{-1};
    Eigen::VectorXd const_exposure;  // used when node ids are invalid
};
struct TapeEpisode {
    NodeId returns_vec;  // [n_days] stacked daily portfolio returns
    NodeId final_value;  // scalar P_T
};
TapeEpisode run_episode_on_tape(Tape& t, const std::vector<TapeDecision>& decisions,
                                const MarketData& data, const PathRange& range,
                                const EpisodeConfig& config);

void write_path_csv(const std::string& path_file, const PortfolioPath& path);

}  // namespace hedge
