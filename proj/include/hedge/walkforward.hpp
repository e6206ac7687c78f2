#pragma once

#include "hedge/baselines.hpp"
#include "hedge/features.hpp"
#include "hedge/trainer.hpp"

namespace hedge {

// Anchored walk-forward: every split trains from the same anchor date and
// tests on the period immediately after its train range, so train ranges
// only ever grow and test ranges tile the evaluation window.
struct SplitPlanConfig {
    std::string anchor_date;  // ISO date; empty anchors at the calendar start
    int first_test_year = 2007;
    int test_span_years = 1;
    int min_train_years = 7;

    void validate() const;
};

struct SplitRange {
    PathRange train;
    PathRange test;
};

struct SplitPlan {
    Date anchor;
    int test_span_years = 1;
    std::vector<SplitRange> splits;

    int n_splits() const { return static_cast<int>(splits.size()); }
};

// Splits a return calendar per the plan config. The final test range may
// be shorter than the span when the calendar ends mid-period.
SplitPlan make_splits(const std::vector<Date>& calendar, const SplitPlanConfig& cfg);

// The policy-model hyperparameters that are fixed across splits. The
// data-dependent geometry fields of `net` (strategy count, context rows,
// lag counts, leverage cap) are overwritten from the data at run time.
struct DrlModelConfig {
    ObservationSpec obs;
    NetworkConfig net;
    TrainerConfig trainer;
    bool use_context = true;
};

struct SplitOutcome {
    int index = 0;
    PathRange train;
    PathRange test;
    PortfolioPath test_path;
    std::vector<DatedDecision> decisions;
    // Training diagnostics; baselines leave the curve empty.
    PolicyParams params;
    std::vector<IterationLog> curve;
    double train_reward = std::numeric_limits<double>::quiet_NaN();
    bool early_stopped = false;
};

struct StitchedResult {
    std::string model;
    std::vector<SplitOutcome> splits;
    PortfolioPath stitched;  // test paths compounded in order from 1.0
};

// Per-split training seed is master_seed + split index, so a split's
// result depends neither on which other splits ran nor on how many worker
// threads ran them: any `parallelism` >= 1 produces identical output.
StitchedResult run_walkforward_drl(const MarketData& data, const SplitPlan& plan,
                                   const DrlModelConfig& model,
                                   const EpisodeConfig& episode,
                                   std::uint64_t master_seed, const std::string& name,
                                   int parallelism = 1);

StitchedResult run_walkforward_baseline(const MarketData& data, const SplitPlan& plan,
                                        BaselineKind kind, const BaselineParams& params,
                                        const EpisodeConfig& episode,
                                        const std::string& rebalance = "annual");

// One cell of the design grid: both rewards, adversarial on/off, context
// on/off, action lag 0/1.
struct AblationCell {
    RewardKind reward = RewardKind::net_profit;
    bool adversarial = true;
    bool use_context = true;
    int action_lag = 1;
    double net_profit_total = 0.0;  // stitched out-of-sample net profit
};

// Runs the full 16-model grid and returns rows ordered for reporting: the
// lag-1 group first, each group sorted by performance, best first. Every
// cell uses the same per-split seeds, so cells differ only in their knobs.
std::vector<AblationCell> ablation_matrix(const MarketData& data, const SplitPlan& plan,
                                          const DrlModelConfig& base,
                                          const EpisodeConfig& episode,
                                          std::uint64_t master_seed, int parallelism = 1);

}  // namespace hedge
