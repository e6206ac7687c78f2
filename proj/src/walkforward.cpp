#include "hedge/walkforward.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <thread>

namespace hedge {

void SplitPlanConfig::validate() const {
    if (!anchor_date.empty()) parse_date(anchor_date);
    if (test_span_years < 1) throw ConfigError("split plan: test span must be >= 1 year");
    if (min_train_years < 1)
        throw ConfigError("split plan: minimum train length must be >= 1 year");
}

SplitPlan make_splits(const std::vector<Date>& calendar, const SplitPlanConfig& cfg) {
    cfg.validate();
    if (calendar.size() < 2) throw ConfigError("split plan: calendar too short");

    SplitPlan plan;
    plan.test_span_years = cfg.test_span_years;
    plan.anchor = cfg.anchor_date.empty() ? calendar.front() : parse_date(cfg.anchor_date);

    const int n = static_cast<int>(calendar.size());
    int anchor_idx = 0;
    while (anchor_idx < n && calendar[anchor_idx] < plan.anchor) ++anchor_idx;
    if (anchor_idx >= n) throw ConfigError("split plan: anchor date after calendar end");

    const int anchor_year = year_of(calendar[anchor_idx]);
    if (cfg.first_test_year - anchor_year < cfg.min_train_years)
        throw ConfigError("split plan: only " +
                          std::to_string(cfg.first_test_year - anchor_year) +
                          " training years before " + std::to_string(cfg.first_test_year) +
                          ", need at least " + std::to_string(cfg.min_train_years));
    if (year_of(calendar.back()) < cfg.first_test_year)
        throw ConfigError("split plan: calendar ends before the first test year " +
                          std::to_string(cfg.first_test_year));

    // first_at[y] = first calendar index whose year is >= y.
    auto first_at = [&](int year) {
        int lo = 0, hi = n;
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            if (year_of(calendar[mid]) < year)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    };

    for (int year = cfg.first_test_year;; year += cfg.test_span_years) {
        const int begin = first_at(year);
        if (begin >= n) break;
        const int next = first_at(year + cfg.test_span_years);
        const int end = (next >= n ? n : next) - 1;
        if (begin <= anchor_idx)
            throw ConfigError("split plan: test year " + std::to_string(year) +
                              " leaves no training data after the anchor");
        plan.splits.push_back({{anchor_idx, begin - 1}, {begin, end}});
        if (end == n - 1) break;
    }
    if (plan.splits.empty()) throw ConfigError("split plan: produced no splits");
    return plan;
}

namespace {

PortfolioPath stitch_paths(const std::vector<SplitOutcome>& splits) {
    int total = 0;
    for (const auto& s : splits) total += s.test_path.n_days();
    PortfolioPath out;
    out.initial_value = 1.0;
    out.values.resize(total);
    out.returns.resize(total);
    out.turnover.resize(total);
    out.costs.resize(total);
    out.exposures.resize(total, splits.front().test_path.exposures.cols());
    out.dates.reserve(total);

    int at = 0;
    double value = 1.0;
    for (const auto& s : splits) {
        const PortfolioPath& p = s.test_path;
        for (int t = 0; t < p.n_days(); ++t, ++at) {
            out.dates.push_back(p.dates[t]);
            out.returns[at] = p.returns[t];
            out.turnover[at] = p.turnover[t];
            out.costs[at] = p.costs[t];
            out.exposures.row(at) = p.exposures.row(t);
            value *= 1.0 + p.returns[t];
            out.values[at] = value;
        }
        out.blew_up = out.blew_up || p.blew_up;
    }
    return out;
}

// Runs `body` for each split, tagging any failure with the split it came
// from before letting it abort the whole run: a stitched path with silent
// gaps would be worse than no path.
template <typename F>
void for_each_split(const SplitPlan& plan, F body) {
    for (int k = 0; k < plan.n_splits(); ++k) {
        try {
            body(k, plan.splits[k]);
        } catch (const std::exception& e) {
            std::cerr << "error: split " << k << " failed: " << e.what() << "\n";
            throw;
        }
    }
}

// Parallel variant: a bounded pool of workers pulls split indices from a
// shared counter. Each split writes only its own slot, so outcomes land in
// index order no matter which worker finishes first. The first failing
// split (by index) is reported and rethrown after all workers drain.
template <typename F>
void for_each_split_pool(const SplitPlan& plan, int parallelism, F body) {
    const int n = plan.n_splits();
    const int workers = std::min(parallelism, n);
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(n));

    auto worker = [&] {
        for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) {
            try {
                body(k, plan.splits[k]);
            } catch (...) {
                errors[static_cast<size_t>(k)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (int k = 0; k < n; ++k) {
        if (!errors[static_cast<size_t>(k)]) continue;
        try {
            std::rethrow_exception(errors[static_cast<size_t>(k)]);
        } catch (const std::exception& e) {
            std::cerr << "error: split " << k << " failed: " << e.what() << "\n";
            throw;
        }
    }
}

}  // namespace

StitchedResult run_walkforward_drl(const MarketData& data, const SplitPlan& plan,
                                   const DrlModelConfig& model,
                                   const EpisodeConfig& episode,
                                   std::uint64_t master_seed, const std::string& name,
                                   int parallelism) {
    if (parallelism < 1) throw ConfigError("walk-forward: parallelism must be >= 1");
    StitchedResult result;
    result.model = name;
    result.splits.resize(static_cast<size_t>(plan.n_splits()));
    const auto run_split = [&](int k, const SplitRange& ranges) {
        // Normalization statistics come from this split's train range only.
        ObservationAssembler assembler(data, model.obs, ranges.train.begin,
                                       ranges.train.end);
        NetworkConfig net = model.net;
        net.n_strategies = data.n_strategies();
        net.n_return_lags = static_cast<int>(model.obs.return_lags.size());
        net.n_context_rows = assembler.n_context_rows();
        net.n_context_lags = static_cast<int>(model.obs.context_lags.size());
        net.leverage_cap = episode.leverage_cap;
        net.use_context = model.use_context;

        TrainerConfig trainer = model.trainer;
        trainer.seed = master_seed + static_cast<std::uint64_t>(k);

        TrainEnv env;
        env.data = &data;
        env.assembler = &assembler;
        env.range = ranges.train;
        env.episode = episode;
        env.test_range = trainer.selection == "best_test" ? &ranges.test : nullptr;

        TrainResult trained = train(env, net, trainer);
        PolicyEvaluation eval = evaluate_policy(trained.best_params, net, assembler,
                                                data, ranges.test, episode,
                                                trainer.reward);

        SplitOutcome& out = result.splits[static_cast<size_t>(k)];
        out.index = k;
        out.train = ranges.train;
        out.test = ranges.test;
        out.test_path = std::move(eval.path);
        out.decisions = std::move(eval.decisions);
        out.params = std::move(trained.best_params);
        out.curve = std::move(trained.curve);
        out.train_reward = trained.best_reward;
        out.early_stopped = trained.early_stopped;
    };
    if (parallelism == 1)
        for_each_split(plan, run_split);
    else
        for_each_split_pool(plan, parallelism, run_split);
    result.stitched = stitch_paths(result.splits);
    return result;
}

StitchedResult run_walkforward_baseline(const MarketData& data, const SplitPlan& plan,
                                        BaselineKind kind, const BaselineParams& params,
                                        const EpisodeConfig& episode,
                                        const std::string& rebalance) {
    StitchedResult result;
    result.model = baseline_name(kind);
    for_each_split(plan, [&](int k, const SplitRange& ranges) {
        // The allocation held walking into the test range is decided just
        // early enough to be effective on its first day; later rebalance
        // dates go through the ordinary action lag.
        std::vector<int> calendar{ranges.test.begin - 1 - episode.action_lag};
        if (calendar.front() < 0)
            throw RangeError("baseline: no history before the first test day");
        for (const int t : rebalance_calendar(data, ranges.test, rebalance))
            if (t > ranges.test.begin) calendar.push_back(t);

        SplitOutcome out;
        out.index = k;
        out.train = ranges.train;
        out.test = ranges.test;
        out.decisions = baseline_allocator(kind, data, calendar, params);
        out.test_path = run_episode(out.decisions, data, ranges.test, episode);
        result.splits.push_back(std::move(out));
    });
    result.stitched = stitch_paths(result.splits);
    return result;
}

std::vector<AblationCell> ablation_matrix(const MarketData& data, const SplitPlan& plan,
                                          const DrlModelConfig& base,
                                          const EpisodeConfig& episode,
                                          std::uint64_t master_seed, int parallelism) {
    std::vector<AblationCell> cells;
    for (const int lag : {1, 0})
        for (const RewardKind reward : {RewardKind::net_profit, RewardKind::sortino})
            for (const bool adversarial : {true, false})
                for (const bool use_context : {true, false}) {
                    DrlModelConfig model = base;
                    model.trainer.reward = reward;
                    model.trainer.adversarial = adversarial;
                    model.use_context = use_context;
                    EpisodeConfig ep = episode;
                    ep.action_lag = lag;

                    AblationCell cell;
                    cell.reward = reward;
                    cell.adversarial = adversarial;
                    cell.use_context = use_context;
                    cell.action_lag = lag;
                    const StitchedResult run = run_walkforward_drl(
                        data, plan, model, ep, master_seed,
                        "ablation_lag" + std::to_string(lag), parallelism);
                    cell.net_profit_total = net_profit(run.stitched.value_series());
                    cells.push_back(cell);
                }
    std::stable_sort(cells.begin(), cells.end(),
                     [](const AblationCell& a, const AblationCell& b) {
                         if (a.action_lag != b.action_lag)
                             return a.action_lag > b.action_lag;  // lag-1 group first
                         return a.net_profit_total > b.net_profit_total;
                     });
    return cells;
}

}  // namespace hedge
