#include "hedge/simulator.hpp"

#include <sstream>

namespace hedge {

void EpisodeConfig::validate() const {
    if (action_lag != 0 && action_lag != 1)
        throw ConfigError("episode: action lag must be 0 or 1");
    if (cost_rate < 0.0) throw ConfigError("episode: cost rate must be >= 0");
    if (!(leverage_cap > 0.0)) throw ConfigError("episode: leverage cap must be positive");
    if (!(initial_value > 0.0)) throw ConfigError("episode: initial value must be positive");
}

Eigen::VectorXd PortfolioPath::value_series() const {
    Eigen::VectorXd s(n_days() + 1);
    s[0] = initial_value;
    s.tail(n_days()) = values;
    return s;
}

std::vector<DatedExposure> exposure_schedule(const std::vector<DatedDecision>& decisions,
                                             const EpisodeConfig& config) {
    config.validate();
    std::vector<DatedExposure> out;
    out.reserve(decisions.size());
    int prev_t = -1;
    bool first = true;
    for (const auto& d : decisions) {
        if (!first && d.t <= prev_t)
            throw ContractError("decisions must be strictly ordered by date; index " +
                                std::to_string(d.t) + " after " + std::to_string(prev_t));
        first = false;
        prev_t = d.t;
        d.decision.validate(config.leverage_cap);
        out.push_back({d.t + 1 + config.action_lag, d.decision.exposures()});
    }
    return out;
}

namespace {

void check_range(const MarketData& data, const PathRange& range) {
    if (range.begin < 0 || range.end >= data.n_days() || range.begin > range.end)
        throw ContractError("episode range [" + std::to_string(range.begin) + ", " +
                            std::to_string(range.end) + "] outside data of " +
                            std::to_string(data.n_days()) + " days");
}

}  // namespace

PortfolioPath run_episode(const std::vector<DatedDecision>& decisions,
                          const MarketData& data, const PathRange& range,
                          const EpisodeConfig& config) {
    check_range(data, range);
    auto schedule = exposure_schedule(decisions, config);
    const int l = data.n_strategies();
    const int n = range.n_days();

    PortfolioPath path;
    path.dates.assign(data.dates.begin() + range.begin, data.dates.begin() + range.end + 1);
    path.initial_value = config.initial_value;
    path.values.resize(n);
    path.returns.resize(n);
    path.turnover.resize(n);
    path.costs.resize(n);
    path.exposures.resize(n, l);

    Eigen::VectorXd exposure = Eigen::VectorXd::Zero(l);
    size_t next = 0;
    // Decisions whose effective date precedes the range set the opening
    // exposure (carry-forward into the range).
    while (next < schedule.size() && schedule[next].t_effective <= range.begin - 1)
        exposure = schedule[next++].exposure;

    double value = config.initial_value;
    for (int s = range.begin; s <= range.end; ++s) {
        const int i = s - range.begin;
        double turnover = 0.0;
        if (next < schedule.size() && schedule[next].t_effective == s) {
            const Eigen::VectorXd& target = schedule[next].exposure;
            turnover = (target - exposure).lpNorm<1>();
            exposure = target;
            ++next;
        }
        if (exposure.lpNorm<1>() > config.leverage_cap + 1e-9)
            throw ContractError("exposure above the leverage cap on " +
                                format_date(data.dates[s]));
        const double r = data.risky_returns[s] + exposure.dot(data.strat_returns.row(s)) -
                         config.cost_rate * turnover;
        value *= 1.0 + r;
        if (value <= 0.0) path.blew_up = true;
        path.returns[i] = r;
        path.values[i] = value;
        path.turnover[i] = turnover;
        path.costs[i] = config.cost_rate * turnover;
        path.exposures.row(i) = exposure;
    }
    return path;
}

TapeEpisode run_episode_on_tape(Tape& t, const std::vector<TapeDecision>& decisions,
                                const MarketData& data, const PathRange& range,
                                const EpisodeConfig& config) {
    check_range(data, range);
    config.validate();
    const int l = data.n_strategies();

    // Effective-dated exposure nodes, mirroring exposure_schedule.
    struct Slot {
        int t_effective;
        NodeId exposure;
    };
    std::vector<Slot> schedule;
    schedule.reserve(decisions.size());
    int prev_t = -1;
    bool first = true;
    for (const auto& d : decisions) {
        if (!first && d.t <= prev_t) throw ContractError("tape decisions must be ordered");
        first = false;
        prev_t = d.t;
        NodeId expo;
        if (d.weights.valid() && d.leverage.valid()) {
            expo = mul(t, d.leverage, d.weights);
        } else {
            if (d.const_exposure.size() != l)
                throw ContractError("const exposure has wrong strategy count");
            expo = leaf(t, d.const_exposure);
        }
        schedule.push_back({d.t + 1 + config.action_lag, expo});
    }

    NodeId zero_exposure = leaf(t, Eigen::VectorXd::Zero(l).eval());
    NodeId one = leaf(t, 1.0);
    NodeId exposure = zero_exposure;
    size_t next = 0;
    while (next < schedule.size() && schedule[next].t_effective <= range.begin - 1)
        exposure = schedule[next++].exposure;

    std::vector<NodeId> daily;
    daily.reserve(range.n_days());
    NodeId value = leaf(t, config.initial_value);
    for (int s = range.begin; s <= range.end; ++s) {
        NodeId traded{-1};
        if (next < schedule.size() && schedule[next].t_effective == s) {
            NodeId target = schedule[next].exposure;
            // Turnover only exists on trade days; skipping the node on hold
            // days keeps it an exact zero, same as the plain simulator.
            traded = reduce_sum(t, abs_op(t, sub(t, target, exposure)));
            exposure = target;
            ++next;
        }
        NodeId overlay = dot(t, exposure, leaf(t, data.strat_returns.row(s).transpose().eval()));
        NodeId r = add(t, leaf(t, data.risky_returns[s]), overlay);
        if (traded.valid() && config.cost_rate > 0.0)
            r = sub(t, r, scale(t, traded, config.cost_rate));
        value = mul(t, value, add(t, one, r));
        daily.push_back(r);
    }
    return {stack(t, daily), value};
}

void write_path_csv(const std::string& path_file, const PortfolioPath& path) {
    std::ostringstream out;
    out << "date,value,return,turnover,cost\n";
    for (int i = 0; i < path.n_days(); ++i)
        out << format_date(path.dates[i]) << "," << csv::format_number(path.values[i]) << ","
            << csv::format_number(path.returns[i]) << ","
            << csv::format_number(path.turnover[i]) << ","
            << csv::format_number(path.costs[i]) << "\n";
    csv::write_file(path_file, out.str());
}

}  // namespace hedge
