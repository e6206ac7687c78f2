#include "hedge/metrics.hpp"

#include <cmath>

namespace hedge {

RewardKind parse_reward_kind(const std::string& tag) {
    if (tag == "net_profit") return RewardKind::net_profit;
    if (tag == "sharpe") return RewardKind::sharpe;
    if (tag == "sortino") return RewardKind::sortino;
    throw ConfigError("unknown reward '" + tag + "' (net_profit|sharpe|sortino)");
}

std::string reward_kind_name(RewardKind k) {
    switch (k) {
        case RewardKind::net_profit: return "net_profit";
        case RewardKind::sharpe: return "sharpe";
        case RewardKind::sortino: return "sortino";
    }
    throw ContractError("bad reward kind");
}

namespace {

double population_std(const Eigen::Ref<const Eigen::VectorXd>& x) {
    const double mu = x.mean();
    return std::sqrt((x.array() - mu).square().sum() / x.size());
}

std::vector<int> negative_indices(const Eigen::Ref<const Eigen::VectorXd>& returns) {
    std::vector<int> idx;
    for (int i = 0; i < returns.size(); ++i)
        if (returns[i] < 0.0) idx.push_back(i);
    return idx;
}

}  // namespace

std::optional<double> annualized_sharpe(const Eigen::Ref<const Eigen::VectorXd>& returns) {
    if (returns.size() < 2) return std::nullopt;
    const double sd = population_std(returns);
    if (sd <= kVolTolerance) return std::nullopt;
    return returns.mean() * kDaysPerYear / (sd * std::sqrt(kDaysPerYear));
}

std::optional<double> sortino(const Eigen::Ref<const Eigen::VectorXd>& returns) {
    if (returns.size() < 1) return std::nullopt;
    const auto idx = negative_indices(returns);
    if (idx.empty()) return std::nullopt;
    Eigen::VectorXd neg(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) neg[i] = returns[idx[i]];
    const double dsd = population_std(neg);
    if (dsd <= kVolTolerance) return std::nullopt;
    return returns.mean() * kDaysPerYear / (dsd * std::sqrt(kDaysPerYear));
}

std::optional<NodeId> reward_node(Tape& t, RewardKind kind, NodeId returns_vec,
                                  NodeId final_value, double initial_value) {
    if (!(initial_value > 0.0)) throw ContractError("reward_node: non-positive initial value");
    const Eigen::VectorXd realized = t.value(returns_vec).to_vector();
    switch (kind) {
        case RewardKind::net_profit:
            // final / initial - 1 with the initial value a constant
            return sub(t, scale(t, final_value, 1.0 / initial_value), leaf(t, 1.0));
        case RewardKind::sharpe: {
            if (realized.size() < 2) return std::nullopt;
            if (population_std(realized) <= kVolTolerance) return std::nullopt;
            NodeId num = scale(t, reduce_mean(t, returns_vec), kDaysPerYear);
            NodeId den = scale(t, reduce_std(t, returns_vec), std::sqrt(kDaysPerYear));
            return div(t, num, den);
        }
        case RewardKind::sortino: {
            const auto idx = negative_indices(realized);
            if (idx.empty()) return std::nullopt;
            Eigen::VectorXd neg(idx.size());
            for (size_t i = 0; i < idx.size(); ++i) neg[i] = realized[idx[i]];
            if (population_std(neg) <= kVolTolerance) return std::nullopt;
            NodeId downside = gather(t, returns_vec, idx);
            NodeId num = scale(t, reduce_mean(t, returns_vec), kDaysPerYear);
            NodeId den = scale(t, reduce_std(t, downside), std::sqrt(kDaysPerYear));
            return div(t, num, den);
        }
    }
    throw ContractError("bad reward kind");
}

}  // namespace hedge
