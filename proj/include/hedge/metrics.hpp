#pragma once

#include <optional>

#include "hedge/simulator.hpp"
#include "hedge/tape.hpp"

namespace hedge {

// Trading-day annualization convention used everywhere.
inline constexpr double kDaysPerYear = 250.0;

// Volatility below this is treated as degenerate (metric undefined) rather
// than producing near-infinite ratios.
inline constexpr double kVolTolerance = 1e-12;

enum class RewardKind { net_profit, sharpe, sortino };
RewardKind parse_reward_kind(const std::string& tag);
std::string reward_kind_name(RewardKind k);

// value_series is [P_0, ..., P_T] including the initial value.
template <typename Derived>
double net_profit(const Eigen::MatrixBase<Derived>& value_series) {
    if (value_series.size() < 1) throw DomainError("net_profit: empty path");
    return value_series[value_series.size() - 1] / value_series[0] - 1.0;
}

// (mean * 250) / (population std * sqrt(250)); nullopt when volatility is
// degenerate or fewer than two returns exist.
std::optional<double> annualized_sharpe(const Eigen::Ref<const Eigen::VectorXd>& returns);

// Arithmetic annualized return over sqrt(250) * population std of the
// strictly negative returns; nullopt when no negative returns exist or the
// downside std is degenerate.
std::optional<double> sortino(const Eigen::Ref<const Eigen::VectorXd>& returns);

// max over t of (running_max - value) / running_max; in [0, 1) for
// positive paths.
template <typename Derived>
double max_drawdown(const Eigen::MatrixBase<Derived>& value_series) {
    if (value_series.size() < 1) throw DomainError("max_drawdown: empty path");
    double peak = value_series[0], worst = 0.0;
    for (Eigen::Index i = 0; i < value_series.size(); ++i) {
        if (!(value_series[i] > 0.0)) throw DomainError("max_drawdown: non-positive value");
        peak = std::max(peak, double(value_series[i]));
        worst = std::max(worst, (peak - value_series[i]) / peak);
    }
    return worst;
}

// Compounded annualized return, for report tables only (training rewards
// use the arithmetic convention above).
template <typename Derived>
double annualized_return_compound(const Eigen::MatrixBase<Derived>& value_series) {
    if (value_series.size() < 2) throw DomainError("annualized return: path too short");
    const double years = (value_series.size() - 1) / kDaysPerYear;
    return std::pow(value_series[value_series.size() - 1] / value_series[0], 1.0 / years) -
           1.0;
}

// --- differentiable reward construction ---------------------------------

// Scalar reward node over a stacked daily-return node and the final value
// node of a tape episode. Returns nullopt when the requested reward is
// degenerate on this path (caller falls back to net_profit and logs).
std::optional<NodeId> reward_node(Tape& t, RewardKind kind, NodeId returns_vec,
                                  NodeId final_value, double initial_value);

}  // namespace hedge
