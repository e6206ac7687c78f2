#pragma once

#include "hedge/simulator.hpp"

namespace hedge {

enum class BaselineKind { RiskyOnly, Markowitz, FollowWinner, FollowLoser };

BaselineKind parse_baseline(const std::string& name);
std::string baseline_name(BaselineKind kind);

// Inputs to the mean-variance allocator. mu and sigma are annualized; the
// trailing-window estimators below produce them from daily returns.
struct MarkowitzInput {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    double r_min = 0.0;

    int n_assets() const { return static_cast<int>(mu.size()); }
    void validate() const;
};

// Minimizes w' Sigma w over the simplex subject to mu' w >= r_min, w >= 0.
// Exact: enumerates candidate supports and solves the equality-constrained
// KKT system on each, keeping the feasible candidate with the smallest
// objective. Practical for the small strategy counts this engine targets
// (hard cap at 16 assets). Throws DomainError when r_min > max(mu), i.e.
// no simplex point can reach the return floor.
Eigen::VectorXd markowitz_weights(const MarkowitzInput& input);

// Annualized trailing estimates from daily strategy returns over rows
// [t-window+1, t]. r_min = NaN selects the default floor: the annualized
// trailing return of the equal-weight portfolio (always feasible).
MarkowitzInput estimate_markowitz_input(const Eigen::MatrixXd& strat_returns, int t,
                                        int window, double r_min);

// Trailing performance per strategy: sum of daily returns over rows
// [t-window+1, t]. A sum (rather than a compounded product) keeps the
// winner/loser pair exactly dual under return negation.
Eigen::VectorXd trailing_performance(const Eigen::MatrixXd& strat_returns, int t,
                                     int window);

// One-hot weights on the best / worst trailing performer; ties go to the
// lowest strategy index.
Eigen::VectorXd follow_winner(const Eigen::MatrixXd& strat_returns, int t, int window);
Eigen::VectorXd follow_loser(const Eigen::MatrixXd& strat_returns, int t, int window);

struct BaselineParams {
    int lookback = 250;  // trailing trading days for all estimates
    // Return floor for Markowitz; NaN selects the equal-weight default.
    double r_min = std::numeric_limits<double>::quiet_NaN();
    double leverage = 1.0;  // baselines do not size the overlay
};

// Return-calendar indices of the first trading day of each year (or month,
// frequency = "monthly") within the inclusive range.
std::vector<int> rebalance_calendar(const MarketData& data, const PathRange& range,
                                    const std::string& frequency);

// One decision per calendar index, each computed from data up to and
// including that index. The risky-only baseline carries zero leverage, so
// its overlay exposure vanishes and the path reduces to the risky asset.
std::vector<DatedDecision> baseline_allocator(BaselineKind kind, const MarketData& data,
                                              const std::vector<int>& calendar,
                                              const BaselineParams& params);

}  // namespace hedge
