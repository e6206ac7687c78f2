#include "hedge/baselines.hpp"

#include <Eigen/Dense>
#include <iostream>

namespace hedge {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr int kMaxMarkowitzAssets = 16;
constexpr int kTradingDaysPerYear = 250;

}  // namespace

BaselineKind parse_baseline(const std::string& name) {
    if (name == "risky_only") return BaselineKind::RiskyOnly;
    if (name == "markowitz") return BaselineKind::Markowitz;
    if (name == "follow_winner") return BaselineKind::FollowWinner;
    if (name == "follow_loser") return BaselineKind::FollowLoser;
    throw ConfigError("unknown baseline '" + name +
                      "' (expected risky_only, markowitz, follow_winner, follow_loser)");
}

std::string baseline_name(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::RiskyOnly: return "risky_only";
        case BaselineKind::Markowitz: return "markowitz";
        case BaselineKind::FollowWinner: return "follow_winner";
        case BaselineKind::FollowLoser: return "follow_loser";
    }
    throw ContractError("unreachable baseline kind");
}

void MarkowitzInput::validate() const {
    const int l = n_assets();
    if (l < 1) throw ShapeError("markowitz: need at least one asset");
    if (sigma.rows() != l || sigma.cols() != l)
        throw ShapeError("markowitz: sigma must be " + std::to_string(l) + "x" +
                         std::to_string(l));
    if (!mu.allFinite() || !sigma.allFinite() || !std::isfinite(r_min))
        throw NumericError("markowitz: non-finite input");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw DomainError("markowitz: sigma is not symmetric");
}

namespace {

// Solves the equality-constrained subproblem: minimize w'Sw over the
// support S with 1'w = 1 and optionally mu'w = r_min, via the KKT linear
// system. Returns false when the system is singular or the solution is
// outside the feasible region.
bool solve_support(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu,
                   double r_min, const std::vector<int>& support, bool bind_return,
                   Eigen::VectorXd& out) {
    const int k = static_cast<int>(support.size());
    const int m = k + 1 + (bind_return ? 1 : 0);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) kkt(a, b) = 2.0 * sigma(support[a], support[b]);
        kkt(a, k) = 1.0;
        kkt(k, a) = 1.0;
        if (bind_return) {
            kkt(a, k + 1) = mu[support[a]];
            kkt(k + 1, a) = mu[support[a]];
        }
    }
    rhs[k] = 1.0;
    if (bind_return) rhs[k + 1] = r_min;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) return false;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(mu.size());
    for (int a = 0; a < k; ++a) {
        if (sol[a] < -kFeasTol) return false;
        w[support[a]] = std::max(0.0, sol[a]);
    }
    w /= w.sum();  // wash out the clamp; sum was 1 to solver precision
    if (mu.dot(w) < r_min - kFeasTol) return false;
    out = w;
    return true;
}

}  // namespace

Eigen::VectorXd markowitz_weights(const MarkowitzInput& input) {
    input.validate();
    const int l = input.n_assets();
    if (l > kMaxMarkowitzAssets)
        throw ConfigError("markowitz: support enumeration handles at most " +
                          std::to_string(kMaxMarkowitzAssets) + " strategies, got " +
                          std::to_string(l));
    if (input.r_min > input.mu.maxCoeff())
        throw DomainError("markowitz: return floor " + std::to_string(input.r_min) +
                          " exceeds best expected return " +
                          std::to_string(input.mu.maxCoeff()));

    // Repair tiny estimation-roundoff indefiniteness with diagonal loading.
    Eigen::MatrixXd sigma = 0.5 * (input.sigma + input.sigma.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
        sigma.diagonal().array() += 1e-8 * sigma.trace() / l;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> again(sigma);
        if (again.eigenvalues().minCoeff() < -1e-10)
            throw DomainError("markowitz: covariance is not positive semidefinite");
    }

    Eigen::VectorXd best;
    double best_obj = std::numeric_limits<double>::infinity();
    // Every KKT point lives on some support with the return constraint
    // either slack or binding; scanning all pairs and keeping the feasible
    // minimum finds the global optimum of this convex program.
    for (unsigned mask = 1; mask < (1u << l); ++mask) {
        std::vector<int> support;
        for (int i = 0; i < l; ++i)
            if (mask & (1u << i)) support.push_back(i);
        for (const bool bind : {false, true}) {
            Eigen::VectorXd w;
            if (!solve_support(sigma, input.mu, input.r_min, support, bind, w)) continue;
            const double obj = w.dot(sigma * w);
            if (obj < best_obj) {
                best_obj = obj;
                best = w;
            }
        }
    }
    if (best.size() == 0)
        throw NumericError("markowitz: no feasible KKT candidate found");
    return best;
}

namespace {

void check_window(const Eigen::MatrixXd& strat_returns, int t, int window) {
    if (window < 1) throw ConfigError("trailing window must be >= 1");
    if (t >= strat_returns.rows())
        throw RangeError("trailing window: index " + std::to_string(t) +
                         " outside data with " + std::to_string(strat_returns.rows()) +
                         " rows");
    if (t - window + 1 < 0)
        throw RangeError("trailing window of " + std::to_string(window) +
                         " days needs history before index " + std::to_string(t));
}

}  // namespace

MarkowitzInput estimate_markowitz_input(const Eigen::MatrixXd& strat_returns, int t,
                                        int window, double r_min) {
    check_window(strat_returns, t, window);
    const auto block = strat_returns.middleRows(t - window + 1, window);
    MarkowitzInput in;
    in.mu = kTradingDaysPerYear * block.colwise().mean();
    const Eigen::MatrixXd centered = block.rowwise() - block.colwise().mean();
    in.sigma = kTradingDaysPerYear * (centered.transpose() * centered) / window;
    in.r_min = std::isnan(r_min) ? in.mu.mean() : r_min;
    return in;
}

Eigen::VectorXd trailing_performance(const Eigen::MatrixXd& strat_returns, int t,
                                     int window) {
    check_window(strat_returns, t, window);
    return strat_returns.middleRows(t - window + 1, window).colwise().sum();
}

namespace {

Eigen::VectorXd one_hot(int l, int index) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(l);
    w[index] = 1.0;
    return w;
}

int argmax_lowest(const Eigen::VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace

Eigen::VectorXd follow_winner(const Eigen::MatrixXd& strat_returns, int t, int window) {
    const Eigen::VectorXd perf = trailing_performance(strat_returns, t, window);
    return one_hot(static_cast<int>(perf.size()), argmax_lowest(perf));
}

Eigen::VectorXd follow_loser(const Eigen::MatrixXd& strat_returns, int t, int window) {
    const Eigen::VectorXd perf = trailing_performance(strat_returns, t, window);
    return one_hot(static_cast<int>(perf.size()), argmax_lowest(-perf));
}

std::vector<int> rebalance_calendar(const MarketData& data, const PathRange& range,
                                    const std::string& frequency) {
    if (frequency != "annual" && frequency != "monthly")
        throw ConfigError("rebalance frequency must be 'annual' or 'monthly', got '" +
                          frequency + "'");
    if (range.begin < 0 || range.end >= data.n_days() || range.begin > range.end)
        throw RangeError("rebalance calendar: range outside data");
    std::vector<int> out;
    int last_year = -1, last_month = -1;
    for (int t = range.begin; t <= range.end; ++t) {
        const auto ymd = std::chrono::year_month_day(data.dates[t]);
        const int y = static_cast<int>(ymd.year());
        const int m = static_cast<int>(static_cast<unsigned>(ymd.month()));
        const bool fresh = frequency == "annual" ? y != last_year
                                                 : (y != last_year || m != last_month);
        if (fresh) out.push_back(t);
        last_year = y;
        last_month = m;
    }
    return out;
}

std::vector<DatedDecision> baseline_allocator(BaselineKind kind, const MarketData& data,
                                              const std::vector<int>& calendar,
                                              const BaselineParams& params) {
    if (params.lookback < 1) throw ConfigError("baseline lookback must be >= 1");
    if (params.leverage < 0) throw ConfigError("baseline leverage must be >= 0");
    const int l = data.n_strategies();
    std::vector<DatedDecision> out;
    out.reserve(calendar.size());
    for (const int t : calendar) {
        if (t < 0 || t >= data.n_days())
            throw RangeError("rebalance index " + std::to_string(t) + " outside data");
        AllocationDecision d;
        d.leverage = params.leverage;
        switch (kind) {
            case BaselineKind::RiskyOnly:
                d.weights = Eigen::VectorXd::Constant(l, 1.0 / l);
                d.leverage = 0.0;
                break;
            case BaselineKind::Markowitz: {
                const MarkowitzInput in = estimate_markowitz_input(
                    data.strat_returns, t, params.lookback, params.r_min);
                try {
                    d.weights = markowitz_weights(in);
                } catch (const DomainError& e) {
                    // Explicit floor above every expected return: the best
                    // attainable return is the max-mu vertex.
                    std::cerr << "warning: " << e.what()
                              << "; using the max-return vertex\n";
                    d.weights = one_hot(l, argmax_lowest(in.mu));
                }
                break;
            }
            case BaselineKind::FollowWinner:
                d.weights = follow_winner(data.strat_returns, t, params.lookback);
                break;
            case BaselineKind::FollowLoser:
                d.weights = follow_loser(data.strat_returns, t, params.lookback);
                break;
        }
        out.push_back({t, d});
    }
    return out;
}

}  // namespace hedge
