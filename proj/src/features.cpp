#include "hedge/features.hpp"

#include <cmath>
#include <limits>

namespace hedge {

void ObservationSpec::validate() const {
    if (return_lags.empty() || return_lags.front() != 0)
        throw ConfigError("observation lags must start at 0");
    for (size_t i = 1; i < return_lags.size(); ++i)
        if (return_lags[i] <= return_lags[i - 1])
            throw ConfigError("observation lags must be strictly increasing");
    if (context_lags.empty() || context_lags.front() != 0)
        throw ConfigError("context lags must start at 0");
    for (size_t i = 1; i < context_lags.size(); ++i)
        if (context_lags[i] <= context_lags[i - 1])
            throw ConfigError("context lags must be strictly increasing");
    if (vol_window < 2) throw ConfigError("volatility window must be at least 2");
}

Eigen::MatrixXd rolling_vol(const Eigen::MatrixXd& returns, int d) {
    if (d < 2) throw ConfigError("rolling_vol: window must be at least 2");
    if (returns.rows() < d) throw DataError("rolling_vol: fewer returns than the window");
    const int n = static_cast<int>(returns.rows());
    const int m = static_cast<int>(returns.cols());
    Eigen::MatrixXd vol =
        Eigen::MatrixXd::Constant(n, m, std::numeric_limits<double>::quiet_NaN());
    for (int t = d - 1; t < n; ++t)
        for (int k = 0; k < m; ++k) {
            const auto win = returns.col(k).segment(t - d + 1, d).array();
            const double mu = win.mean();
            vol(t, k) = std::sqrt((win - mu).square().sum() / d);
        }
    return vol;
}

ObservationAssembler::ObservationAssembler(const MarketData& data, const ObservationSpec& spec,
                                           int train_begin, int train_end)
    : data_(&data), spec_(spec) {
    spec_.validate();
    const int n = data.n_days();
    if (train_begin < 0 || train_end >= n || train_begin > train_end)
        throw ContractError("observation assembler: bad training range");

    vols_ = rolling_vol(data.strat_returns, spec_.vol_window);

    // Full lag plus volatility history: t - max_lag must leave a complete
    // window behind it.
    first_feasible_ =
        std::max(spec_.max_return_lag() + spec_.vol_window, spec_.max_context_lag());

    // Standardize each raw context series with training-range statistics
    // only. A zero-variance series standardizes to zero rather than blowing
    // up (guarded denominator).
    const int p = data.n_context();
    context_std_.resize(n, p);
    for (int k = 0; k < p; ++k) {
        const auto train = data.context_raw.col(k).segment(train_begin, train_end - train_begin + 1);
        const double mu = train.mean();
        const double sd = std::sqrt((train.array() - mu).square().sum() / train.size());
        context_std_.col(k) = (data.context_raw.col(k).array() - mu) / std::max(sd, 1e-12);
    }

    max_ret_.resize(n);
    min_ret_.resize(n);
    max_vol_.resize(n);
    for (int t = 0; t < n; ++t) {
        max_ret_[t] = data.strat_returns.row(t).maxCoeff();
        min_ret_[t] = data.strat_returns.row(t).minCoeff();
        max_vol_[t] = vols_.row(t).maxCoeff();  // NaN before the window fills; never read
    }
}

ObservationBatch ObservationAssembler::at(int t) const {
    if (t < first_feasible_ || t >= data_->n_days())
        throw RangeError("observation at index " + std::to_string(t) +
                         " outside feasible range [" + std::to_string(first_feasible_) + ", " +
                         std::to_string(data_->n_days() - 1) + "]");
    const int l = n_strategies();
    const int nl = static_cast<int>(spec_.return_lags.size());
    const int nc = static_cast<int>(spec_.context_lags.size());
    const int p = static_cast<int>(data_->context_raw.cols());

    ObservationBatch obs;
    obs.a1.resize(l, nl);
    obs.a2.resize(l, nl);
    for (int j = 0; j < nl; ++j) {
        const int s = t - spec_.return_lags[j];
        obs.a1.col(j) = data_->strat_returns.row(s).transpose();
        obs.a2.col(j) = vols_.row(s).transpose();
    }
    obs.c.resize(p + 3, nc);
    for (int j = 0; j < nc; ++j) {
        const int s = t - spec_.context_lags[j];
        for (int k = 0; k < p; ++k) obs.c(k, j) = context_std_(s, k);
        obs.c(p + 0, j) = max_ret_[s];
        obs.c(p + 1, j) = min_ret_[s];
        obs.c(p + 2, j) = max_vol_[s];
    }
    if (!obs.a1.array().isFinite().all() || !obs.a2.array().isFinite().all() ||
        !obs.c.array().isFinite().all())
        throw NumericError("non-finite observation at index " + std::to_string(t));
    return obs;
}

}  // namespace hedge
