#pragma once

// Independent reference implementations used to pin expected values in
// tests. Everything here is written with plain loops, no Eigen and no
// library code under test, so agreement is meaningful.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

inline double sum(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

inline double mean(const std::vector<double>& x) { return sum(x) / x.size(); }

// Population standard deviation (1/n).
inline double std_dev(const std::vector<double>& x) {
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return std::sqrt(acc / x.size());
}

inline std::vector<double> softmax(const std::vector<double>& x) {
    double mx = x[0];
    for (double v : x) mx = std::max(mx, v);
    std::vector<double> y(x.size());
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        y[i] = std::exp(x[i] - mx);
        s += y[i];
    }
    for (double& v : y) v /= s;
    return y;
}

// Valid 1-D convolution of one row with one kernel (stride 1, no padding).
inline std::vector<double> conv1d(const std::vector<double>& row,
                                  const std::vector<double>& kernel) {
    const size_t n = row.size(), k = kernel.size();
    std::vector<double> out(n - k + 1, 0.0);
    for (size_t c = 0; c + k <= n; ++c)
        for (size_t j = 0; j < k; ++j) out[c] += row[c + j] * kernel[j];
    return out;
}

// y_j = sum_i x_i W[i][j] + b_j
inline std::vector<double> dense(const std::vector<double>& x,
                                 const std::vector<std::vector<double>>& w,
                                 const std::vector<double>& b) {
    std::vector<double> y(b);
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = 0; j < y.size(); ++j) y[j] += x[i] * w[i][j];
    return y;
}

// --- financial metrics over a value series v[0..T] ---------------------

inline double net_profit(const std::vector<double>& values) {
    return values.back() / values.front() - 1.0;
}

inline std::vector<double> daily_returns(const std::vector<double>& values) {
    std::vector<double> r;
    for (size_t i = 1; i < values.size(); ++i) r.push_back(values[i] / values[i - 1] - 1.0);
    return r;
}

inline std::optional<double> sharpe(const std::vector<double>& returns,
                                    double days_per_year = 250.0) {
    if (returns.size() < 2) return std::nullopt;
    const double sd = std_dev(returns);
    if (sd <= 1e-12) return std::nullopt;
    return mean(returns) * days_per_year / (sd * std::sqrt(days_per_year));
}

inline std::optional<double> sortino(const std::vector<double>& returns,
                                     double days_per_year = 250.0) {
    std::vector<double> neg;
    for (double r : returns)
        if (r < 0.0) neg.push_back(r);
    if (neg.empty()) return std::nullopt;
    const double dsd = std_dev(neg);
    if (dsd <= 1e-12) return std::nullopt;
    return mean(returns) * days_per_year / (dsd * std::sqrt(days_per_year));
}

inline double max_drawdown(const std::vector<double>& values) {
    double peak = values[0], worst = 0.0;
    for (double v : values) {
        peak = std::max(peak, v);
        worst = std::max(worst, (peak - v) / peak);
    }
    return worst;
}

// Brute-force mean-variance reference: scans the 3-simplex at the given
// grid resolution and returns the smallest w'Sw among points meeting the
// return floor, or nullopt if no grid point is feasible.
inline std::optional<double> markowitz_grid_3(const std::vector<double>& mu,
                                              const std::vector<std::vector<double>>& S,
                                              double r_min, int steps = 100) {
    std::optional<double> best;
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; i + j <= steps; ++j) {
            const double w[3] = {double(i) / steps, double(j) / steps,
                                 double(steps - i - j) / steps};
            double ret = 0.0;
            for (int a = 0; a < 3; ++a) ret += mu[a] * w[a];
            if (ret < r_min) continue;
            double obj = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) obj += w[a] * S[a][b] * w[b];
            if (!best || obj < *best) best = obj;
        }
    return best;
}

// Same scan over the 4-simplex.
inline std::optional<double> markowitz_grid_4(const std::vector<double>& mu,
                                              const std::vector<std::vector<double>>& S,
                                              double r_min, int steps = 100) {
    std::optional<double> best;
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; i + j <= steps; ++j)
            for (int k = 0; i + j + k <= steps; ++k) {
                const double w[4] = {double(i) / steps, double(j) / steps,
                                     double(k) / steps, double(steps - i - j - k) / steps};
                double ret = 0.0;
                for (int a = 0; a < 4; ++a) ret += mu[a] * w[a];
                if (ret < r_min) continue;
                double obj = 0.0;
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) obj += w[a] * S[a][b] * w[b];
                if (!best || obj < *best) best = obj;
            }
    return best;
}

}  // namespace oracle
