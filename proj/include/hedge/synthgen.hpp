#pragma once

#include <cstdint>

#include "hedge/panels.hpp"

namespace hedge {

// A Markov regime-switching market: each day belongs to a hidden regime;
// daily returns of all series (risky asset first, then the hedging
// strategies) are drawn from that regime's correlated Gaussian. The
// context series are exponentially smoothed regime indicators scaled by
// `context_signal` plus Gaussian noise at `context_noise` — the two dials
// that make regime identity observable, degraded, or absent.
struct RegimeSpec {
    std::vector<std::string> series_names;  // risky first, then strategies
    std::vector<Eigen::VectorXd> mean;      // per regime, daily, length = series
    std::vector<Eigen::VectorXd> vol;       // per regime, daily, length = series
    std::vector<Eigen::MatrixXd> corr;      // per regime, unit diagonal, PSD
    Eigen::MatrixXd transition;             // rows sum to 1, entries >= 0
    double context_signal = 1.0;
    double context_noise = 0.1;

    int n_regimes() const { return static_cast<int>(transition.rows()); }
    int n_series() const { return static_cast<int>(series_names.size()); }
    void validate() const;
};

struct SyntheticData {
    RawPanel prices;           // n_days+1 rows, compounding from 1.0
    RawPanel context;          // one smoothed indicator column per regime
    std::vector<int> regimes;  // hidden regime per return day; diagnostics only
};

// Deterministic in (spec, n_days, seed). The regime path starts in regime
// 0; daily returns are clamped at -50% (clamps are counted and logged).
SyntheticData generate(const RegimeSpec& spec, int n_days, Date start,
                       std::uint64_t seed);

// Named scenario presets:
//   "separable" — two regimes, a different dominant strategy in each,
//                 clean context; exercises context use and action lag.
//   "crisis"    — rare high-volatility regime in which the first hedge
//                 pays off while the risky asset crashes.
//   "no-signal" — same market as separable but context is pure noise; the
//                 control arm for the context ablation.
//   "dominant"  — single regime with one strategy that always wins; the
//                 sanity environment for trainer convergence.
RegimeSpec preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace hedge
