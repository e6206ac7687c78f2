#include "hedge/synthgen.hpp"

#include <Eigen/Dense>
#include <iostream>
#include <random>

namespace hedge {

namespace {

constexpr double kReturnFloor = -0.5;
// EMA weight of the newest regime indicator in the context signal.
constexpr double kContextSmoothing = 0.2;

}  // namespace

void RegimeSpec::validate() const {
    const int k = n_regimes();
    const int m = n_series();
    if (k < 1) throw ConfigError("regime spec: need at least one regime");
    if (m < 2) throw ConfigError("regime spec: need a risky series plus >= 1 strategy");
    if (transition.cols() != k)
        throw ConfigError("regime spec: transition matrix must be square");
    for (int i = 0; i < k; ++i) {
        if (transition.row(i).minCoeff() < 0.0)
            throw ConfigError("regime spec: negative transition probability in row " +
                              std::to_string(i));
        if (std::abs(transition.row(i).sum() - 1.0) > 1e-9)
            throw ConfigError("regime spec: transition row " + std::to_string(i) +
                              " sums to " + std::to_string(transition.row(i).sum()));
    }
    if (static_cast<int>(mean.size()) != k || static_cast<int>(vol.size()) != k ||
        static_cast<int>(corr.size()) != k)
        throw ConfigError("regime spec: need mean/vol/corr for each regime");
    for (int r = 0; r < k; ++r) {
        if (mean[r].size() != m || vol[r].size() != m)
            throw ConfigError("regime spec: regime " + std::to_string(r) +
                              " mean/vol length must match series count");
        if (!mean[r].allFinite() || !vol[r].allFinite() || vol[r].minCoeff() < 0.0)
            throw ConfigError("regime spec: regime " + std::to_string(r) +
                              " has invalid mean or volatility");
        if (corr[r].rows() != m || corr[r].cols() != m)
            throw ConfigError("regime spec: regime " + std::to_string(r) +
                              " correlation must be " + std::to_string(m) + "x" +
                              std::to_string(m));
        if ((corr[r] - corr[r].transpose()).cwiseAbs().maxCoeff() > 1e-9 ||
            (corr[r].diagonal().array() - 1.0).abs().maxCoeff() > 1e-9)
            throw ConfigError("regime spec: regime " + std::to_string(r) +
                              " correlation must be symmetric with unit diagonal");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr[r]);
        if (eig.eigenvalues().minCoeff() < -1e-8)
            throw ConfigError("regime spec: regime " + std::to_string(r) +
                              " correlation is not positive semidefinite");
    }
    if (!(context_signal >= 0.0) || !(context_noise >= 0.0))
        throw ConfigError("regime spec: context signal and noise must be >= 0");
}

SyntheticData generate(const RegimeSpec& spec, int n_days, Date start,
                       std::uint64_t seed) {
    spec.validate();
    if (n_days < 1) throw ConfigError("synthetic generation needs n_days >= 1");
    const int k = spec.n_regimes();
    const int m = spec.n_series();

    // Per-regime covariance square roots via symmetric eigen-decomposition;
    // tiny negative eigenvalues from roundoff are truncated at zero.
    std::vector<Eigen::MatrixXd> sqrt_cov(k);
    for (int r = 0; r < k; ++r) {
        const Eigen::MatrixXd cov =
            spec.vol[r].asDiagonal() * spec.corr[r] * spec.vol[r].asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        sqrt_cov[r] = eig.eigenvectors() *
                      eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                      eig.eigenvectors().transpose();
    }

    SyntheticData out;
    out.prices.names = spec.series_names;
    out.prices.dates = business_days(start, n_days + 1);
    out.prices.values.resize(n_days + 1, m);
    out.prices.values.row(0).setOnes();
    for (int c = 0; c < k; ++c) out.context.names.push_back("ctx" + std::to_string(c + 1));
    out.context.dates = out.prices.dates;
    out.context.values.resize(n_days + 1, k);
    out.regimes.resize(n_days);

    // Fixed draw order (the determinism contract): the day-0 context noise
    // first, then per day a transition uniform (from day 2 on), the series
    // normals, and the context noise normals.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Eigen::VectorXd smooth = Eigen::VectorXd::Zero(k);
    smooth[0] = 1.0;  // the chain starts in regime 0
    for (int c = 0; c < k; ++c)
        out.context.values(0, c) =
            spec.context_signal * smooth[c] + spec.context_noise * gauss(rng);

    int regime = 0;
    long clamped = 0;
    for (int t = 1; t <= n_days; ++t) {
        if (t > 1) {
            const double u = unif(rng);
            double acc = 0.0;
            int next = k - 1;  // roundoff fallback: the last regime
            for (int r = 0; r < k; ++r) {
                acc += spec.transition(regime, r);
                if (u < acc) {
                    next = r;
                    break;
                }
            }
            regime = next;
        }
        out.regimes[t - 1] = regime;

        Eigen::VectorXd z(m);
        for (int i = 0; i < m; ++i) z[i] = gauss(rng);
        Eigen::VectorXd ret = spec.mean[regime] + sqrt_cov[regime] * z;
        for (int i = 0; i < m; ++i)
            if (ret[i] < kReturnFloor) {
                ret[i] = kReturnFloor;
                ++clamped;
            }
        out.prices.values.row(t) =
            out.prices.values.row(t - 1).cwiseProduct((1.0 + ret.array()).matrix().transpose());

        smooth = (1.0 - kContextSmoothing) * smooth;
        smooth[regime] += kContextSmoothing;
        for (int c = 0; c < k; ++c)
            out.context.values(t, c) =
                spec.context_signal * smooth[c] + spec.context_noise * gauss(rng);
    }
    if (clamped > 0)
        std::cerr << "warning: clamped " << clamped << " synthetic returns at "
                  << kReturnFloor << "\n";
    return out;
}

namespace {

Eigen::MatrixXd identity_corr(int m) { return Eigen::MatrixXd::Identity(m, m); }

RegimeSpec separable_spec() {
    RegimeSpec s;
    s.series_names = {"RISKY", "S1", "S2"};
    // Regime 0: S1 wins; regime 1: S2 wins and the risky asset suffers.
    s.mean = {Eigen::Vector3d(0.0002, 0.004, -0.004),
              Eigen::Vector3d(-0.001, -0.004, 0.004)};
    s.vol = {Eigen::Vector3d(0.010, 0.004, 0.004), Eigen::Vector3d(0.015, 0.004, 0.004)};
    s.corr = {identity_corr(3), identity_corr(3)};
    // Mean regime duration 10 days: fast enough switching that acting on
    // stale observations visibly costs performance.
    s.transition.resize(2, 2);
    s.transition << 0.90, 0.10, 0.10, 0.90;
    s.context_signal = 1.0;
    s.context_noise = 0.05;
    return s;
}

}  // namespace

RegimeSpec preset(const std::string& name) {
    if (name == "separable") return separable_spec();
    if (name == "no-signal") {
        RegimeSpec s = separable_spec();
        s.context_signal = 0.0;  // indicators never reach the context columns
        s.context_noise = 1.0;
        return s;
    }
    if (name == "crisis") {
        RegimeSpec s;
        s.series_names = {"RISKY", "S1", "S2"};
        // Calm drift, then a rare crash regime where the first hedge pays.
        s.mean = {Eigen::Vector3d(0.0008, -0.0002, 0.0000),
                  Eigen::Vector3d(-0.015, 0.015, 0.000)};
        s.vol = {Eigen::Vector3d(0.008, 0.003, 0.003),
                 Eigen::Vector3d(0.030, 0.010, 0.006)};
        Eigen::MatrixXd crisis_corr = identity_corr(3);
        crisis_corr(0, 1) = crisis_corr(1, 0) = -0.6;  // hedge kicks in when risky falls
        s.corr = {identity_corr(3), crisis_corr};
        s.transition.resize(2, 2);
        s.transition << 0.99, 0.01, 0.10, 0.90;
        s.context_signal = 1.0;
        s.context_noise = 0.05;
        return s;
    }
    if (name == "dominant") {
        RegimeSpec s;
        s.series_names = {"RISKY", "S1", "S2", "S3"};
        s.mean = {Eigen::Vector4d(0.0002, 0.004, -0.004, -0.004)};
        s.vol = {Eigen::Vector4d(0.010, 0.003, 0.003, 0.003)};
        s.corr = {identity_corr(4)};
        s.transition = Eigen::MatrixXd::Ones(1, 1);
        s.context_signal = 0.0;  // nothing to learn from context here
        s.context_noise = 1.0;
        return s;
    }
    throw ConfigError("unknown synthetic preset '" + name +
                      "' (expected separable, crisis, no-signal, dominant)");
}

std::vector<std::string> preset_names() {
    return {"separable", "crisis", "no-signal", "dominant"};
}

}  // namespace hedge
