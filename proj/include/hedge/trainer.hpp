#pragma once

#include <random>

#include "hedge/metrics.hpp"
#include "hedge/simulator.hpp"

namespace hedge {

struct TrainerConfig {
    double learning_rate = 0.01;
    double noise_std = 0.002;     // adversarial observation noise
    int max_iterations = 500;
    int patience = 50;            // early stop after this many stale iterations
    double p_policy = 0.9;        // policy-action probability, annealed to 1
    bool adversarial = true;
    RewardKind reward = RewardKind::net_profit;
    // best_train: deploy the params with the best training reward.
    // best_test: pick by test reward instead (leaks the test set; kept only
    // so the two readings of model selection stay one flag apart).
    std::string selection = "best_train";
    std::uint64_t seed = 0;

    void validate() const;
};

struct AdamState {
    std::vector<Tensor> m, v;  // first/second moments, aligned with params
    long step = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    static AdamState init(const PolicyParams& params);
};

// Bias-corrected Adam in the ascent direction (maximize reward):
// theta += lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(PolicyParams& params, const std::vector<Tensor>& grads, AdamState& state,
               double lr);

// I.i.d. zero-mean Gaussian perturbation of every observation entry, drawn
// in a fixed order (A1 row-major, then A2, then C). std=0 draws nothing.
ObservationBatch inject_noise(const ObservationBatch& obs, double std,
                              std::mt19937_64& rng);

// Exploration action: weights uniform on the simplex (unit-concentration
// Dirichlet via normalized exponentials), leverage uniform on (0, cap).
AllocationDecision random_action(int n_strategies, double cap, std::mt19937_64& rng);

// Stops once `iteration - last_improving_iteration > patience`.
class EarlyStop {
  public:
    explicit EarlyStop(int patience) : patience_(patience) {}
    bool should_stop(int iteration, bool improved) {
        if (improved) last_improve_ = iteration;
        return iteration - last_improve_ > patience_;
    }

  private:
    int patience_;
    int last_improve_ = 0;
};

// One walk-forward split's training environment. Decisions are made on
// every date in [range.begin, range.end - 1 - lag] (later ones could never
// take effect inside the range) and the episode is scored over the whole
// range.
struct TrainEnv {
    const MarketData* data = nullptr;
    const ObservationAssembler* assembler = nullptr;
    PathRange range;  // training path range on the return calendar
    EpisodeConfig episode;
    const PathRange* test_range = nullptr;  // only read when selection=best_test
};

struct IterationLog {
    int iteration = 0;
    double reward = 0.0;       // this iteration's episode reward
    double best_reward = 0.0;  // running max
    double grad_norm = 0.0;
    bool reward_fallback = false;  // degenerate reward, net_profit used
};

struct TrainResult {
    PolicyParams best_params;
    double best_reward = 0.0;  // in the selection metric
    int best_iteration = 0;
    std::vector<IterationLog> curve;
    bool early_stopped = false;
    std::vector<std::string> warnings;
};

TrainResult train(const TrainEnv& env, const NetworkConfig& net, const TrainerConfig& cfg);

// Deterministic policy rollout (no noise, no exploration): decisions on
// [range.begin - 1 - lag, range.end - 1 - lag] so exposure is live from the
// first day of the range, as in deployment.
struct PolicyEvaluation {
    double reward = 0.0;
    bool reward_fallback = false;
    PortfolioPath path;
    std::vector<DatedDecision> decisions;
};
PolicyEvaluation evaluate_policy(const PolicyParams& params, const NetworkConfig& net,
                                 const ObservationAssembler& assembler,
                                 const MarketData& data, const PathRange& range,
                                 const EpisodeConfig& episode, RewardKind reward);

void write_train_log(const std::string& path, const std::vector<IterationLog>& curve);

}  // namespace hedge
