#include "hedge/trainer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hedge {

void TrainerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("trainer: learning rate must be positive");
    if (noise_std < 0.0) throw ConfigError("trainer: noise std must be >= 0");
    if (max_iterations < 1) throw ConfigError("trainer: max iterations must be >= 1");
    if (patience < 0 || patience > max_iterations)
        throw ConfigError("trainer: patience must be in [0, max iterations]");
    if (!(p_policy > 0.0 && p_policy <= 1.0))
        throw ConfigError("trainer: policy-action probability must be in (0, 1]");
    if (selection != "best_train" && selection != "best_test")
        throw ConfigError("trainer: selection must be best_train or best_test");
}

AdamState AdamState::init(const PolicyParams& params) {
    AdamState s;
    s.m.reserve(params.arrays.size());
    s.v.reserve(params.arrays.size());
    for (const auto& [name, t] : params.arrays) {
        s.m.push_back(Tensor::zeros(t.shape));
        s.v.push_back(Tensor::zeros(t.shape));
    }
    return s;
}

void adam_step(PolicyParams& params, const std::vector<Tensor>& grads, AdamState& state,
               double lr) {
    if (grads.size() != params.arrays.size() || state.m.size() != params.arrays.size())
        throw ContractError("adam_step: gradient/state arrays do not match parameters");
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, state.step);
    const double bc2 = 1.0 - std::pow(state.beta2, state.step);
    for (size_t i = 0; i < grads.size(); ++i) {
        auto& [name, theta] = params.arrays[i];
        const Tensor& g = grads[i];
        if (!(g.shape == theta.shape))
            throw ContractError("adam_step: gradient shape mismatch for '" + name + "'");
        if (!g.all_finite())
            throw TrainingError("non-finite gradient in '" + name + "'");
        auto& m = state.m[i].data;
        auto& v = state.v[i].data;
        m = state.beta1 * m + (1.0 - state.beta1) * g.data;
        v = state.beta2 * v + (1.0 - state.beta2) * g.data.square();
        // Ascent: move along the gradient to maximize the reward.
        theta.data += lr * (m / bc1) / ((v / bc2).sqrt() + state.eps);
    }
}

ObservationBatch inject_noise(const ObservationBatch& obs, double std,
                              std::mt19937_64& rng) {
    if (std < 0.0) throw ConfigError("inject_noise: std must be >= 0");
    if (std == 0.0) return obs;
    std::normal_distribution<double> noise(0.0, std);
    ObservationBatch out = obs;
    // Fixed draw order: A1 row-major, then A2, then C.
    for (int i = 0; i < out.a1.rows(); ++i)
        for (int j = 0; j < out.a1.cols(); ++j) out.a1(i, j) += noise(rng);
    for (int i = 0; i < out.a2.rows(); ++i)
        for (int j = 0; j < out.a2.cols(); ++j) out.a2(i, j) += noise(rng);
    for (int i = 0; i < out.c.rows(); ++i)
        for (int j = 0; j < out.c.cols(); ++j) out.c(i, j) += noise(rng);
    return out;
}

AllocationDecision random_action(int n_strategies, double cap, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    AllocationDecision d;
    d.weights.resize(n_strategies);
    for (int i = 0; i < n_strategies; ++i) d.weights[i] = expo(rng);
    d.weights /= d.weights.sum();
    d.leverage = std::uniform_real_distribution<double>(0.0, cap)(rng);
    return d;
}

namespace {

// Exploration probability annealed linearly from p0 at iteration 1 to 1.0
// at max_iterations.
double annealed_p(double p0, int iteration, int max_iterations) {
    if (max_iterations <= 1) return p0;
    const double f = static_cast<double>(iteration - 1) / (max_iterations - 1);
    return p0 + (1.0 - p0) * f;
}

struct RewardBuild {
    NodeId node;
    bool fallback = false;
};

RewardBuild build_reward(Tape& tape, RewardKind kind, const TapeEpisode& ep,
                         double initial_value) {
    auto node = reward_node(tape, kind, ep.returns_vec, ep.final_value, initial_value);
    if (node) return {*node, false};
    auto fb = reward_node(tape, RewardKind::net_profit, ep.returns_vec, ep.final_value,
                          initial_value);
    return {*fb, true};
}

}  // namespace

PolicyEvaluation evaluate_policy(const PolicyParams& params, const NetworkConfig& net,
                                 const ObservationAssembler& assembler,
                                 const MarketData& data, const PathRange& range,
                                 const EpisodeConfig& episode, RewardKind reward) {
    episode.validate();
    PolicyEvaluation ev;
    const int first = std::max(assembler.first_feasible(), range.begin - 1 - episode.action_lag);
    const int last = range.end - 1 - episode.action_lag;
    for (int t = first; t <= last; ++t)
        ev.decisions.push_back({t, forward(params, net, assembler.at(t))});
    ev.path = run_episode(ev.decisions, data, range, episode);
    auto r = [&]() -> std::optional<double> {
        switch (reward) {
            case RewardKind::net_profit: return net_profit(ev.path.value_series());
            case RewardKind::sharpe: return annualized_sharpe(ev.path.returns);
            case RewardKind::sortino: return sortino(ev.path.returns);
        }
        throw ContractError("bad reward kind");
    }();
    if (!r) {
        ev.reward_fallback = true;
        ev.reward = net_profit(ev.path.value_series());
    } else {
        ev.reward = *r;
    }
    return ev;
}

TrainResult train(const TrainEnv& env, const NetworkConfig& net, const TrainerConfig& cfg) {
    cfg.validate();
    net.validate();
    env.episode.validate();
    if (!env.data || !env.assembler) throw ContractError("train: missing data or assembler");
    if (cfg.selection == "best_test" && !env.test_range)
        throw ConfigError("trainer: selection=best_test needs a test range");

    const int l = env.data->n_strategies();
    const int first_decision = std::max(env.range.begin, env.assembler->first_feasible());
    const int last_decision = env.range.end - 1 - env.episode.action_lag;
    const int first_effective = first_decision + 1 + env.episode.action_lag;
    if (env.range.end - first_effective + 1 < 30)
        throw ConfigError("trainer: training range leaves fewer than 30 tradable days");

    // Clean observations per decision date, assembled once; noise is
    // re-drawn per iteration on top of these.
    std::vector<int> decision_dates;
    std::vector<ObservationBatch> clean;
    for (int t = first_decision; t <= last_decision; ++t) {
        decision_dates.push_back(t);
        clean.push_back(env.assembler->at(t));
    }

    // All loop randomness comes from one generator seeded with seed+1
    // (init_params consumes the base seed). Draw order per decision date:
    // adversarial noise first (when enabled), then the exploration coin
    // (only while annealed p < 1), then the random action when exploring.
    PolicyParams params = init_params(net, cfg.seed);
    std::mt19937_64 rng(cfg.seed + 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    AdamState adam = AdamState::init(params);
    EarlyStop stopper(cfg.patience);

    TrainResult result;
    result.best_params = params;
    double best_logged = -std::numeric_limits<double>::infinity();
    double best_select = -std::numeric_limits<double>::infinity();
    bool warned_fallback = false;

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const double p_it = annealed_p(cfg.p_policy, it, cfg.max_iterations);
        Tape tape;
        auto leaves = make_leaves(tape, params);
        std::vector<TapeDecision> decisions;
        decisions.reserve(decision_dates.size());
        for (size_t i = 0; i < decision_dates.size(); ++i) {
            ObservationBatch obs = cfg.adversarial && cfg.noise_std > 0.0
                                       ? inject_noise(clean[i], cfg.noise_std, rng)
                                       : clean[i];
            const bool explore = p_it < 1.0 && coin(rng) > p_it;
            TapeDecision td;
            td.t = decision_dates[i];
            if (explore) {
                // Random actions are constants with respect to theta: the
                // gradient flows through policy-chosen dates only.
                td.const_exposure = random_action(l, net.leverage_cap, rng).exposures();
            } else {
                DecisionNodes dn = forward_nodes(tape, leaves, net, obs);
                td.weights = dn.weights;
                td.leverage = dn.leverage;
            }
            decisions.push_back(td);
        }

        TapeEpisode ep = run_episode_on_tape(tape, decisions, *env.data, env.range,
                                             env.episode);
        RewardBuild rb = build_reward(tape, cfg.reward, ep, env.episode.initial_value);
        if (rb.fallback && !warned_fallback) {
            warned_fallback = true;
            result.warnings.push_back("iteration " + std::to_string(it) + ": " +
                                      reward_kind_name(cfg.reward) +
                                      " degenerate on this episode; using net_profit");
        }
        NodeId objective = sub(tape, rb.node, l2_penalty(tape, leaves, net));
        tape.backward(objective);

        const double reward_val = tape.value(rb.node).scalar_value();
        if (!std::isfinite(reward_val))
            throw TrainingError("iteration " + std::to_string(it) + ": non-finite reward");

        std::vector<Tensor> grads;
        grads.reserve(leaves.size());
        double norm2 = 0.0;
        for (NodeId leaf_id : leaves) {
            grads.push_back(tape.grad(leaf_id));
            if (!grads.back().all_finite())
                throw TrainingError("iteration " + std::to_string(it) +
                                    ": non-finite gradient");
            norm2 += grads.back().data.square().sum();
        }

        // Selection happens on the parameters that produced this episode,
        // i.e. before the update below.
        double select_val = reward_val;
        if (cfg.selection == "best_test") {
            select_val = evaluate_policy(params, net, *env.assembler, *env.data,
                                         *env.test_range, env.episode, cfg.reward)
                             .reward;
        }
        bool improved = select_val > best_select;
        if (improved) {
            best_select = select_val;
            result.best_params = params;
            result.best_reward = select_val;
            result.best_iteration = it;
        }
        best_logged = std::max(best_logged, reward_val);
        result.curve.push_back({it, reward_val, best_logged, std::sqrt(norm2), rb.fallback});

        adam_step(params, grads, adam, cfg.learning_rate);

        if (stopper.should_stop(it, improved)) {
            result.early_stopped = true;
            break;
        }
    }
    return result;
}

void write_train_log(const std::string& path, const std::vector<IterationLog>& curve) {
    std::ostringstream out;
    out << "iteration,reward,best_reward,grad_norm\n";
    for (const auto& row : curve)
        out << row.iteration << "," << csv::format_number(row.reward) << ","
            << csv::format_number(row.best_reward) << ","
            << csv::format_number(row.grad_norm) << "\n";
    csv::write_file(path, out.str());
}

}  // namespace hedge
