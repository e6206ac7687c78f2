#include "hedge/gradcheck_suite.hpp"

#include <memory>

#include "hedge/metrics.hpp"
#include "hedge/policy.hpp"
#include "hedge/synthgen.hpp"

namespace hedge {

namespace {

using PointGen = std::function<Eigen::VectorXd(int, std::mt19937_64&)>;

Eigen::VectorXd draw_uniform(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = u(rng);
    return x;
}

// Values bounded away from zero, for ops with a kink at the origin.
Eigen::VectorXd draw_gapped(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 1.2);
    std::bernoulli_distribution sign(0.5);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = (sign(rng) ? 1.0 : -1.0) * u(rng);
    return x;
}

// Pairwise-separated values, so min/max argpoints survive the FD step.
Eigen::VectorXd draw_separated(int n, std::mt19937_64& rng) {
    for (;;) {
        Eigen::VectorXd x = draw_uniform(n, rng);
        Eigen::VectorXd s = x;
        std::sort(s.data(), s.data() + n);
        bool ok = true;
        for (int i = 1; i < n; ++i) ok = ok && (s[i] - s[i - 1] > 0.02);
        if (ok) return x;
    }
}

Eigen::VectorXd fixed_probe(int n) {
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = 0.3 + 0.15 * i * (i % 2 ? 1.0 : -1.0);
    return w;
}

// Weighted sum against a fixed probe vector: collapses any 1-D node to a
// scalar while keeping every input coordinate's gradient distinct.
NodeId probe(Tape& t, NodeId y, int n) { return dot(t, y, leaf(t, fixed_probe(n))); }

std::vector<GradCheckCase> elementwise_checks() {
    std::vector<GradCheckCase> checks;
    checks.push_back({"add", 8, 5,
                      [](Tape& t, NodeId x) {
                          NodeId a = slice(t, x, 0, Shape(4));
                          NodeId b = slice(t, x, 4, Shape(4));
                          return probe(t, add(t, a, b), 4);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"sub", 8, 5,
                      [](Tape& t, NodeId x) {
                          NodeId a = slice(t, x, 0, Shape(4));
                          NodeId b = slice(t, x, 4, Shape(4));
                          return probe(t, sub(t, a, b), 4);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"mul", 8, 5,
                      [](Tape& t, NodeId x) {
                          NodeId a = slice(t, x, 0, Shape(4));
                          NodeId b = slice(t, x, 4, Shape(4));
                          return probe(t, mul(t, a, b), 4);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"div", 8, 5,
                      [](Tape& t, NodeId x) {
                          NodeId a = slice(t, x, 0, Shape(4));
                          // Denominator shifted away from zero for any
                          // draw in (-1.5, 1.5).
                          NodeId b = add(t, slice(t, x, 4, Shape(4)), leaf(t, 3.0));
                          return probe(t, div(t, a, b), 4);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"scalar broadcast", 6, 5,
                      [](Tape& t, NodeId x) {
                          NodeId a = slice(t, x, 0, Shape(1));
                          NodeId b = slice(t, x, 1, Shape(5));
                          return probe(t, mul(t, a, b), 5);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"neg", 5, 5,
                      [](Tape& t, NodeId x) { return probe(t, neg(t, x), 5); },
                      draw_uniform, 1e-5});
    checks.push_back({"relu", 6, 5,
                      [](Tape& t, NodeId x) { return probe(t, relu(t, x), 6); },
                      draw_gapped, 1e-5});
    checks.push_back({"abs composite", 6, 5,
                      [](Tape& t, NodeId x) { return probe(t, abs_op(t, x), 6); },
                      draw_gapped, 1e-5});
    checks.push_back({"tanh", 6, 5,
                      [](Tape& t, NodeId x) { return probe(t, tanh_op(t, x), 6); },
                      draw_uniform, 1e-5});
    checks.push_back({"scale", 5, 5,
                      [](Tape& t, NodeId x) { return reduce_sum(t, scale(t, x, 1.7)); },
                      draw_uniform, 1e-5});
    return checks;
}

std::vector<GradCheckCase> structural_checks() {
    std::vector<GradCheckCase> checks;
    checks.push_back({"dense", 19, 5,
                      [](Tape& t, NodeId x) {
                          NodeId in = slice(t, x, 0, Shape(3));
                          NodeId w = slice(t, x, 3, Shape(3, 4));
                          NodeId b = slice(t, x, 15, Shape(4));
                          return probe(t, dense(t, in, w, b), 4);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"conv rowwise", 20, 5,
                      [](Tape& t, NodeId x) {
                          NodeId in = slice(t, x, 0, Shape(2, 6));
                          NodeId k = slice(t, x, 12, Shape(2, 3));
                          NodeId b = slice(t, x, 18, Shape(2));
                          NodeId out = flatten(t, conv_rowwise(t, in, k, b));
                          return probe(t, out, 16);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"softmax", 5, 5,
                      [](Tape& t, NodeId x) { return probe(t, softmax(t, x), 5); },
                      draw_uniform, 1e-5});
    checks.push_back({"scaled sigmoid", 1, 5,
                      [](Tape& t, NodeId x) {
                          return scaled_sigmoid(t, slice(t, x, 0, Shape(1)), 3.0);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"reduce sum", 6, 5,
                      [](Tape& t, NodeId x) { return reduce_sum(t, x); }, draw_uniform,
                      1e-5});
    checks.push_back({"reduce mean", 6, 5,
                      [](Tape& t, NodeId x) { return reduce_mean(t, x); }, draw_uniform,
                      1e-5});
    checks.push_back({"reduce std", 6, 5,
                      [](Tape& t, NodeId x) { return reduce_std(t, x); }, draw_separated,
                      1e-5});
    checks.push_back({"reduce min", 6, 5,
                      [](Tape& t, NodeId x) { return reduce_min(t, x); }, draw_separated,
                      1e-5});
    checks.push_back({"reduce max", 6, 5,
                      [](Tape& t, NodeId x) { return reduce_max(t, x); }, draw_separated,
                      1e-5});
    checks.push_back({"concat", 7, 5,
                      [](Tape& t, NodeId x) {
                          NodeId a = slice(t, x, 0, Shape(3));
                          NodeId b = slice(t, x, 3, Shape(4));
                          return probe(t, concat(t, a, b), 7);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"slice + reshape", 8, 5,
                      [](Tape& t, NodeId x) {
                          NodeId y = reshape(t, slice(t, x, 2, Shape(4)), Shape(2, 2));
                          return probe(t, flatten(t, y), 4);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"gather (repeats)", 5, 5,
                      [](Tape& t, NodeId x) {
                          return probe(t, gather(t, x, {0, 2, 2, 4}), 4);
                      },
                      draw_uniform, 1e-5});
    checks.push_back({"stack", 3, 5,
                      [](Tape& t, NodeId x) {
                          std::vector<NodeId> parts{slice(t, x, 0, Shape(1)),
                                                    slice(t, x, 1, Shape(1)),
                                                    slice(t, x, 2, Shape(1))};
                          return probe(t, stack(t, parts), 3);
                      },
                      draw_uniform, 1e-5});
    return checks;
}

NetworkConfig gradcheck_net(int n_strategies, int n_context_rows, bool use_context,
                            const std::string& activation) {
    NetworkConfig net;
    net.n_strategies = n_strategies;
    net.n_return_lags = 4;
    net.n_context_rows = n_context_rows;
    net.n_context_lags = 4;
    net.asset_filters = 2;
    net.asset_kernel = 2;
    net.asset_hidden = 5;
    net.context_filters = 2;
    net.context_kernel = 2;
    net.context_hidden = 4;
    net.merge_hidden = 6;
    net.activation = activation;
    net.use_context = use_context;
    return net;
}

ObservationBatch random_obs(const NetworkConfig& net, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    ObservationBatch obs;
    obs.a1.resize(net.n_strategies, net.n_return_lags);
    obs.a2.resize(net.n_strategies, net.n_return_lags);
    obs.c.resize(net.n_context_rows, net.n_context_lags);
    for (auto* m : {&obs.a1, &obs.a2, &obs.c})
        for (int i = 0; i < m->rows(); ++i)
            for (int j = 0; j < m->cols(); ++j) (*m)(i, j) = 0.3 * n(rng);
    obs.a2 = obs.a2.cwiseAbs();
    return obs;
}

// Network parameters near initialization scale: large uniform draws
// saturate the softmax, leaving gradients at finite-difference noise
// level, so the composite checks probe where training actually operates.
// The doubling keeps early-layer gradients (products of downstream
// weights) comfortably above rounding noise without saturating anything.
PointGen init_scale_points(const NetworkConfig& net) {
    return [net](int, std::mt19937_64& rng) {
        return (2.0 * init_params(net, rng()).flatten()).eval();
    };
}

std::vector<GradCheckCase> composite_checks() {
    std::vector<GradCheckCase> checks;
    // relu + no-context is omitted on purpose: that configuration zeroes
    // the whole context branch, parking its pre-activations exactly on the
    // relu kink where central differences are undefined.
    const std::pair<const char*, bool> combos[] = {
        {"relu", true}, {"tanh", true}, {"tanh", false}};
    for (const auto& [activation, use_context] : combos) {
        NetworkConfig net = gradcheck_net(3, 4, use_context, activation);
        std::mt19937_64 obs_rng(77);
        ObservationBatch obs = random_obs(net, obs_rng);
        const std::string name = std::string("policy forward (") + activation +
                                 (use_context ? ", context" : ", no context") + ")";
        checks.push_back(
            {name, net.param_count(), 2,
             [net, obs](Tape& t, NodeId x) {
                 DecisionNodes d = forward_nodes(t, slice_leaves(t, x, net), net, obs);
                 return add(t, probe(t, d.weights, net.n_strategies), d.leverage);
             },
             init_scale_points(net), 1e-5});
    }

    // Full chain: parameters -> two dated decisions -> hedged episode ->
    // reward, with the smooth activation so the whole composite is
    // differentiable at any point. The market is a fixed synthetic draw at
    // ten times the preset's volatility: first-layer gradients scale with
    // the raw return inputs, and at realistic daily magnitudes (~0.4%) the
    // weakest of them drop to ~1e-8 where central differences see only
    // rounding noise. The louder market lifts every coordinate well clear
    // of that floor while exercising the identical chain.
    RegimeSpec market_spec = preset("separable");
    for (auto& m : market_spec.mean) m *= 10.0;
    for (auto& v : market_spec.vol) v *= 10.0;
    SyntheticData synth = generate(market_spec, 60, parse_date("2005-01-03"), 11);
    auto data = std::make_shared<MarketData>(
        build_market_data(synth.prices, &synth.context, "RISKY", 5));
    ObservationSpec spec;
    spec.return_lags = {0, 1, 2};
    spec.context_lags = {0, 1, 2};
    spec.vol_window = 5;
    auto assembler = std::make_shared<ObservationAssembler>(*data, spec, 0, 39);
    NetworkConfig net =
        gradcheck_net(data->n_strategies(), assembler->n_context_rows(), true, "tanh");
    net.n_return_lags = 3;
    net.n_context_lags = 3;
    const int t0 = assembler->first_feasible();

    for (const RewardKind kind :
         {RewardKind::net_profit, RewardKind::sharpe, RewardKind::sortino}) {
        // Step size per reward: the profit chain is nearly linear, so a
        // wide step suppresses rounding noise on its weakest coordinates;
        // the ratio rewards have much larger curvature (std in the
        // denominator) and favor a small step.
        const double eps = kind == RewardKind::net_profit ? 3e-4 : 1e-5;
        checks.push_back(
            {"episode reward (" + reward_kind_name(kind) + ")", net.param_count(), 2,
             [data, assembler, net, t0, kind](Tape& t, NodeId x) {
                 std::vector<NodeId> leaves = slice_leaves(t, x, net);
                 EpisodeConfig ep;  // one-day lag, default costs
                 std::vector<TapeDecision> decisions;
                 for (const int td : {t0, t0 + 5}) {
                     DecisionNodes d = forward_nodes(t, leaves, net, assembler->at(td));
                     decisions.push_back({td, d.weights, d.leverage, {}});
                 }
                 const PathRange range{t0 + 2, t0 + 13};
                 TapeEpisode episode = run_episode_on_tape(t, decisions, *data, range, ep);
                 return reward_node(t, kind, episode.returns_vec, episode.final_value,
                                    ep.initial_value)
                     .value();
             },
             init_scale_points(net), eps});
    }
    return checks;
}

}  // namespace

std::vector<GradCheckCase> gradcheck_suite() {
    std::vector<GradCheckCase> checks = elementwise_checks();
    for (auto& c : structural_checks()) checks.push_back(std::move(c));
    for (auto& c : composite_checks()) checks.push_back(std::move(c));
    return checks;
}

}  // namespace hedge
