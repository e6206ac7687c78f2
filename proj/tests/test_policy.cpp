#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "hedge/grad_check.hpp"
#include "hedge/policy.hpp"

using namespace hedge;

namespace {

NetworkConfig small_config() {
    NetworkConfig c;
    c.n_strategies = 3;
    c.n_return_lags = 5;
    c.n_context_rows = 4;
    c.n_context_lags = 5;
    c.asset_filters = 2;
    c.asset_kernel = 3;
    c.asset_hidden = 6;
    c.context_filters = 2;
    c.context_kernel = 2;
    c.context_hidden = 4;
    c.merge_hidden = 5;
    return c;
}

ObservationBatch random_obs(const NetworkConfig& c, std::mt19937_64& rng, double scl = 1.0) {
    std::normal_distribution<double> d(0.0, scl);
    ObservationBatch o;
    o.a1.resize(c.n_strategies, c.n_return_lags);
    o.a2.resize(c.n_strategies, c.n_return_lags);
    o.c.resize(c.n_context_rows, c.n_context_lags);
    for (int i = 0; i < o.a1.rows(); ++i)
        for (int j = 0; j < o.a1.cols(); ++j) {
            o.a1(i, j) = d(rng);
            o.a2(i, j) = std::abs(d(rng));
        }
    for (int i = 0; i < o.c.rows(); ++i)
        for (int j = 0; j < o.c.cols(); ++j) o.c(i, j) = d(rng);
    return o;
}

// Parameter count written out independently from the layout() code: walk
// the architecture definition by hand.
int expected_param_count(const NetworkConfig& c) {
    const int asset_conv = c.asset_filters * c.asset_kernel + c.asset_filters;
    const int asset_flat = c.asset_filters * (2 * c.n_strategies) *
                           (c.n_return_lags - c.asset_kernel + 1);
    const int asset_dense = asset_flat * c.asset_hidden + c.asset_hidden;
    const int ctx_conv = c.context_filters * c.context_kernel + c.context_filters;
    const int ctx_flat =
        c.context_filters * c.n_context_rows * (c.n_context_lags - c.context_kernel + 1);
    const int ctx_dense = ctx_flat * c.context_hidden + c.context_hidden;
    const int merge =
        (c.asset_hidden + c.context_hidden) * c.merge_hidden + c.merge_hidden;
    const int heads = c.merge_hidden * c.n_strategies + c.n_strategies  // weights head
                      + c.merge_hidden * 1 + 1;                          // leverage head
    return asset_conv + asset_dense + ctx_conv + ctx_dense + merge + heads;
}

}  // namespace

TEST_CASE("config validation") {
    NetworkConfig c = small_config();
    c.validate();
    c.asset_kernel = 6;  // wider than the 5 lags
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config();
    c.leverage_cap = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config();
    c.activation = "selu";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config();
    c.merge_hidden = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("parameter count matches the independent formula") {
    for (NetworkConfig c : {small_config(), NetworkConfig{}}) {
        CHECK(c.param_count() == expected_param_count(c));
        PolicyParams p = init_params(c, 1);
        CHECK(p.total_size() == expected_param_count(c));
    }
}

TEST_CASE("init is deterministic in the seed") {
    NetworkConfig c = small_config();
    PolicyParams a = init_params(c, 42);
    PolicyParams b = init_params(c, 42);
    PolicyParams d = init_params(c, 43);
    CHECK(a.flatten() == b.flatten());
    CHECK(a.flatten() != d.flatten());
    CHECK(a.seed == 42);

    // Biases zero, weights not (except disabled-context arrays).
    for (const auto& [name, t] : a.arrays) {
        if (PolicyParams::is_weight(name))
            CHECK(t.data.abs().sum() > 0.0);
        else
            CHECK(t.data.isZero());
    }
}

TEST_CASE("zero params give uniform weights and mid-cap leverage") {
    NetworkConfig c = small_config();
    PolicyParams p = init_params(c, 7);
    for (auto& [name, t] : p.arrays) t.data.setZero();
    std::mt19937_64 rng(0);
    AllocationDecision d = forward(p, c, random_obs(c, rng));
    for (int i = 0; i < d.weights.size(); ++i)
        CHECK(d.weights[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(d.leverage == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("forward output invariants hold under fuzzing") {
    NetworkConfig c = small_config();
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 1000; ++rep) {
        PolicyParams p = init_params(c, rep);
        const double scl = rep % 3 == 0 ? 100.0 : (rep % 3 == 1 ? 1.0 : 0.01);
        ObservationBatch o = random_obs(c, rng, scl);
        AllocationDecision d = forward(p, c, o);
        CHECK(d.weights.size() == 3);
        CHECK((d.weights.array() >= 0.0).all());
        CHECK(std::abs(d.weights.sum() - 1.0) <= 1e-10);
        CHECK(d.leverage > 0.0);
        CHECK(d.leverage < c.leverage_cap);
    }
}

TEST_CASE("forward is deterministic and shape-checked") {
    NetworkConfig c = small_config();
    PolicyParams p = init_params(c, 3);
    std::mt19937_64 rng(5);
    ObservationBatch o = random_obs(c, rng);
    AllocationDecision d1 = forward(p, c, o);
    AllocationDecision d2 = forward(p, c, o);
    CHECK(d1.weights == d2.weights);
    CHECK(d1.leverage == d2.leverage);

    ObservationBatch bad = o;
    bad.a1.resize(2, 5);
    CHECK_THROWS_AS(forward(p, c, bad), ShapeError);
}

TEST_CASE("context branch isolation") {
    NetworkConfig c = small_config();
    std::mt19937_64 rng(8);
    ObservationBatch o = random_obs(c, rng);
    ObservationBatch o2 = o;
    o2.c.array() += 3.5;  // only context differs

    // With context-branch parameters zeroed the decision ignores C.
    PolicyParams p = init_params(c, 9);
    for (auto& [name, t] : p.arrays)
        if (name.rfind("context_", 0) == 0) t.data.setZero();
    AllocationDecision a = forward(p, c, o);
    AllocationDecision b = forward(p, c, o2);
    CHECK(a.weights == b.weights);
    CHECK(a.leverage == b.leverage);

    // use_context=false forces the same independence with live parameters.
    NetworkConfig noctx = c;
    noctx.use_context = false;
    PolicyParams q = init_params(noctx, 9);
    AllocationDecision na = forward(q, noctx, o);
    AllocationDecision nb = forward(q, noctx, o2);
    CHECK(na.weights == nb.weights);
    CHECK(na.leverage == nb.leverage);

    // And with full context parameters, context does matter.
    PolicyParams full = init_params(c, 9);
    AllocationDecision fa = forward(full, c, o);
    AllocationDecision fb = forward(full, c, o2);
    CHECK(fa.weights != fb.weights);
}

TEST_CASE("l2 penalty covers weights only") {
    NetworkConfig c = small_config();
    c.l2_coeff = 1.0;
    PolicyParams p = init_params(c, 4);
    double expect = 0.0;
    for (auto& [name, t] : p.arrays) {
        if (PolicyParams::is_weight(name))
            expect += t.data.square().sum();
        else
            t.data.setConstant(9.0);  // biases must not contribute
    }
    Tape t;
    auto leaves = make_leaves(t, p);
    NodeId pen = l2_penalty(t, leaves, c);
    CHECK(t.value(pen).scalar_value() == doctest::Approx(expect).epsilon(1e-12));

    // Zero params -> zero penalty.
    for (auto& [name, tt] : p.arrays) tt.data.setZero();
    Tape t2;
    CHECK(t2.value(l2_penalty(t2, make_leaves(t2, p), c)).scalar_value() == 0.0);
}

TEST_CASE("composite gradient check through the whole network") {
    NetworkConfig c = small_config();
    c.activation = "tanh";  // smooth activation keeps finite differences clean
    std::mt19937_64 rng(21);
    ObservationBatch o = random_obs(c, rng);
    PolicyParams p = init_params(c, 33);
    Eigen::VectorXd theta = p.flatten();

    // Scalar objective mixing both heads: dot(weights, const) * leverage.
    Eigen::VectorXd probe = Eigen::VectorXd::LinSpaced(c.n_strategies, 0.5, 1.5);
    auto build = [&](Tape& t, NodeId flat) {
        auto leaves = slice_leaves(t, flat, c);
        DecisionNodes d = forward_nodes(t, leaves, c, o);
        NodeId obj = mul(t, dot(t, d.weights, leaf(t, probe)), d.leverage);
        return add(t, obj, l2_penalty(t, leaves, c));
    };
    auto rep = grad_check(build, theta, 1e-5);
    CAPTURE(rep.worst_index);
    CHECK(rep.max_rel_err < 1e-4);

    // Relu variant as used in training (kinks make FD noisier but the
    // tolerance still holds at a generic point).
    NetworkConfig cr = c;
    cr.activation = "relu";
    auto build_r = [&](Tape& t, NodeId flat) {
        auto leaves = slice_leaves(t, flat, cr);
        DecisionNodes d = forward_nodes(t, leaves, cr, o);
        return mul(t, dot(t, d.weights, leaf(t, probe)), d.leverage);
    };
    auto rep_r = grad_check(build_r, theta, 1e-6);
    CHECK(rep_r.max_rel_err < 1e-4);
}

TEST_CASE("checkpoint round trip is bit-exact") {
    NetworkConfig c = small_config();
    PolicyParams p = init_params(c, 77);
    p.arrays[0].second.data[0] = 0.1 + 0.2;  // value with a messy binary tail
    auto path = (std::filesystem::temp_directory_path() / "params_rt.txt").string();
    p.save(path);
    PolicyParams q = PolicyParams::load(path);
    CHECK(q.seed == p.seed);
    REQUIRE(q.arrays.size() == p.arrays.size());
    for (size_t i = 0; i < p.arrays.size(); ++i) {
        CHECK(q.arrays[i].first == p.arrays[i].first);
        CHECK(q.arrays[i].second.shape == p.arrays[i].second.shape);
        CHECK((q.arrays[i].second.data == p.arrays[i].second.data).all());
    }

    CHECK_THROWS_AS(PolicyParams::load("/nonexistent/params.txt"), DataError);
}

TEST_CASE("decision validation") {
    AllocationDecision d;
    d.weights = Eigen::Vector3d(0.2, 0.3, 0.5);
    d.leverage = 1.0;
    d.validate(3.0);
    d.leverage = 3.5;
    CHECK_THROWS_AS(d.validate(3.0), ContractError);
    d.leverage = 1.0;
    d.weights[0] = -0.1;
    d.weights[1] = 0.6;
    CHECK_THROWS_AS(d.validate(3.0), ContractError);
    d.weights = Eigen::Vector3d(0.2, 0.3, 0.4);  // sums to 0.9
    CHECK_THROWS_AS(d.validate(3.0), ContractError);
}
