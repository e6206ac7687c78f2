#include "hedge/policy.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace hedge {

void NetworkConfig::validate() const {
    auto positive = [](int v, const char* what) {
        if (v < 1) throw ConfigError(std::string("network: ") + what + " must be >= 1");
    };
    positive(n_strategies, "strategy count");
    positive(n_return_lags, "return lag count");
    positive(n_context_rows, "context row count");
    positive(n_context_lags, "context lag count");
    positive(asset_filters, "asset filters");
    positive(asset_hidden, "asset hidden width");
    positive(context_filters, "context filters");
    positive(context_hidden, "context hidden width");
    positive(merge_hidden, "merge width");
    if (asset_kernel < 1 || asset_kernel > n_return_lags)
        throw ConfigError("network: asset kernel width must be in [1, lag count]");
    if (context_kernel < 1 || context_kernel > n_context_lags)
        throw ConfigError("network: context kernel width must be in [1, context lag count]");
    if (!(leverage_cap > 0.0)) throw ConfigError("network: leverage cap must be positive");
    if (l2_coeff < 0.0) throw ConfigError("network: L2 coefficient must be >= 0");
    if (activation != "relu" && activation != "tanh")
        throw ConfigError("network: unknown activation '" + activation + "'");
}

std::vector<std::pair<std::string, Shape>> NetworkConfig::layout() const {
    validate();
    const int asset_rows = 2 * n_strategies;  // A1 stacked over A2
    const int asset_out_cols = n_return_lags - asset_kernel + 1;
    const int asset_flat = asset_filters * asset_rows * asset_out_cols;
    const int ctx_out_cols = n_context_lags - context_kernel + 1;
    const int ctx_flat = context_filters * n_context_rows * ctx_out_cols;
    return {
        {"asset_conv_w", Shape(asset_filters, asset_kernel)},
        {"asset_conv_b", Shape(asset_filters)},
        {"asset_dense_w", Shape(asset_flat, asset_hidden)},
        {"asset_dense_b", Shape(asset_hidden)},
        {"context_conv_w", Shape(context_filters, context_kernel)},
        {"context_conv_b", Shape(context_filters)},
        {"context_dense_w", Shape(ctx_flat, context_hidden)},
        {"context_dense_b", Shape(context_hidden)},
        {"merge_w", Shape(asset_hidden + context_hidden, merge_hidden)},
        {"merge_b", Shape(merge_hidden)},
        {"weights_head_w", Shape(merge_hidden, n_strategies)},
        {"weights_head_b", Shape(n_strategies)},
        {"leverage_head_w", Shape(merge_hidden, 1)},
        {"leverage_head_b", Shape(1)},
    };
}

int NetworkConfig::param_count() const {
    int n = 0;
    for (const auto& [name, shape] : layout()) n += shape.size();
    return n;
}

const Tensor& PolicyParams::by_name(const std::string& name) const {
    for (const auto& [n, t] : arrays)
        if (n == name) return t;
    throw ContractError("no parameter array named '" + name + "'");
}

int PolicyParams::total_size() const {
    int n = 0;
    for (const auto& [name, t] : arrays) n += t.size();
    return n;
}

Eigen::VectorXd PolicyParams::flatten() const {
    Eigen::VectorXd flat(total_size());
    int off = 0;
    for (const auto& [name, t] : arrays) {
        flat.segment(off, t.size()) = t.data.matrix();
        off += t.size();
    }
    return flat;
}

bool PolicyParams::is_weight(const std::string& name) {
    return name.size() >= 2 && name.compare(name.size() - 2, 2, "_w") == 0;
}

PolicyParams init_params(const NetworkConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    PolicyParams p;
    p.seed = seed;
    for (const auto& [name, shape] : config.layout()) {
        Tensor t = Tensor::zeros(shape);
        const bool context_arm = name.rfind("context_", 0) == 0;
        if (PolicyParams::is_weight(name) && (config.use_context || !context_arm)) {
            // Fan-in: inputs feeding each output — kernel width for conv
            // banks [filters x k], input width for dense layers [in x out].
            const bool is_conv = name.find("_conv_") != std::string::npos;
            const int fan_in = is_conv ? shape.dim[1] : shape.dim[0];
            const double sd = 1.0 / std::sqrt(static_cast<double>(fan_in));
            for (int i = 0; i < t.size(); ++i) t.data[i] = sd * normal(rng);
        }
        p.arrays.emplace_back(name, std::move(t));
    }
    return p;
}

namespace {

NodeId activation_node(Tape& t, NodeId x, const std::string& tag) {
    if (tag == "tanh") return tanh_op(t, x);
    return relu(t, x);
}

NodeId branch(Tape& t, const Eigen::MatrixXd& plane, NodeId conv_w, NodeId conv_b,
              NodeId dense_w, NodeId dense_b, const std::string& act) {
    NodeId in = leaf(t, Tensor::from_matrix(plane));
    NodeId conv = activation_node(t, conv_rowwise(t, in, conv_w, conv_b), act);
    NodeId hidden = dense(t, flatten(t, conv), dense_w, dense_b);
    return activation_node(t, hidden, act);
}

}  // namespace

std::vector<NodeId> make_leaves(Tape& t, const PolicyParams& params) {
    std::vector<NodeId> leaves;
    leaves.reserve(params.arrays.size());
    for (const auto& [name, tensor] : params.arrays) {
        if (!tensor.all_finite())
            throw NumericError("non-finite parameter array '" + name + "'");
        leaves.push_back(leaf(t, tensor));
    }
    return leaves;
}

std::vector<NodeId> slice_leaves(Tape& t, NodeId flat, const NetworkConfig& config) {
    std::vector<NodeId> leaves;
    int off = 0;
    for (const auto& [name, shape] : config.layout()) {
        leaves.push_back(slice(t, flat, off, shape));
        off += shape.size();
    }
    if (t.value(flat).size() != off)
        throw ShapeError("slice_leaves: flat vector size " +
                         std::to_string(t.value(flat).size()) + " != parameter count " +
                         std::to_string(off));
    return leaves;
}

DecisionNodes forward_nodes(Tape& t, const std::vector<NodeId>& leaves,
                            const NetworkConfig& config, const ObservationBatch& obs) {
    const auto layout = config.layout();
    if (leaves.size() != layout.size())
        throw ContractError("forward: leaf count does not match parameter layout");
    for (size_t i = 0; i < layout.size(); ++i)
        if (!(t.value(leaves[i]).shape == layout[i].second))
            throw ShapeError("forward: array '" + layout[i].first + "' has shape " +
                             t.value(leaves[i]).shape.str() + ", layout wants " +
                             layout[i].second.str());
    if (obs.a1.rows() != config.n_strategies || obs.a1.cols() != config.n_return_lags ||
        obs.a2.rows() != obs.a1.rows() || obs.a2.cols() != obs.a1.cols())
        throw ShapeError("forward: A1/A2 do not match the configured geometry");
    if (config.use_context &&
        (obs.c.rows() != config.n_context_rows || obs.c.cols() != config.n_context_lags))
        throw ShapeError("forward: C does not match the configured geometry");

    Eigen::MatrixXd plane(2 * config.n_strategies, config.n_return_lags);
    plane << obs.a1, obs.a2;

    // With the context input disabled the branch is fed zeros here, at the
    // single entry point, so no caller can leak context through by mistake.
    Eigen::MatrixXd ctx = config.use_context
                              ? obs.c
                              : Eigen::MatrixXd::Zero(config.n_context_rows,
                                                      config.n_context_lags);

    NodeId asset_h = branch(t, plane, leaves[0], leaves[1], leaves[2], leaves[3],
                            config.activation);
    NodeId ctx_h =
        branch(t, ctx, leaves[4], leaves[5], leaves[6], leaves[7], config.activation);
    NodeId merged = activation_node(
        t, dense(t, concat(t, asset_h, ctx_h), leaves[8], leaves[9]), config.activation);

    DecisionNodes out;
    out.weights = softmax(t, dense(t, merged, leaves[10], leaves[11]));
    out.leverage = scaled_sigmoid(t, dense(t, merged, leaves[12], leaves[13]),
                                  config.leverage_cap);
    return out;
}

AllocationDecision forward(const PolicyParams& params, const NetworkConfig& config,
                           const ObservationBatch& obs) {
    Tape t;
    DecisionNodes nodes = forward_nodes(t, make_leaves(t, params), config, obs);
    AllocationDecision d;
    d.weights = t.value(nodes.weights).to_vector();
    d.leverage = t.value(nodes.leverage).scalar_value();
    d.validate(config.leverage_cap);
    return d;
}

void AllocationDecision::validate(double cap) const {
    if (weights.size() == 0) throw ContractError("decision: empty weights");
    if (!weights.allFinite() || !std::isfinite(leverage))
        throw NumericError("decision: non-finite value");
    if ((weights.array() < 0.0).any()) throw ContractError("decision: negative weight");
    if (std::abs(weights.sum() - 1.0) > 1e-10)
        throw ContractError("decision: weights sum to " + std::to_string(weights.sum()));
    if (leverage < 0.0 || leverage > cap)
        throw ContractError("decision: leverage " + std::to_string(leverage) +
                            " outside [0, " + std::to_string(cap) + "]");
}

NodeId l2_penalty(Tape& t, const std::vector<NodeId>& leaves, const NetworkConfig& config) {
    const auto layout = config.layout();
    if (leaves.size() != layout.size())
        throw ContractError("l2_penalty: leaf count does not match parameter layout");
    NodeId acc{-1};
    for (size_t i = 0; i < layout.size(); ++i) {
        if (!PolicyParams::is_weight(layout[i].first)) continue;
        NodeId sq = reduce_sum(t, mul(t, leaves[i], leaves[i]));
        acc = acc.valid() ? add(t, acc, sq) : sq;
    }
    return scale(t, acc, config.l2_coeff);
}

// --- checkpoints --------------------------------------------------------
// Plain text, one array per record, values in C hexfloat so load is
// bit-exact across runs of the same build.

void PolicyParams::save(const std::string& path) const {
    std::ostringstream out;
    out << "hedgekit-params v1\n";
    out << "seed " << seed << "\n";
    out << "arrays " << arrays.size() << "\n";
    char buf[64];
    for (const auto& [name, t] : arrays) {
        out << name << " " << t.shape.rank;
        for (int i = 0; i < t.shape.rank; ++i) out << " " << t.shape.dim[i];
        out << "\n";
        for (int i = 0; i < t.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%a", t.data[i]);
            out << buf << (i + 1 == t.size() ? "" : " ");
        }
        out << "\n";
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write checkpoint '" + path + "'");
    f << out.str();
    if (!f) throw DataError("checkpoint write failed for '" + path + "'");
}

PolicyParams PolicyParams::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open checkpoint '" + path + "'");
    std::string magic, version;
    f >> magic >> version;
    if (magic != "hedgekit-params" || version != "v1")
        throw DataError("'" + path + "' is not a v1 parameter checkpoint");
    PolicyParams p;
    std::string key;
    size_t count = 0;
    f >> key >> p.seed;
    if (key != "seed") throw DataError("checkpoint '" + path + "': missing seed");
    f >> key >> count;
    if (key != "arrays") throw DataError("checkpoint '" + path + "': missing array count");
    for (size_t a = 0; a < count; ++a) {
        std::string name;
        int rank = 0;
        if (!(f >> name >> rank) || rank < 1 || rank > 3)
            throw DataError("checkpoint '" + path + "': bad array header");
        Shape s;
        s.rank = rank;
        for (int i = 0; i < rank; ++i)
            if (!(f >> s.dim[i]) || s.dim[i] < 1)
                throw DataError("checkpoint '" + path + "': bad shape for '" + name + "'");
        Tensor t = Tensor::zeros(s);
        std::string tok;
        for (int i = 0; i < t.size(); ++i) {
            if (!(f >> tok)) throw DataError("checkpoint '" + path + "': truncated values");
            char* end = nullptr;
            t.data[i] = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size())
                throw DataError("checkpoint '" + path + "': bad value '" + tok + "'");
        }
        p.arrays.emplace_back(name, std::move(t));
    }
    return p;
}

}  // namespace hedge
