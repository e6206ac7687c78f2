#pragma once

#include <cstdint>

#include "hedge/features.hpp"
#include "hedge/tape.hpp"

namespace hedge {

// Architecture of the dual-input (asset plane + context plane), dual-output
// (weights + leverage) policy network. Observation dimensions are part of
// the config so parameter shapes are a pure function of this struct.
struct NetworkConfig {
    // Observation geometry.
    int n_strategies = 4;    // l
    int n_return_lags = 7;   // |lags| of A1/A2
    int n_context_rows = 5;  // raw context rows + 3 derived
    int n_context_lags = 7;

    // Asset branch: conv over the [A1; A2] plane, then a dense layer.
    int asset_filters = 8;
    int asset_kernel = 3;
    int asset_hidden = 32;

    // Context branch.
    int context_filters = 4;
    int context_kernel = 3;
    int context_hidden = 16;

    int merge_hidden = 32;

    double leverage_cap = 3.0;
    double l2_coeff = 1e-8;
    std::string activation = "relu";  // relu | tanh
    bool use_context = true;          // false: decisions ignore C entirely

    void validate() const;

    // Named parameter arrays in storage order; the single source of truth
    // for initialization, flattening and checkpoints.
    std::vector<std::pair<std::string, Shape>> layout() const;
    int param_count() const;
};

struct PolicyParams {
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, Tensor>> arrays;

    const Tensor& by_name(const std::string& name) const;
    int total_size() const;
    Eigen::VectorXd flatten() const;

    // Weight arrays (named *_w) participate in L2; biases do not.
    static bool is_weight(const std::string& name);

    void save(const std::string& path) const;       // bit-exact text checkpoint
    static PolicyParams load(const std::string& path);
};

// Zero-mean normal weights scaled by 1/sqrt(fan-in); biases zero. With
// use_context=false the context branch is zero-initialized so the merge
// layer sees a dead (and gradient-free) context arm.
PolicyParams init_params(const NetworkConfig& config, std::uint64_t seed);

struct AllocationDecision {
    Eigen::VectorXd weights;
    double leverage = 0.0;

    Eigen::VectorXd exposures() const { return leverage * weights; }
    // Baselines legitimately sit on the boundary (leverage 0 or exactly
    // cap-free 1.0), so the shared validation accepts the closed interval;
    // the policy network itself always lands strictly inside.
    void validate(double cap) const;
};

// Differentiable forward pass. `leaves` must align with params.arrays (one
// tape leaf per array, e.g. from make_leaves or slice_leaves).
struct DecisionNodes {
    NodeId weights;
    NodeId leverage;
};
std::vector<NodeId> make_leaves(Tape& t, const PolicyParams& params);

// Slices one flat parameter vector node into per-array leaves following
// config.layout(); used to gradient-check the whole network as f(theta).
std::vector<NodeId> slice_leaves(Tape& t, NodeId flat, const NetworkConfig& config);

DecisionNodes forward_nodes(Tape& t, const std::vector<NodeId>& leaves,
                            const NetworkConfig& config, const ObservationBatch& obs);

// Convenience evaluation on a scratch tape.
AllocationDecision forward(const PolicyParams& params, const NetworkConfig& config,
                           const ObservationBatch& obs);

// coeff * sum of squared weight entries (biases excluded).
NodeId l2_penalty(Tape& t, const std::vector<NodeId>& leaves, const NetworkConfig& config);

}  // namespace hedge
