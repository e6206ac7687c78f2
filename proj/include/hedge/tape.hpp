#pragma once

#include <vector>

#include "hedge/tensor.hpp"

namespace hedge {

// Reverse-mode automatic differentiation on an append-only tape.
//
// Every operation appends one node holding its forward value and a gradient
// buffer (allocated zeroed at creation). Because nodes are appended in
// creation order, that order is already a topological order of the graph,
// so backward() is a single reverse sweep — no explicit sort needed.
//
// Gradients accumulate with += everywhere, which makes fan-out (one node
// feeding several consumers) correct for free.

enum class Op : unsigned char {
    Leaf,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Relu,
    Tanh,
    Scale,
    Dense,
    ConvRow,
    Softmax,
    ScaledSigmoid,
    Sum,
    Mean,
    Std,
    Min,
    Max,
    Concat,
    Reshape,
    Slice,
    Gather,
    Stack,
};

struct NodeId {
    int v = -1;
    bool valid() const { return v >= 0; }
};

namespace debug {
// Fault-injection switch for the gradient-check command: when set, the
// multiply backward rule flips sign, so a working checker must start
// reporting failures. Only the `gradcheck --mutate` path ever sets it.
extern bool corrupt_mul_backward;
}  // namespace debug

struct Node {
    Op op = Op::Leaf;
    int in0 = -1, in1 = -1, in2 = -1;
    double aux = 0.0;       // scale factor, sigmoid cap, cached mean for Std
    int iaux = 0;           // attaining index for Min/Max, offset for Slice
    std::vector<int> idx;   // Gather indices / Stack input ids
    Tensor value;
    Tensor grad;
};

class Tape {
  public:
    NodeId push(Node&& n) {
        n.grad = Tensor::zeros(n.value.shape);
        nodes_.push_back(std::move(n));
        return NodeId{static_cast<int>(nodes_.size()) - 1};
    }

    Node& at(NodeId id) { return nodes_[check(id)]; }
    const Node& at(NodeId id) const { return nodes_[check(id)]; }

    const Tensor& value(NodeId id) const { return at(id).value; }
    const Tensor& grad(NodeId id) const { return at(id).grad; }

    int size() const { return static_cast<int>(nodes_.size()); }

    // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse creation
    // order. The loss must be scalar. A second call without zero_grads()
    // would silently double-count accumulated gradients, so it is rejected.
    void backward(NodeId loss);

    void zero_grads() {
        for (auto& n : nodes_) n.grad.data.setZero();
        swept_ = false;
    }

    void clear() {
        nodes_.clear();
        swept_ = false;
    }

  private:
    int check(NodeId id) const {
        if (id.v < 0 || id.v >= size()) throw ContractError("tape: node id out of range");
        return id.v;
    }

    std::vector<Node> nodes_;
    bool swept_ = false;
};

// --- graph construction -----------------------------------------------
// Free functions building one node each. Shape rules are checked eagerly
// so a bad graph fails at construction, not inside backward().

NodeId leaf(Tape& t, Tensor v);
inline NodeId leaf(Tape& t, double v) { return leaf(t, Tensor::scalar(v)); }
inline NodeId leaf(Tape& t, const Eigen::VectorXd& v) { return leaf(t, Tensor::from_vector(v)); }

// Elementwise binary ops. Shapes must match exactly, or one side must be a
// scalar (broadcast; the scalar side receives the summed gradient).
NodeId add(Tape& t, NodeId a, NodeId b);
NodeId sub(Tape& t, NodeId a, NodeId b);
NodeId mul(Tape& t, NodeId a, NodeId b);
NodeId div(Tape& t, NodeId a, NodeId b);

NodeId neg(Tape& t, NodeId a);
NodeId relu(Tape& t, NodeId a);  // derivative at 0 is 0
NodeId tanh_op(Tape& t, NodeId a);
NodeId scale(Tape& t, NodeId a, double s);

// y = W^T x + b with x: [n], W: [n x m], b: [m].
NodeId dense(Tape& t, NodeId x, NodeId w, NodeId b);

// Row-wise 1-D convolution, stride 1, no padding, no mixing across rows.
// input: [r x c], kernels: [f x k] (or [f x 1 x k]), bias: [f].
// output: [f x r x (c - k + 1)].
NodeId conv_rowwise(Tape& t, NodeId input, NodeId kernels, NodeId bias);

// Numerically stable softmax over a vector (max subtracted before exp).
NodeId softmax(Tape& t, NodeId a);

// cap * sigmoid(x) for scalar x; output clamped to the open interval
// (0, cap) so downstream leverage stays strictly inside its bounds even
// when the sigmoid saturates in floating point.
NodeId scaled_sigmoid(Tape& t, NodeId a, double cap);

// Reductions to scalars. Std is the population standard deviation
// (1/n variance) and needs at least two elements.
NodeId reduce_sum(Tape& t, NodeId a);
NodeId reduce_mean(Tape& t, NodeId a);
NodeId reduce_std(Tape& t, NodeId a);
NodeId reduce_min(Tape& t, NodeId a);  // gradient routed to first attaining index
NodeId reduce_max(Tape& t, NodeId a);

NodeId concat(Tape& t, NodeId a, NodeId b);  // 1-D concatenation
NodeId reshape(Tape& t, NodeId a, const Shape& s);
NodeId flatten(Tape& t, NodeId a);

// Contiguous sub-range of the flattened input, reshaped to `s`.
NodeId slice(Tape& t, NodeId a, int offset, const Shape& s);

// out[i] = a[idx[i]] for a 1-D input (backward scatters with +=, so
// repeated indices are handled correctly).
NodeId gather(Tape& t, NodeId a, std::vector<int> idx);

// Stacks scalar nodes into one vector node.
NodeId stack(Tape& t, const std::vector<NodeId>& scalars);

// Convenience composites (no new backward rules).
inline NodeId abs_op(Tape& t, NodeId a) { return add(t, relu(t, a), relu(t, neg(t, a))); }
inline NodeId dot(Tape& t, NodeId a, NodeId b) { return reduce_sum(t, mul(t, a, b)); }

}  // namespace hedge
