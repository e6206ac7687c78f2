#include "hedge/tape.hpp"

#include <cmath>

namespace hedge {

namespace debug {
bool corrupt_mul_backward = false;
}  // namespace debug

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ShapeError(msg);
}

// Broadcast rule for elementwise binaries: identical shapes, or one side
// scalar. Returns the output shape.
Shape binary_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape == b.shape) return a.shape;
    if (a.is_scalar()) return b.shape;
    if (b.is_scalar()) return a.shape;
    throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape.str() + " and " +
                     b.shape.str());
}

NodeId push_binary(Tape& t, Op op, NodeId a, NodeId b) {
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    Node n;
    n.op = op;
    n.in0 = a.v;
    n.in1 = b.v;
    n.value = Tensor::zeros(binary_shape("elementwise", va, vb));
    const auto& x = va.data;
    const auto& y = vb.data;
    auto& out = n.value.data;
    const bool as = va.is_scalar(), bs = vb.is_scalar();
    switch (op) {
        case Op::Add:
            out = as ? (x[0] + y).eval() : (bs ? (x + y[0]).eval() : (x + y).eval());
            break;
        case Op::Sub:
            out = as ? (x[0] - y).eval() : (bs ? (x - y[0]).eval() : (x - y).eval());
            break;
        case Op::Mul:
            out = as ? (x[0] * y).eval() : (bs ? (x * y[0]).eval() : (x * y).eval());
            break;
        case Op::Div:
            out = as ? (x[0] / y).eval() : (bs ? (x / y[0]).eval() : (x / y).eval());
            break;
        default:
            throw ContractError("push_binary: not a binary op");
    }
    return t.push(std::move(n));
}

}  // namespace

NodeId leaf(Tape& t, Tensor v) {
    if (v.size() == 0) throw ShapeError("leaf: empty tensor");
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(v);
    return t.push(std::move(n));
}

NodeId add(Tape& t, NodeId a, NodeId b) { return push_binary(t, Op::Add, a, b); }
NodeId sub(Tape& t, NodeId a, NodeId b) { return push_binary(t, Op::Sub, a, b); }
NodeId mul(Tape& t, NodeId a, NodeId b) { return push_binary(t, Op::Mul, a, b); }
NodeId div(Tape& t, NodeId a, NodeId b) { return push_binary(t, Op::Div, a, b); }

NodeId neg(Tape& t, NodeId a) {
    Node n;
    n.op = Op::Neg;
    n.in0 = a.v;
    n.value = t.value(a);
    n.value.data = -n.value.data;
    return t.push(std::move(n));
}

NodeId relu(Tape& t, NodeId a) {
    Node n;
    n.op = Op::Relu;
    n.in0 = a.v;
    n.value = t.value(a);
    n.value.data = n.value.data.max(0.0);
    return t.push(std::move(n));
}

NodeId tanh_op(Tape& t, NodeId a) {
    Node n;
    n.op = Op::Tanh;
    n.in0 = a.v;
    n.value = t.value(a);
    n.value.data = n.value.data.tanh();
    return t.push(std::move(n));
}

NodeId scale(Tape& t, NodeId a, double s) {
    Node n;
    n.op = Op::Scale;
    n.in0 = a.v;
    n.aux = s;
    n.value = t.value(a);
    n.value.data *= s;
    return t.push(std::move(n));
}

NodeId dense(Tape& t, NodeId x, NodeId w, NodeId b) {
    const Tensor& vx = t.value(x);
    const Tensor& vw = t.value(w);
    const Tensor& vb = t.value(b);
    require(vx.shape.rank == 1, "dense: input must be rank 1, got " + vx.shape.str());
    require(vw.shape.rank == 2, "dense: weights must be rank 2, got " + vw.shape.str());
    require(vb.shape.rank == 1, "dense: bias must be rank 1, got " + vb.shape.str());
    const int in = vw.shape.dim[0], out = vw.shape.dim[1];
    require(vx.size() == in, "dense: input size " + std::to_string(vx.size()) +
                                 " does not match weights " + vw.shape.str());
    require(vb.size() == out, "dense: bias size " + std::to_string(vb.size()) +
                                  " does not match weights " + vw.shape.str());
    Node n;
    n.op = Op::Dense;
    n.in0 = x.v;
    n.in1 = w.v;
    n.in2 = b.v;
    n.value = Tensor::zeros(Shape(out));
    Eigen::Map<const RowMat> W(vw.data.data(), in, out);
    n.value.data = (W.transpose() * vx.data.matrix()).array() + vb.data;
    return t.push(std::move(n));
}

NodeId conv_rowwise(Tape& t, NodeId input, NodeId kernels, NodeId bias) {
    const Tensor& vi = t.value(input);
    const Tensor& vk = t.value(kernels);
    const Tensor& vb = t.value(bias);
    require(vi.shape.rank == 2, "conv_rowwise: input must be rank 2, got " + vi.shape.str());
    int nf = 0, k = 0;
    if (vk.shape.rank == 2) {
        nf = vk.shape.dim[0];
        k = vk.shape.dim[1];
    } else if (vk.shape.rank == 3 && vk.shape.dim[1] == 1) {
        nf = vk.shape.dim[0];
        k = vk.shape.dim[2];
    } else {
        throw ShapeError("conv_rowwise: kernels must be [f x k] or [f x 1 x k], got " +
                         vk.shape.str());
    }
    const int rows = vi.shape.dim[0], cols = vi.shape.dim[1];
    require(k >= 1 && k <= cols, "conv_rowwise: kernel width " + std::to_string(k) +
                                     " exceeds input columns " + std::to_string(cols));
    require(vb.shape.rank == 1 && vb.size() == nf,
            "conv_rowwise: bias must be rank 1 of size " + std::to_string(nf));
    const int oc = cols - k + 1;
    Node n;
    n.op = Op::ConvRow;
    n.in0 = input.v;
    n.in1 = kernels.v;
    n.in2 = bias.v;
    n.iaux = k;
    n.value = Tensor::zeros(Shape(nf, rows, oc));
    for (int f = 0; f < nf; ++f)
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < oc; ++c) {
                double acc = vb.data[f];
                for (int j = 0; j < k; ++j) acc += vi(r, c + j) * vk.data[f * k + j];
                n.value(f, r, c) = acc;
            }
    return t.push(std::move(n));
}

NodeId softmax(Tape& t, NodeId a) {
    const Tensor& va = t.value(a);
    require(va.shape.rank == 1, "softmax: input must be rank 1, got " + va.shape.str());
    if (!va.all_finite()) throw NumericError("softmax: non-finite input");
    Node n;
    n.op = Op::Softmax;
    n.in0 = a.v;
    n.value = Tensor::zeros(va.shape);
    const double m = va.data.maxCoeff();
    n.value.data = (va.data - m).exp();
    n.value.data /= n.value.data.sum();
    return t.push(std::move(n));
}

NodeId scaled_sigmoid(Tape& t, NodeId a, double cap) {
    if (!(cap > 0.0)) throw ConfigError("scaled_sigmoid: cap must be positive");
    const Tensor& va = t.value(a);
    require(va.is_scalar(), "scaled_sigmoid: input must be scalar, got " + va.shape.str());
    Node n;
    n.op = Op::ScaledSigmoid;
    n.in0 = a.v;
    n.aux = cap;
    n.value = Tensor::zeros(Shape(1));
    const double x = va.data[0];
    double s = 1.0 / (1.0 + std::exp(-x));
    // Keep the output strictly inside (0, cap): in double precision the
    // sigmoid rounds to exactly 0 or 1 once |x| > ~37, which would let the
    // leverage hit its bounds.
    s = std::min(std::max(s, 1e-12), 1.0 - 1e-12);
    n.value.data[0] = cap * s;
    return t.push(std::move(n));
}

namespace {

NodeId push_reduction(Tape& t, Op op, NodeId a) {
    const Tensor& va = t.value(a);
    if (va.size() == 0) throw DomainError("reduction: empty input");
    Node n;
    n.op = op;
    n.in0 = a.v;
    n.value = Tensor::zeros(Shape(1));
    const auto& x = va.data;
    switch (op) {
        case Op::Sum:
            n.value.data[0] = x.sum();
            break;
        case Op::Mean:
            n.value.data[0] = x.mean();
            break;
        case Op::Std: {
            if (va.size() < 2) throw DomainError("std: needs at least two elements");
            const double m = x.mean();
            n.aux = m;  // cached for backward
            n.value.data[0] = std::sqrt((x - m).square().sum() / x.size());
            break;
        }
        case Op::Min: {
            int i = 0;
            n.value.data[0] = x.minCoeff(&i);
            n.iaux = i;
            break;
        }
        case Op::Max: {
            int i = 0;
            n.value.data[0] = x.maxCoeff(&i);
            n.iaux = i;
            break;
        }
        default:
            throw ContractError("push_reduction: not a reduction");
    }
    return t.push(std::move(n));
}

}  // namespace

NodeId reduce_sum(Tape& t, NodeId a) { return push_reduction(t, Op::Sum, a); }
NodeId reduce_mean(Tape& t, NodeId a) { return push_reduction(t, Op::Mean, a); }
NodeId reduce_std(Tape& t, NodeId a) { return push_reduction(t, Op::Std, a); }
NodeId reduce_min(Tape& t, NodeId a) { return push_reduction(t, Op::Min, a); }
NodeId reduce_max(Tape& t, NodeId a) { return push_reduction(t, Op::Max, a); }

NodeId concat(Tape& t, NodeId a, NodeId b) {
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    require(va.shape.rank == 1 && vb.shape.rank == 1, "concat: inputs must be rank 1");
    Node n;
    n.op = Op::Concat;
    n.in0 = a.v;
    n.in1 = b.v;
    n.value = Tensor::zeros(Shape(va.size() + vb.size()));
    n.value.data << va.data, vb.data;
    return t.push(std::move(n));
}

NodeId reshape(Tape& t, NodeId a, const Shape& s) {
    const Tensor& va = t.value(a);
    require(va.size() == s.size(), "reshape: size mismatch " + va.shape.str() + " -> " + s.str());
    Node n;
    n.op = Op::Reshape;
    n.in0 = a.v;
    n.value = va;
    n.value.shape = s;
    return t.push(std::move(n));
}

NodeId flatten(Tape& t, NodeId a) { return reshape(t, a, Shape(t.value(a).size())); }

NodeId slice(Tape& t, NodeId a, int offset, const Shape& s) {
    const Tensor& va = t.value(a);
    require(offset >= 0 && offset + s.size() <= va.size(),
            "slice: range [" + std::to_string(offset) + ", " +
                std::to_string(offset + s.size()) + ") outside input of size " +
                std::to_string(va.size()));
    Node n;
    n.op = Op::Slice;
    n.in0 = a.v;
    n.iaux = offset;
    n.value = Tensor::zeros(s);
    n.value.data = va.data.segment(offset, s.size());
    return t.push(std::move(n));
}

NodeId gather(Tape& t, NodeId a, std::vector<int> idx) {
    const Tensor& va = t.value(a);
    require(va.shape.rank == 1, "gather: input must be rank 1");
    if (idx.empty()) throw DomainError("gather: empty index list");
    for (int i : idx)
        if (i < 0 || i >= va.size()) throw ShapeError("gather: index out of range");
    Node n;
    n.op = Op::Gather;
    n.in0 = a.v;
    n.value = Tensor::zeros(Shape(static_cast<int>(idx.size())));
    for (size_t i = 0; i < idx.size(); ++i) n.value.data[i] = va.data[idx[i]];
    n.idx = std::move(idx);
    return t.push(std::move(n));
}

NodeId stack(Tape& t, const std::vector<NodeId>& scalars) {
    if (scalars.empty()) throw DomainError("stack: empty input list");
    Node n;
    n.op = Op::Stack;
    n.value = Tensor::zeros(Shape(static_cast<int>(scalars.size())));
    n.idx.reserve(scalars.size());
    for (size_t i = 0; i < scalars.size(); ++i) {
        const Tensor& v = t.value(scalars[i]);
        require(v.is_scalar(), "stack: all inputs must be scalars");
        n.value.data[i] = v.data[0];
        n.idx.push_back(scalars[i].v);
    }
    return t.push(std::move(n));
}

void Tape::backward(NodeId loss) {
    if (swept_) throw ContractError("backward: called twice without zero_grads()");
    const Node& ln = at(loss);
    if (!ln.value.is_scalar())
        throw ContractError("backward: loss must be scalar, got " + ln.value.shape.str());
    swept_ = true;
    at(loss).grad.data[0] = 1.0;

    for (int i = size() - 1; i >= 0; --i) {
        Node& n = nodes_[i];
        const auto& g = n.grad.data;
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Add: {
                auto& ga = nodes_[n.in0].grad.data;
                auto& gb = nodes_[n.in1].grad.data;
                if (ga.size() == 1) ga[0] += g.sum(); else ga += g;
                if (gb.size() == 1) gb[0] += g.sum(); else gb += g;
                break;
            }
            case Op::Sub: {
                auto& ga = nodes_[n.in0].grad.data;
                auto& gb = nodes_[n.in1].grad.data;
                if (ga.size() == 1) ga[0] += g.sum(); else ga += g;
                if (gb.size() == 1) gb[0] -= g.sum(); else gb -= g;
                break;
            }
            case Op::Mul: {
                Node& a = nodes_[n.in0];
                Node& b = nodes_[n.in1];
                const double s = debug::corrupt_mul_backward ? -1.0 : 1.0;
                if (a.value.is_scalar() && !b.value.is_scalar()) {
                    a.grad.data[0] += s * (g * b.value.data).sum();
                    b.grad.data += s * g * a.value.data[0];
                } else if (b.value.is_scalar() && !a.value.is_scalar()) {
                    b.grad.data[0] += s * (g * a.value.data).sum();
                    a.grad.data += s * g * b.value.data[0];
                } else {
                    a.grad.data += s * g * b.value.data;
                    b.grad.data += s * g * a.value.data;
                }
                break;
            }
            case Op::Div: {
                // out = a / b; d/da = 1/b, d/db = -a/b^2 = -out/b
                Node& a = nodes_[n.in0];
                Node& b = nodes_[n.in1];
                if (a.value.is_scalar() && !b.value.is_scalar()) {
                    a.grad.data[0] += (g / b.value.data).sum();
                    b.grad.data += -g * n.value.data / b.value.data;
                } else if (b.value.is_scalar() && !a.value.is_scalar()) {
                    a.grad.data += g / b.value.data[0];
                    b.grad.data[0] += (-g * n.value.data).sum() / b.value.data[0];
                } else {
                    a.grad.data += g / b.value.data;
                    b.grad.data += -g * n.value.data / b.value.data;
                }
                break;
            }
            case Op::Neg:
                nodes_[n.in0].grad.data -= g;
                break;
            case Op::Relu: {
                Node& a = nodes_[n.in0];
                nodes_[n.in0].grad.data += g * (a.value.data > 0.0).cast<double>();
                break;
            }
            case Op::Tanh:
                nodes_[n.in0].grad.data += g * (1.0 - n.value.data.square());
                break;
            case Op::Scale:
                nodes_[n.in0].grad.data += g * n.aux;
                break;
            case Op::Dense: {
                Node& x = nodes_[n.in0];
                Node& w = nodes_[n.in1];
                Node& b = nodes_[n.in2];
                const int in = w.value.shape.dim[0], out = w.value.shape.dim[1];
                Eigen::Map<const RowMat> W(w.value.data.data(), in, out);
                Eigen::Map<RowMat> gW(w.grad.data.data(), in, out);
                x.grad.data.matrix() += W * g.matrix();
                gW += x.value.data.matrix() * g.matrix().transpose();
                b.grad.data += g;
                break;
            }
            case Op::ConvRow: {
                Node& in = nodes_[n.in0];
                Node& kr = nodes_[n.in1];
                Node& bs = nodes_[n.in2];
                const int k = n.iaux;
                const int nf = n.value.shape.dim[0];
                const int rows = n.value.shape.dim[1];
                const int oc = n.value.shape.dim[2];
                for (int f = 0; f < nf; ++f)
                    for (int r = 0; r < rows; ++r)
                        for (int c = 0; c < oc; ++c) {
                            const double go = n.grad(f, r, c);
                            if (go == 0.0) continue;
                            bs.grad.data[f] += go;
                            for (int j = 0; j < k; ++j) {
                                kr.grad.data[f * k + j] += go * in.value(r, c + j);
                                in.grad(r, c + j) += go * kr.value.data[f * k + j];
                            }
                        }
                break;
            }
            case Op::Softmax: {
                // dx_i = y_i * (g_i - sum_j g_j y_j)
                const auto& y = n.value.data;
                const double d = (g * y).sum();
                nodes_[n.in0].grad.data += y * (g - d);
                break;
            }
            case Op::ScaledSigmoid: {
                // y = cap * s  =>  dy/dx = y (cap - y) / cap
                const double y = n.value.data[0];
                nodes_[n.in0].grad.data[0] += g[0] * y * (n.aux - y) / n.aux;
                break;
            }
            case Op::Sum:
                nodes_[n.in0].grad.data += g[0];
                break;
            case Op::Mean:
                nodes_[n.in0].grad.data += g[0] / nodes_[n.in0].value.size();
                break;
            case Op::Std: {
                // d sigma / dx_i = (x_i - mu) / (n sigma); zero when sigma = 0
                Node& a = nodes_[n.in0];
                const double sigma = n.value.data[0];
                if (sigma > 0.0)
                    a.grad.data += g[0] * (a.value.data - n.aux) / (a.value.size() * sigma);
                break;
            }
            case Op::Min:
            case Op::Max:
                nodes_[n.in0].grad.data[n.iaux] += g[0];
                break;
            case Op::Concat: {
                Node& a = nodes_[n.in0];
                Node& b = nodes_[n.in1];
                a.grad.data += g.head(a.value.size());
                b.grad.data += g.tail(b.value.size());
                break;
            }
            case Op::Reshape:
                nodes_[n.in0].grad.data += g;
                break;
            case Op::Slice:
                nodes_[n.in0].grad.data.segment(n.iaux, n.value.size()) += g;
                break;
            case Op::Gather: {
                Node& a = nodes_[n.in0];
                for (size_t j = 0; j < n.idx.size(); ++j) a.grad.data[n.idx[j]] += g[j];
                break;
            }
            case Op::Stack:
                for (size_t j = 0; j < n.idx.size(); ++j) nodes_[n.idx[j]].grad.data[0] += g[j];
                break;
        }
    }
}

}  // namespace hedge
