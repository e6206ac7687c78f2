#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "hedge/errors.hpp"

namespace hedge {

// Dense tensors of rank 1..3 stored as a flat row-major array. This is all
// the structure the policy network needs: vectors (biases, dense
// activations), matrices (dense weights, observation planes) and filter
// banks (filters x rows x cols).
struct Shape {
    int rank = 1;
    std::array<int, 3> dim{1, 1, 1};  // trailing dims stay 1

    Shape() = default;
    explicit Shape(int d0) : rank(1), dim{d0, 1, 1} {}
    Shape(int d0, int d1) : rank(2), dim{d0, d1, 1} {}
    Shape(int d0, int d1, int d2) : rank(3), dim{d0, d1, d2} {}

    int size() const { return dim[0] * dim[1] * dim[2]; }
    bool operator==(const Shape& o) const { return rank == o.rank && dim == o.dim; }
    bool operator!=(const Shape& o) const { return !(*this == o); }

    std::string str() const {
        std::string s = std::to_string(dim[0]);
        for (int i = 1; i < rank; ++i) s += "x" + std::to_string(dim[i]);
        return s;
    }
};

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Tensor {
    Shape shape;
    Eigen::ArrayXd data;  // flat, row-major

    Tensor() : shape(0), data(0) {}
    explicit Tensor(const Shape& s) : shape(s), data(Eigen::ArrayXd::Zero(s.size())) {}

    static Tensor zeros(const Shape& s) { return Tensor(s); }

    static Tensor scalar(double v) {
        Tensor t{Shape(1)};
        t.data[0] = v;
        return t;
    }

    static Tensor from_vector(const Eigen::VectorXd& v) {
        Tensor t{Shape(static_cast<int>(v.size()))};
        t.data = v.array();
        return t;
    }

    static Tensor from_matrix(const Eigen::MatrixXd& m) {
        Tensor t{Shape(static_cast<int>(m.rows()), static_cast<int>(m.cols()))};
        Eigen::Map<RowMat>(t.data.data(), m.rows(), m.cols()) = m;
        return t;
    }

    int size() const { return static_cast<int>(data.size()); }
    bool is_scalar() const { return size() == 1; }

    double scalar_value() const {
        if (!is_scalar()) throw ShapeError("scalar_value: tensor has shape " + shape.str());
        return data[0];
    }

    Eigen::VectorXd to_vector() const { return data.matrix(); }

    Eigen::MatrixXd to_matrix() const {
        if (shape.rank != 2) throw ShapeError("to_matrix: tensor has shape " + shape.str());
        return Eigen::Map<const RowMat>(data.data(), shape.dim[0], shape.dim[1]);
    }

    // Row-major element access.
    double& operator()(int i) { return data[i]; }
    double operator()(int i) const { return data[i]; }
    double& operator()(int i, int j) { return data[i * shape.dim[1] + j]; }
    double operator()(int i, int j) const { return data[i * shape.dim[1] + j]; }
    double& operator()(int f, int i, int j) {
        return data[(f * shape.dim[1] + i) * shape.dim[2] + j];
    }
    double operator()(int f, int i, int j) const {
        return data[(f * shape.dim[1] + i) * shape.dim[2] + j];
    }

    bool all_finite() const { return data.isFinite().all(); }
};

}  // namespace hedge
