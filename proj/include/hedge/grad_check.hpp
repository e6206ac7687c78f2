#pragma once

#include <functional>

#include "hedge/tape.hpp"

namespace hedge {

// Builds a scalar loss from a single 1-D input leaf. Multi-tensor functions
// are checked by packing their inputs into one flat vector and slicing it
// apart inside the builder.
using ScalarFn = std::function<NodeId(Tape&, NodeId)>;

struct GradCheckReport {
    double max_rel_err = 0.0;
    int worst_index = -1;
    double analytic = 0.0;  // gradient at the worst coordinate
    double numeric = 0.0;
};

// Central-difference gradient check: compares the tape gradient of f at
// `point` against (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) per
// coordinate. Relative error uses max(|analytic|, |numeric|, 1e-8) as the
// denominator. eps must be in (0, 1e-2].
GradCheckReport grad_check(const ScalarFn& f, const Eigen::VectorXd& point, double eps);

}  // namespace hedge
