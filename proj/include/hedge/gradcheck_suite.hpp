#pragma once

#include <random>

#include "hedge/grad_check.hpp"

namespace hedge {

// One registered gradient check: a scalar objective, how to draw probe
// points for it, and the finite-difference step suited to its smoothness.
struct GradCheckCase {
    std::string name;
    int dim = 0;
    int n_points = 5;
    ScalarFn fn;
    std::function<Eigen::VectorXd(int, std::mt19937_64&)> gen;
    double eps = 1e-5;
};

// Every differentiable op rule plus the policy-network and episode-reward
// composites; the registry behind the gradient-check command and the
// release gate.
std::vector<GradCheckCase> gradcheck_suite();

}  // namespace hedge
