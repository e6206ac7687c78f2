#include "hedge/grad_check.hpp"

#include <cmath>

namespace hedge {

namespace {

double eval(const ScalarFn& f, const Eigen::VectorXd& x) {
    Tape t;
    NodeId in = leaf(t, x);
    NodeId out = f(t, in);
    const Tensor& v = t.value(out);
    if (!v.is_scalar()) throw ContractError("grad_check: function must return a scalar");
    return v.data[0];
}

}  // namespace

GradCheckReport grad_check(const ScalarFn& f, const Eigen::VectorXd& point, double eps) {
    if (!(eps > 0.0 && eps <= 1e-2))
        throw ConfigError("grad_check: eps must be in (0, 1e-2], got " + std::to_string(eps));
    if (point.size() == 0) throw DomainError("grad_check: empty point");

    // Analytic pass.
    Tape t;
    NodeId in = leaf(t, point);
    NodeId out = f(t, in);
    if (!t.value(out).is_scalar())
        throw ContractError("grad_check: function must return a scalar");
    t.backward(out);
    Eigen::VectorXd analytic = t.grad(in).to_vector();

    GradCheckReport rep;
    for (int i = 0; i < point.size(); ++i) {
        Eigen::VectorXd xp = point, xm = point;
        xp[i] += eps;
        xm[i] -= eps;
        const double numeric = (eval(f, xp) - eval(f, xm)) / (2.0 * eps);
        if (!std::isfinite(numeric) || !std::isfinite(analytic[i]))
            throw NumericError("grad_check: non-finite gradient at coordinate " +
                               std::to_string(i));
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
        const double rel = std::abs(analytic[i] - numeric) / denom;
        if (rel > rep.max_rel_err) {
            rep.max_rel_err = rel;
            rep.worst_index = i;
            rep.analytic = analytic[i];
            rep.numeric = numeric;
        }
    }
    return rep;
}

}  // namespace hedge
