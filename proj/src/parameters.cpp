#include "fracvisc/parameters.hpp"

#include <stdexcept>

namespace fracvisc {

std::vector<std::string> parameter_names(ModelKind kind) {
    if (kind == ModelKind::FmmFmg)
        return {"E_c1", "tau_c1", "alpha1", "beta1", "E_c2", "tau_c2", "alpha2"};
    return {"E_c1", "tau_c1", "alpha1", "E_c2", "tau_c2", "alpha2"};
}

int parameter_count(ModelKind kind) {
    return kind == ModelKind::FmmFmg ? 7 : 6;
}

Eigen::VectorXd to_parameter_vector(const FractionalModel& m) {
    Eigen::VectorXd q(parameter_count(m.kind));
    int i = 0;
    q[i++] = m.branch1.E_c;
    q[i++] = m.branch1.tau_c;
    q[i++] = m.branch1.alpha;
    if (m.kind == ModelKind::FmmFmg) q[i++] = m.branch1.beta;
    q[i++] = m.branch2.E_c;
    q[i++] = m.branch2.tau_c;
    q[i++] = m.branch2.alpha;
    return q;
}

FractionalModel from_parameter_vector(ModelKind kind, const Eigen::VectorXd& q,
                                      bool tau2_constrained) {
    if (q.size() != parameter_count(kind))
        throw std::invalid_argument("parameter vector has wrong dimension");
    FractionalModel m;
    m.kind = kind;
    m.tau2_constrained = tau2_constrained;
    int i = 0;
    m.branch1.E_c = q[i++];
    m.branch1.tau_c = q[i++];
    m.branch1.alpha = q[i++];
    m.branch1.beta = kind == ModelKind::FmmFmg ? q[i++] : 0.0;
    m.branch2.E_c = q[i++];
    m.branch2.tau_c = q[i++];
    m.branch2.alpha = q[i++];
    m.branch2.beta = 0.0;
    return m;
}

ParamRanges ranges_around(const FractionalModel& m, double rel_std) {
    if (!(rel_std >= 0.0))
        throw std::invalid_argument("relative standard deviation must be >= 0");
    ParamRanges r;
    r.names = parameter_names(m.kind);
    r.mean = to_parameter_vector(m);
    const double half_width = std::sqrt(3.0) * rel_std;
    r.lower = r.mean * (1.0 - half_width);
    r.upper = r.mean * (1.0 + half_width);
    return r;
}

ParamRanges ranges_from_bounds(ModelKind kind, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper) {
    const int k = parameter_count(kind);
    if (lower.size() != k || upper.size() != k)
        throw std::invalid_argument("range bounds have wrong dimension");
    if ((lower.array() > upper.array()).any())
        throw std::invalid_argument("range lower bound exceeds upper bound");
    ParamRanges r;
    r.names = parameter_names(kind);
    r.lower = lower;
    r.upper = upper;
    r.mean = 0.5 * (lower + upper);
    return r;
}

}  // namespace fracvisc
