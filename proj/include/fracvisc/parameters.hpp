#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracvisc/model.hpp"

namespace fracvisc {

/// Canonical flat ordering of the model parameters:
///   fmm-fmg: E_c1, tau_c1, alpha1, beta1, E_c2, tau_c2, alpha2   (7)
///   fmg-fmg: E_c1, tau_c1, alpha1,        E_c2, tau_c2, alpha2   (6)
/// Sensitivity results, fit statistics and result files all index parameters
/// by this order.
std::vector<std::string> parameter_names(ModelKind kind);

int parameter_count(ModelKind kind);

/// Flatten a model into the canonical order.
Eigen::VectorXd to_parameter_vector(const FractionalModel& m);

/// Rebuild a model from a canonical parameter vector. The structural zero
/// exponents (beta2; beta1 for fmg-fmg) are not part of the vector.
FractionalModel from_parameter_vector(ModelKind kind, const Eigen::VectorXd& q,
                                      bool tau2_constrained = false);

/// Per-parameter uniform variability intervals, in canonical order.
/// Satisfies mu = (lower+upper)/2; a band built from a relative standard
/// deviation s has width upper-lower = 2*sqrt(3)*s*mu, so that the uniform
/// deviate's standard deviation is s*mu. A zero mean collapses to the
/// degenerate point range [0, 0].
struct ParamRanges {
    std::vector<std::string> names;
    Eigen::VectorXd mean;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    int size() const { return static_cast<int>(mean.size()); }
    bool degenerate(int i) const { return lower[i] == upper[i]; }
};

/// Ranges centered on the model's parameter values with standard deviation
/// rel_std * mean (the usual 5% convention by default).
ParamRanges ranges_around(const FractionalModel& m, double rel_std = 0.05);

/// Ranges from explicit bounds; means are the interval midpoints.
ParamRanges ranges_from_bounds(ModelKind kind, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper);

}  // namespace fracvisc
