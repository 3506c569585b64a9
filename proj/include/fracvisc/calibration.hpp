#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracvisc/dataio.hpp"
#include "fracvisc/model.hpp"
#include "fracvisc/parameters.hpp"

namespace fracvisc {

/// Box bounds for the free (searched) parameters. When the second time-scale
/// is constrained it is recomputed from the other parameters at every
/// evaluation and carries no bound entry.
struct ParamBounds {
    std::vector<std::string> names;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    int size() const { return static_cast<int>(lower.size()); }
};

/// Names of the searched parameters, in canonical order with tau_c2 dropped
/// when constrained (6 for fmm-fmg / 5 for fmg-fmg).
std::vector<std::string> free_parameter_names(ModelKind kind,
                                              bool constrain_tau2);

/// Default search box: E_c1 in [0, 1e4] MPa, E_c2 in [0, 1e3] MPa, time
/// scales in [1e-3, 1e2] s, exponents in [0, 1].
ParamBounds default_bounds(ModelKind kind, bool constrain_tau2);

/// Assembles a model from a free-parameter vector, deriving tau_c2 from the
/// time-scale constraint when requested.
FractionalModel model_from_free_vector(ModelKind kind, const Eigen::VectorXd& q,
                                       bool constrain_tau2);

/// Global-best particle swarm settings. The stopping rule is the fixed
/// iteration budget; per-run seeds are seed + run index.
struct PsoConfig {
    int n_pop = 200;
    int n_iter = 6000;
    int n_runs = 50;
    std::uint64_t seed = 1;
    double inertia = 0.729;
    double cognitive = 1.49445;
    double social = 1.49445;
    double velocity_clamp = 0.2;  ///< max |v| as a fraction of the bound width
};

/// Multi-run fit statistics. Parameter vectors are reported in the full
/// canonical order (a constrained tau_c2 is recomputed per run).
struct FitResult {
    std::vector<std::string> parameter_names;
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
    Eigen::MatrixXd run_parameters;   // n_runs x parameters
    Eigen::VectorXd run_costs;        // final incumbent cost per run
    Eigen::MatrixXd incumbent_trace;  // n_runs x (n_iter + 1), non-increasing
    FractionalModel best;
    double best_cost = 0.0;
    double relative_error = 0.0;
};

/// Weighted sum of squared base-10 log residuals over both moduli:
///   w1 sum (log10 E'_exp/E'_model)^2 + w2 sum (log10 E''_exp/E''_model)^2.
/// Throws std::domain_error when a sample or model value is non-positive.
double cost(const FractionalModel& m, const MasterCurve& data, double w1 = 0.5,
            double w2 = 0.5);

/// cost normalized by w1 sum (log10 E'_exp)^2 + w2 sum (log10 E''_exp)^2;
/// the usual fit-quality number. Throws if the normalizer vanishes.
double relative_error(const FractionalModel& m, const MasterCurve& data,
                      double w1 = 0.5, double w2 = 0.5);

/// Constrained global-best PSO calibration of a two-branch model against a
/// master curve. Each run spends its fixed iteration budget on the swarm and
/// then polishes the incumbent with a short deterministic bounded simplex
/// descent (the swarm finds the valley, the descent finishes it).
/// Deterministic for a fixed (data, bounds, cfg, seed), independently of the
/// thread count; the incumbent cost never increases within a run.
/// Search-space points whose model is invalid or produces a non-positive
/// modulus get +infinity cost.
FitResult fit(const MasterCurve& data, ModelKind kind, const ParamBounds& bounds,
              const PsoConfig& cfg, bool constrain_tau2, double w1 = 0.5,
              double w2 = 0.5, int threads = 1);

}  // namespace fracvisc
