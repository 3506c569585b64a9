#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracvisc/model.hpp"
#include "fracvisc/parameters.hpp"

namespace fracvisc {

/// Which scalar response a sensitivity index refers to.
enum class ModulusOutput { Storage, Loss, ComplexMagnitude };

std::string to_string(ModulusOutput output);
ModulusOutput modulus_output_from_string(const std::string& name);

/// Index values for one (output, parameter) pair over a shifted-frequency
/// grid. The grid must be strictly ascending and positive.
struct SensitivityCurve {
    Eigen::ArrayXd grid;
    Eigen::ArrayXd values;
    std::string parameter;
    std::string output;
};

enum class NormKind { L1, L2, Linf };

/// Analytic partial derivatives of the model moduli with respect to every
/// canonical parameter, evaluated over a grid. Row i of the derivative
/// arrays corresponds to parameter_names(m.kind)[i].
struct ModelPartials {
    ModulusCurves value;
    Eigen::ArrayXXd d_storage;  // parameters x grid
    Eigen::ArrayXXd d_loss;     // parameters x grid
};

ModelPartials model_modulus_partials(const FractionalModel& m,
                                     const Eigen::ArrayXd& x);

/// Normalized local sensitivity (elasticity) indices of the chosen output at
/// a single shifted frequency, one entry per canonical parameter:
///
///   S_i = (q_i / y) dy/dq_i                    for E' and E''
///   S_i = (q_i / |E*|) sqrt((dE'/dq_i)^2 + (dE''/dq_i)^2)   for |E*|
///
/// Parameters whose value is zero get index 0 from the q_i prefactor.
/// Throws std::domain_error if the selected output vanishes at (m, x).
Eigen::VectorXd local_indices(const FractionalModel& m, double x,
                              ModulusOutput output);

/// Same indices over a whole grid; rows follow the canonical parameter order.
Eigen::ArrayXXd local_index_curves(const FractionalModel& m,
                                   const Eigen::ArrayXd& grid,
                                   ModulusOutput output);

/// Monte Carlo average of the local indices under joint uniform sampling of
/// all parameters from their ranges.
struct McAveragedIndices {
    std::vector<SensitivityCurve> mean;    // one per canonical parameter
    std::vector<SensitivityCurve> stddev;  // sample standard deviation
    long rejected_draws = 0;               // draws that failed and were redrawn
};

/// Draws n_samples joint parameter vectors (uniform per range), evaluates the
/// local index curves for each and reduces to per-parameter mean/std curves.
/// Deterministic for a fixed seed, independently of the thread count.
McAveragedIndices mc_average_indices(const FractionalModel& baseline,
                                     const ParamRanges& ranges, int n_samples,
                                     const Eigen::ArrayXd& grid,
                                     ModulusOutput output, std::uint64_t seed,
                                     int threads = 1);

/// Norms of an index curve against the natural-log frequency measure,
/// evaluated with the trapezoidal rule:
///   L1   = integral |S| d ln x
///   L2   = sqrt(integral S^2 d ln x)
///   Linf = max |S|
/// A constant curve of value c spanning D decades therefore has
/// L1 = c D ln 10. L1/L2 require at least two grid points.
double index_norm(const SensitivityCurve& curve, NormKind kind);

}  // namespace fracvisc
