#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracvisc/lsa.hpp"
#include "fracvisc/model.hpp"
#include "fracvisc/parameters.hpp"

namespace fracvisc {

/// Cross-sampling matrices for the simultaneous estimation of all first- and
/// total-order indices: two independent N x k blocks A and B plus, for each
/// column i, the matrix A_B^(i) equal to A with column i taken from B.
struct SampleMatrices {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    std::vector<Eigen::MatrixXd> ab;  // ab[i] differs from a in column i only
};

/// Builds the unit-hypercube sample matrices from one 2k-dimensional Sobol'
/// stream (columns 1..k feed A, columns k+1..2k feed B).
SampleMatrices make_sample_matrices(long n, int k, bool scramble = false,
                                    std::uint64_t seed = 0);

/// Variance-based sensitivity estimates per parameter and grid point.
struct SobolResult {
    std::vector<std::string> parameters;
    Eigen::ArrayXd grid;
    Eigen::ArrayXXd first_order;      // parameters x grid
    Eigen::ArrayXXd total_order;      // parameters x grid
    Eigen::ArrayXd variance;          // total output variance per grid point
    std::vector<char> zero_variance;  // flagged grid points (indices forced 0)
    long n_base = 0;
};

/// Model-output function: a full parameter vector (canonical order) mapped to
/// output values over the analysis grid.
using GridEval = std::function<Eigen::ArrayXd(const Eigen::VectorXd&)>;

/// Saltelli-sampled Sobol' indices. Unit rows are mapped affinely onto
/// [lower_i, upper_i]; the total variance comes from the row-wise
/// concatenation of f(A) and f(B); the first-order estimator is
///   S_i  = (1/N) sum_j f(B)_j (f(A_B^(i))_j - f(A)_j) / V
/// and the total-order (Jansen) estimator is
///   S_Ti = (1/(2N)) sum_j (f(A)_j - f(A_B^(i))_j)^2 / V.
///
/// Degenerate ranges are held at their mean, excluded from cross-sampling
/// and reported with S_i = S_Ti = 0. Grid points whose outputs are all equal
/// carry V = 0; their indices are reported as 0 with the zero_variance flag
/// set. Model evaluations total N (k_active + 2) per grid point.
SobolResult saltelli_indices(const GridEval& eval, const ParamRanges& ranges,
                             long n, const Eigen::ArrayXd& grid,
                             bool scramble = false, std::uint64_t seed = 0,
                             int threads = 1);

/// Convenience wrapper binding a fractional model and output channel.
SobolResult model_sobol_indices(const FractionalModel& baseline,
                                const ParamRanges& ranges, long n,
                                const Eigen::ArrayXd& grid,
                                ModulusOutput output, bool scramble = false,
                                std::uint64_t seed = 0, int threads = 1);

}  // namespace fracvisc
