#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <vector>

#include <Eigen/Core>

namespace fracvisc {

/// One row of a direction-number table in the usual "d s a m_i" layout:
/// dimension index (>= 2), primitive-polynomial degree s, encoded inner
/// polynomial coefficients a, and the s initial direction integers m_1..m_s
/// (each odd and below 2^j). Dimension 1 needs no row.
struct SobolDirectionRow {
    int dimension = 0;
    int degree = 0;
    std::uint32_t poly = 0;  // "a" column
    std::vector<std::uint32_t> m;
};

/// Parses a direction table ("d s a m_i" header then one row per dimension).
/// Throws std::invalid_argument on malformed rows.
std::vector<SobolDirectionRow> parse_direction_table(std::istream& in);

/// The direction table compiled into the library; identical to the bundled
/// plain-text asset data/sobol_directions.txt.
const std::vector<SobolDirectionRow>& builtin_direction_table();

/// Highest dimension the built-in table supports.
int provisioned_dimensions();

/// Low-discrepancy Sobol' sequence generator (32-bit direction numbers,
/// Gray-code ordering). Point 0 is the origin; the first non-zero coordinate
/// values in every dimension are 0.5, 0.75, 0.25, ...
///
/// With a scramble seed the generator applies a seeded digital shift (a
/// per-dimension XOR mask), which preserves the net structure while
/// randomizing point locations.
class SobolSequence {
  public:
    static constexpr int kBits = 32;

    explicit SobolSequence(int dimensions);
    SobolSequence(int dimensions, std::uint64_t scramble_seed);
    SobolSequence(int dimensions, const std::vector<SobolDirectionRow>& table);

    int dimensions() const { return static_cast<int>(state_.size()); }

    /// Writes the next point into `point` (length >= dimensions()).
    void next(double* point);

    /// The next n points as an n x dimensions matrix.
    Eigen::MatrixXd take(long n);

  private:
    void init(int dims, const std::vector<SobolDirectionRow>& table);

    std::vector<std::array<std::uint32_t, kBits>> directions_;
    std::vector<std::uint32_t> state_;
    std::vector<std::uint32_t> shift_;
    std::uint64_t index_ = 0;
};

/// First n points of the k-dimensional Sobol' sequence, entries in [0, 1).
Eigen::MatrixXd sobol_points(long n, int k);

/// Scrambled variant (seeded digital shift).
Eigen::MatrixXd sobol_points(long n, int k, std::uint64_t scramble_seed);

}  // namespace fracvisc
