#include "fracvisc/sobol.hpp"

#include <bit>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fracvisc {

namespace {

// Embedded copy of data/sobol_directions.txt; a unit test keeps the two in
// sync. Dimensions 2-13 carry the standard published initializers. The
// degree-6 rows extend the table to the provisioned dimension count with
// initializers selected by maximizing the worst pairwise dyadic-cell
// coverage against all lower dimensions (1024 points, 2^a x 2^b shapes).
constexpr const char* kDirectionTable = R"(d s a m_i
2 1 0 1
3 2 1 1 3
4 3 1 1 3 1
5 3 2 1 1 1
6 4 1 1 1 3 3
7 4 4 1 3 5 13
8 5 2 1 1 5 5 17
9 5 4 1 1 5 5 5
10 5 7 1 1 7 11 19
11 5 11 1 1 5 1 1
12 5 13 1 1 1 3 11
13 5 14 1 3 5 5 31
14 6 1 1 1 1 1 1 49
15 6 13 1 1 1 1 1 11
16 6 16 1 1 1 1 3 3
17 6 19 1 1 1 1 3 33
18 6 22 1 1 1 1 11 19
19 6 25 1 1 1 1 3 1
)";

}  // namespace

std::vector<SobolDirectionRow> parse_direction_table(std::istream& in) {
    std::vector<SobolDirectionRow> rows;
    std::string line;
    bool header_seen = false;
    int expected_dim = 2;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;  // "d s a m_i"
            continue;
        }
        std::istringstream ls(line);
        SobolDirectionRow row;
        if (!(ls >> row.dimension >> row.degree >> row.poly))
            throw std::invalid_argument("malformed direction-table row: " + line);
        std::uint32_t m;
        while (ls >> m) row.m.push_back(m);
        if (row.dimension != expected_dim)
            throw std::invalid_argument("direction-table dimensions must be contiguous from 2");
        if (row.degree < 1 || static_cast<int>(row.m.size()) != row.degree)
            throw std::invalid_argument("direction-table row needs s initializers");
        for (int j = 0; j < row.degree; ++j) {
            if (row.m[j] % 2 == 0 || row.m[j] >= (1u << (j + 1)))
                throw std::invalid_argument("direction integers must be odd and below 2^j");
        }
        rows.push_back(std::move(row));
        ++expected_dim;
    }
    if (rows.empty())
        throw std::invalid_argument("direction table has no rows");
    return rows;
}

const std::vector<SobolDirectionRow>& builtin_direction_table() {
    static const std::vector<SobolDirectionRow> table = [] {
        std::istringstream in(kDirectionTable);
        return parse_direction_table(in);
    }();
    return table;
}

int provisioned_dimensions() {
    return static_cast<int>(builtin_direction_table().size()) + 1;
}

SobolSequence::SobolSequence(int dimensions) {
    init(dimensions, builtin_direction_table());
}

SobolSequence::SobolSequence(int dimensions, std::uint64_t scramble_seed) {
    init(dimensions, builtin_direction_table());
    std::mt19937_64 rng(scramble_seed);
    for (auto& s : shift_) s = static_cast<std::uint32_t>(rng() >> 32);
}

SobolSequence::SobolSequence(int dimensions,
                             const std::vector<SobolDirectionRow>& table) {
    init(dimensions, table);
}

void SobolSequence::init(int dims, const std::vector<SobolDirectionRow>& table) {
    if (dims < 1 || dims > static_cast<int>(table.size()) + 1)
        throw std::invalid_argument(
            "Sobol dimension outside the provisioned direction-number range");
    directions_.resize(dims);
    state_.assign(dims, 0u);
    shift_.assign(dims, 0u);

    // Dimension 1: v_j = 2^(32-j).
    for (int j = 0; j < kBits; ++j) directions_[0][j] = 1u << (kBits - 1 - j);

    for (int d = 1; d < dims; ++d) {
        const SobolDirectionRow& row = table[d - 1];
        const int s = row.degree;
        auto& v = directions_[d];
        std::vector<std::uint32_t> m(row.m.begin(), row.m.end());
        m.resize(kBits);
        // Recurrence m_j = 2 a_1 m_{j-1} ^ ... ^ 2^(s-1) a_{s-1} m_{j-s+1}
        //                ^ 2^s m_{j-s} ^ m_{j-s}.
        for (int j = s; j < kBits; ++j) {
            std::uint32_t mj = m[j - s] ^ (m[j - s] << s);
            for (int t = 1; t < s; ++t)
                if ((row.poly >> (s - 1 - t)) & 1u) mj ^= m[j - t] << t;
            m[j] = mj;
        }
        for (int j = 0; j < kBits; ++j) v[j] = m[j] << (kBits - 1 - j);
    }
}

void SobolSequence::next(double* point) {
    if (index_ > 0) {
        // Gray-code step: flip the direction of the lowest zero bit of i-1.
        const std::uint64_t i = index_ - 1;
        const int c = std::countr_one(i);
        if (c >= kBits)
            throw std::length_error("Sobol sequence exhausted its 32-bit index range");
        for (std::size_t d = 0; d < state_.size(); ++d)
            state_[d] ^= directions_[d][c];
    }
    ++index_;
    for (std::size_t d = 0; d < state_.size(); ++d)
        point[d] = static_cast<double>(state_[d] ^ shift_[d]) * 0x1.0p-32;
}

Eigen::MatrixXd SobolSequence::take(long n) {
    if (n < 0) throw std::invalid_argument("negative point count");
    Eigen::MatrixXd pts(n, dimensions());
    std::vector<double> row(dimensions());
    for (long i = 0; i < n; ++i) {
        next(row.data());
        for (int d = 0; d < dimensions(); ++d) pts(i, d) = row[d];
    }
    return pts;
}

Eigen::MatrixXd sobol_points(long n, int k) {
    if (n < 1) throw std::invalid_argument("sobol_points requires n >= 1");
    return SobolSequence(k).take(n);
}

Eigen::MatrixXd sobol_points(long n, int k, std::uint64_t scramble_seed) {
    if (n < 1) throw std::invalid_argument("sobol_points requires n >= 1");
    return SobolSequence(k, scramble_seed).take(n);
}

}  // namespace fracvisc
