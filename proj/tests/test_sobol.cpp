#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

#include "fracvisc/rng.hpp"
#include "fracvisc/sobol.hpp"

using namespace fracvisc;

namespace {

/// Multiplies two GF(2) polynomials modulo `mod` (bit i = coeff of x^i).
std::uint64_t gf2_mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t mod,
                          int degree) {
    std::uint64_t r = 0;
    while (b) {
        if (b & 1u) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a >> degree & 1u) a ^= mod;
    }
    return r;
}

/// x^n mod p over GF(2).
std::uint64_t gf2_pow_x(std::uint64_t n, std::uint64_t mod, int degree) {
    std::uint64_t result = 1, base = 2;  // the polynomial "x"
    while (n) {
        if (n & 1u) result = gf2_mul_mod(result, base, mod, degree);
        base = gf2_mul_mod(base, base, mod, degree);
        n >>= 1;
    }
    return result;
}

/// Primitivity of x^s + (encoded inner bits) x^... + 1 over GF(2): x must
/// have order exactly 2^s - 1 in the quotient ring.
bool is_primitive(int s, std::uint32_t a) {
    const std::uint64_t poly =
        (std::uint64_t{1} << s) | (std::uint64_t{a} << 1) | 1u;
    const std::uint64_t order = (std::uint64_t{1} << s) - 1;
    if (gf2_pow_x(order, poly, s) != 1) return false;
    // order <= 63 here, so factor by trial division.
    std::uint64_t rest = order;
    for (std::uint64_t q = 2; q <= rest; ++q) {
        if (rest % q) continue;
        if (gf2_pow_x(order / q, poly, s) == 1) return false;
        while (rest % q == 0) rest /= q;
    }
    return true;
}

}  // namespace

TEST_CASE("direction table rows are valid Sobol initializers") {
    const auto& table = builtin_direction_table();
    REQUIRE(provisioned_dimensions() >= 16);
    int expected_dim = 2;
    for (const auto& row : table) {
        CHECK(row.dimension == expected_dim++);
        CHECK(static_cast<int>(row.m.size()) == row.degree);
        for (int j = 0; j < row.degree; ++j) {
            CHECK(row.m[j] % 2 == 1);
            CHECK(row.m[j] < (1u << (j + 1)));
        }
        CHECK_MESSAGE(is_primitive(row.degree, row.poly), "dimension ",
                      row.dimension, " polynomial a=", row.poly);
    }
}

TEST_CASE("embedded table matches the bundled plain-text asset") {
    std::ifstream in(std::string(FRACVISC_SOURCE_DIR) +
                     "/data/sobol_directions.txt");
    REQUIRE(in.good());
    const auto file_table = parse_direction_table(in);
    const auto& builtin = builtin_direction_table();
    REQUIRE(file_table.size() == builtin.size());
    for (std::size_t i = 0; i < builtin.size(); ++i) {
        CHECK(file_table[i].dimension == builtin[i].dimension);
        CHECK(file_table[i].degree == builtin[i].degree);
        CHECK(file_table[i].poly == builtin[i].poly);
        CHECK(file_table[i].m == builtin[i].m);
    }
}

TEST_CASE("first points follow the standard one-dimensional sequence") {
    const Eigen::MatrixXd pts = sobol_points(8, 1);
    CHECK(pts(0, 0) == 0.0);
    CHECK(pts(1, 0) == 0.5);
    CHECK(pts(2, 0) == 0.75);
    CHECK(pts(3, 0) == 0.25);
    CHECK(pts(4, 0) == 0.375);
    CHECK(pts(5, 0) == 0.875);
}

TEST_CASE("all points lie in the half-open unit cube") {
    const Eigen::MatrixXd pts = sobol_points(512, 12);
    CHECK((pts.array() >= 0.0).all());
    CHECK((pts.array() < 1.0).all());
}

TEST_CASE("every dimension stratifies dyadic intervals perfectly") {
    // With 2^m points, each dimension places exactly one point in every
    // interval [j 2^-m, (j+1) 2^-m).
    const int m = 8;
    const long n = 1L << m;
    const int dims = provisioned_dimensions();
    const Eigen::MatrixXd pts = sobol_points(n, dims);
    for (int d = 0; d < dims; ++d) {
        std::set<long> cells;
        for (long i = 0; i < n; ++i)
            cells.insert(static_cast<long>(pts(i, d) * n));
        CHECK_MESSAGE(static_cast<long>(cells.size()) == n, "dimension ",
                      d + 1);
    }
}

TEST_CASE("pairwise projections keep their dyadic structure") {
    // 1024 points on a 32x32 cell grid. Good Sobol pairs fill either all
    // 1024 cells or exactly half of them in a regular pattern; anything
    // below that floor signals duplicated or broken direction numbers.
    const long n = 1024;
    const int dims = 16;
    const Eigen::MatrixXd pts = sobol_points(n, dims);
    for (int a = 0; a < dims; ++a) {
        for (int b = a + 1; b < dims; ++b) {
            std::set<int> cells;
            for (long i = 0; i < n; ++i)
                cells.insert(static_cast<int>(pts(i, a) * 32) * 32 +
                             static_cast<int>(pts(i, b) * 32));
            CHECK_MESSAGE(cells.size() >= 512, "pair ", a + 1, ",", b + 1,
                          " occupied ", cells.size());
        }
    }
}

TEST_CASE("empirical CDF deviation beats a pseudorandom sample") {
    const long n = 1024;
    const int k = 5;
    const Eigen::MatrixXd pts = sobol_points(n, k);
    std::mt19937_64 rng(99);
    Eigen::MatrixXd rnd(n, k);
    for (long i = 0; i < n; ++i)
        for (int d = 0; d < k; ++d) rnd(i, d) = uniform01(rng);

    const auto max_cdf_dev = [n](Eigen::VectorXd col) {
        std::sort(col.data(), col.data() + col.size());
        double worst = 0.0;
        for (long i = 0; i < n; ++i) {
            const double hi = static_cast<double>(i + 1) / n - col[i];
            const double lo = col[i] - static_cast<double>(i) / n;
            worst = std::max({worst, hi, lo});
        }
        return worst;
    };
    for (int d = 0; d < k; ++d)
        CHECK(max_cdf_dev(pts.col(d)) < max_cdf_dev(rnd.col(d)));
}

TEST_CASE("digital-shift scrambling") {
    SUBCASE("seeded and reproducible") {
        const Eigen::MatrixXd a = sobol_points(64, 4, 7u);
        const Eigen::MatrixXd b = sobol_points(64, 4, 7u);
        const Eigen::MatrixXd c = sobol_points(64, 4, 8u);
        CHECK(a == b);
        CHECK(a != c);
        CHECK((a.array() >= 0.0).all());
        CHECK((a.array() < 1.0).all());
    }

    SUBCASE("preserves dyadic stratification") {
        const long n = 256;
        const Eigen::MatrixXd pts = sobol_points(n, 6, 1234u);
        for (int d = 0; d < 6; ++d) {
            std::set<long> cells;
            for (long i = 0; i < n; ++i)
                cells.insert(static_cast<long>(pts(i, d) * n));
            CHECK(static_cast<long>(cells.size()) == n);
        }
    }
}

TEST_CASE("dimension limits") {
    CHECK_THROWS_AS(sobol_points(4, 0), std::invalid_argument);
    CHECK_THROWS_AS(sobol_points(4, provisioned_dimensions() + 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sobol_points(0, 3), std::invalid_argument);
    CHECK_NOTHROW(sobol_points(4, 16));
}
