#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "g2l/errors.hpp"
#include "g2l/geometry.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using g2l::DistanceMatrix;
using g2l::validation_error;

namespace {

DistanceMatrix from_grid(const std::vector<std::vector<double>>& grid) {
    const std::size_t n = grid.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& row : grid) {
        for (double v : row) flat.push_back(v);
    }
    return DistanceMatrix(n, std::move(flat));
}

// Squared-distance grid of a Euclidean point set.
std::vector<std::vector<double>> sq_grid(const std::vector<std::vector<double>>& points) {
    const std::size_t n = points.size();
    std::vector<std::vector<double>> grid(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < points[i].size(); ++c) {
                const double d = points[i][c] - points[j][c];
                acc += d * d;
            }
            grid[i][j] = grid[j][i] = acc;
        }
    }
    return grid;
}

std::vector<std::vector<double>> random_points(std::mt19937_64& rng, std::size_t count,
                                               std::size_t dim) {
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<std::vector<double>> points(count, std::vector<double>(dim));
    for (auto& p : points) {
        for (auto& c : p) c = 10.0 * unit() - 5.0;
    }
    return points;
}

} // namespace

TEST_CASE("cm_matrix borders the squared-distance grid") {
    const auto m = g2l::cm_matrix(from_grid({{0, 9}, {9, 0}}));
    const std::vector<std::vector<double>> expected{{0, 1, 1}, {1, 0, 9}, {1, 9, 0}};
    CHECK(m == expected);

    const auto coincident = g2l::cm_matrix(from_grid({{0, 0}, {0, 0}}));
    const std::vector<std::vector<double>> expected0{{0, 1, 1}, {1, 0, 0}, {1, 0, 0}};
    CHECK(coincident == expected0);
}

TEST_CASE("cm_matrix for the 3-4-5 triangle") {
    // Sides 3, 4, 5 -> squared distances 9, 16, 25; the bordered matrix is
    // one order larger than the input.
    const auto m = g2l::cm_matrix(from_grid({{0, 9, 16}, {9, 0, 25}, {16, 25, 0}}));
    const std::vector<std::vector<double>> expected{
        {0, 1, 1, 1}, {1, 0, 9, 16}, {1, 9, 0, 25}, {1, 16, 25, 0}};
    CHECK(m == expected);
}

TEST_CASE("DistanceMatrix rejects malformed grids") {
    CHECK_THROWS_AS(from_grid({{0, 1}, {2, 0}}), validation_error);      // not symmetric
    CHECK_THROWS_AS(from_grid({{0, -1}, {-1, 0}}), validation_error);    // negative
    CHECK_THROWS_AS(from_grid({{1, 2}, {2, 0}}), validation_error);      // nonzero diagonal
    CHECK_THROWS_AS(DistanceMatrix(1, {0.0}), validation_error);         // too small
    CHECK_THROWS_AS(DistanceMatrix(2, {0.0, 1.0, 1.0}), validation_error); // wrong size
}

TEST_CASE("cm_coefficient matches the closed form") {
    CHECK(g2l::cm_coefficient(1) == 2);
    CHECK(g2l::cm_coefficient(2) == -16);
    CHECK(g2l::cm_coefficient(3) == 288);
    CHECK(g2l::cm_coefficient(4) == -9216);
    CHECK(g2l::cm_coefficient(5) == 460800);

    // Independent evaluation by repeated multiplication in 128-bit.
    for (int d = 1; d <= 11; ++d) {
        __int128 expected = 1;
        for (int i = 1; i <= d; ++i) expected *= 2 * i * i;
        if (d % 2 == 0) expected = -expected;
        CHECK(static_cast<__int128>(g2l::cm_coefficient(d)) == expected);
    }
}

TEST_CASE("cm_coefficient sign alternation and errors") {
    for (int d = 1; d <= 11; ++d) {
        const auto a = g2l::cm_coefficient(d);
        CHECK((d % 2 == 1 ? a > 0 : a < 0));
    }
    CHECK_THROWS_AS(g2l::cm_coefficient(0), validation_error);
    CHECK_THROWS_AS(g2l::cm_coefficient(-3), validation_error);
    CHECK_THROWS_AS(g2l::cm_coefficient(12), validation_error); // exceeds int64
}

TEST_CASE("simplex_content closed forms") {
    SUBCASE("1-simplex content is the distance") {
        const auto res = g2l::simplex_content(from_grid({{0, 9}, {9, 0}}));
        CHECK(res.dimension == 1);
        CHECK(res.determinant == doctest::Approx(18.0));
        CHECK(res.content == doctest::Approx(3.0));
        CHECK_FALSE(res.degenerate);
    }
    SUBCASE("3-4-5 triangle area equals Heron") {
        const double expected = oracle::heron_area(3, 4, 5);
        const auto res = g2l::simplex_content(from_grid({{0, 9, 16}, {9, 0, 25}, {16, 25, 0}}));
        CHECK(res.content == doctest::Approx(expected).epsilon(1e-9));
        CHECK(expected == doctest::Approx(6.0));
    }
    SUBCASE("regular unit tetrahedron") {
        const double expected = std::sqrt(2.0) / 12.0;
        const auto res = g2l::simplex_content(from_grid(
            {{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}}));
        CHECK(res.content == doctest::Approx(expected).epsilon(1e-9));
    }
    SUBCASE("coincident points are degenerate") {
        const auto res = g2l::simplex_content(from_grid({{0, 0}, {0, 0}}));
        CHECK(res.degenerate);
        CHECK(res.content == 0.0);
        CHECK(res.comparison_key() == 0.0);
    }
}

TEST_CASE("content matches the Gram oracle on random point sets") {
    std::mt19937_64 rng(20240811);
    for (int d = 1; d <= 4; ++d) {
        for (int trial = 0; trial < 25; ++trial) {
            const auto points = random_points(rng, static_cast<std::size_t>(d) + 1, 10);
            const double expected = oracle::gram_content(points);
            const auto res = g2l::simplex_content(from_grid(sq_grid(points)));
            CHECK(res.content == doctest::Approx(expected).epsilon(1e-8));
        }
    }
}

TEST_CASE("scale law: distances scaled by s scale content by s^d") {
    std::mt19937_64 rng(7);
    const double s = 2.25;
    for (int d = 1; d <= 4; ++d) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto points = random_points(rng, static_cast<std::size_t>(d) + 1, 8);
            auto grid = sq_grid(points);
            const double base = g2l::simplex_content(from_grid(grid)).content;
            for (auto& row : grid) {
                for (double& v : row) v *= s * s;
            }
            const double scaled = g2l::simplex_content(from_grid(grid)).content;
            CHECK(scaled == doctest::Approx(base * std::pow(s, d)).epsilon(1e-9));
        }
    }
}

TEST_CASE("permutation invariance of vertex order") {
    std::mt19937_64 rng(99);
    const auto points = random_points(rng, 5, 12);
    const double base = g2l::simplex_content(from_grid(sq_grid(points))).content;
    auto permuted = points;
    std::shuffle(permuted.begin(), permuted.end(), rng);
    const double shuffled = g2l::simplex_content(from_grid(sq_grid(permuted))).content;
    CHECK(shuffled == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("affinely dependent vertex gives zero content") {
    std::mt19937_64 rng(4242);
    auto points = random_points(rng, 3, 6);
    // Fourth vertex on the segment between the first two.
    std::vector<double> mix(6);
    for (std::size_t c = 0; c < 6; ++c) {
        mix[c] = 0.3 * points[0][c] + 0.7 * points[1][c];
    }
    points.push_back(mix);

    const auto res = g2l::simplex_content(from_grid(sq_grid(points)));

    double max_face = 0.0;
    for (std::size_t omit = 0; omit < points.size(); ++omit) {
        std::vector<std::vector<double>> face;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i != omit) face.push_back(points[i]);
        }
        max_face = std::max(max_face, g2l::simplex_content(from_grid(sq_grid(face))).content);
    }
    REQUIRE(max_face > 0.0);
    CHECK(res.content <= 1e-8 * max_face);
}

TEST_CASE("triangle content equals the cross-product area in R^n") {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 20; ++trial) {
        const auto points = random_points(rng, 3, 16);
        double uu = 0.0, vv = 0.0, uv = 0.0;
        for (std::size_t c = 0; c < 16; ++c) {
            const double u = points[1][c] - points[0][c];
            const double v = points[2][c] - points[0][c];
            uu += u * u;
            vv += v * v;
            uv += u * v;
        }
        const double area = 0.5 * std::sqrt(uu * vv - uv * uv);
        const auto res = g2l::simplex_content(from_grid(sq_grid(points)));
        CHECK(res.content == doctest::Approx(area).epsilon(1e-9));
    }
}

TEST_CASE("non-embeddable metric clamps to zero with the degenerate flag") {
    // Violates the triangle inequality strongly enough that det/a_d < 0.
    const auto res = g2l::simplex_content(from_grid({{0, 1, 100}, {1, 0, 1}, {100, 1, 0}}));
    CHECK(res.degenerate);
    CHECK(res.squared_content == 0.0);
    CHECK(res.content == 0.0);
}
