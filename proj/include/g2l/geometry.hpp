#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace g2l {

/// Symmetric matrix of squared pairwise distances between the vertices of a
/// simplex. `order` is the vertex count (d+1 for a d-simplex). Invariants
/// (symmetry, zero diagonal, nonnegative entries) are checked at construction.
class DistanceMatrix {
public:
    /// `entries` is row-major, order*order squared distances.
    DistanceMatrix(std::size_t order, std::vector<double> entries);

    std::size_t order() const { return order_; }
    double at(std::size_t i, std::size_t j) const { return entries_[i * order_ + j]; }
    const std::vector<double>& entries() const { return entries_; }

private:
    std::size_t order_;
    std::vector<double> entries_;
};

/// Squared contents at or below this value are treated as degenerate. Not a
/// published constant; chosen so that exact-zero and negative round-off cases
/// are flagged while genuinely thin simplices are not.
inline constexpr double kDegenerateSquaredContent = 1e-12;

/// Result of a simplex content computation.
struct CMResult {
    int dimension = 0;           // d, for a simplex on d+1 vertices
    double determinant = 0.0;    // det of the bordered matrix
    double squared_content = 0.0; // determinant / coefficient, clamped at 0
    double content = 0.0;        // sqrt(squared_content)
    bool degenerate = false;     // raw squared content below kDegenerateSquaredContent

    /// Ordering key for candidate comparison: degenerate simplices compare
    /// as exactly 0, everything else by squared content (sqrt is monotone,
    /// so arg-extremes are unchanged).
    double comparison_key() const { return degenerate ? 0.0 : squared_content; }
};

/// Builds the (d+2)x(d+2) bordered matrix: first row and column are
/// [0, 1, 1, ..., 1], the remaining block holds the squared distances.
std::vector<std::vector<double>> cm_matrix(const DistanceMatrix& dist);

/// Coefficient a_d = (-1)^(d+1) * 2^d * (d!)^2 relating the bordered
/// determinant to squared content (OEIS A055546). Exact integer arithmetic;
/// throws validation_error on d <= 0 or int64 overflow.
std::int64_t cm_coefficient(int d);

/// Content of the simplex described by `dist`: determinant by partial-pivot
/// LU with long double accumulation, squared content = det / a_d clamped at
/// zero (non-embeddable metrics and round-off can drive it negative), content
/// is its square root.
CMResult simplex_content(const DistanceMatrix& dist);

} // namespace g2l
