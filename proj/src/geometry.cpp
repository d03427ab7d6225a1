#include "g2l/geometry.hpp"
#include "g2l/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace g2l {

DistanceMatrix::DistanceMatrix(std::size_t order, std::vector<double> entries)
    : order_(order), entries_(std::move(entries)) {
    if (order_ < 2) {
        throw validation_error("DistanceMatrix: order must be >= 2, got " + std::to_string(order_));
    }
    if (entries_.size() != order_ * order_) {
        throw validation_error("DistanceMatrix: expected " + std::to_string(order_ * order_) +
                               " entries, got " + std::to_string(entries_.size()));
    }
    for (std::size_t i = 0; i < order_; ++i) {
        if (entries_[i * order_ + i] != 0.0) {
            throw validation_error("DistanceMatrix: nonzero diagonal at (" + std::to_string(i) +
                                   "," + std::to_string(i) + ")");
        }
        for (std::size_t j = 0; j < order_; ++j) {
            const double v = entries_[i * order_ + j];
            if (std::isnan(v) || v < 0.0) {
                throw validation_error("DistanceMatrix: negative or NaN entry at (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (entries_[i * order_ + j] != entries_[j * order_ + i]) {
                throw validation_error("DistanceMatrix: not symmetric at (" + std::to_string(i) +
                                       "," + std::to_string(j) + ")");
            }
        }
    }
}

std::vector<std::vector<double>> cm_matrix(const DistanceMatrix& dist) {
    const std::size_t n = dist.order();
    std::vector<std::vector<double>> m(n + 1, std::vector<double>(n + 1, 1.0));
    m[0][0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m[i + 1][j + 1] = dist.at(i, j);
        }
    }
    return m;
}

std::int64_t cm_coefficient(int d) {
    if (d <= 0) {
        throw validation_error("cm_coefficient: d must be >= 1, got " + std::to_string(d));
    }
    // |a_d| = 2^d * (d!)^2, assembled by checked multiplication.
    std::int64_t magnitude = 1;
    auto mul = [&](std::int64_t f) {
        if (__builtin_mul_overflow(magnitude, f, &magnitude)) {
            throw validation_error("cm_coefficient: overflow at d = " + std::to_string(d));
        }
    };
    for (int i = 1; i <= d; ++i) {
        mul(2);
        mul(i);
        mul(i);
    }
    return (d % 2 == 0) ? -magnitude : magnitude;
}

namespace {

// Determinant by partial-pivot LU. Accumulates in long double; the bordered
// matrices are tiny (order d+2) so cost is irrelevant next to robustness.
double lu_determinant(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<long double>> a(n, std::vector<long double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = m[i][j];
        }
    }
    int sign = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        long double best = std::fabs(a[col][col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const long double mag = std::fabs(a[r][col]);
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best == 0.0L) {
            return 0.0; // singular: determinant exactly zero
        }
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            sign = -sign;
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const long double factor = a[r][col] / a[col][col];
            a[r][col] = 0.0L;
            for (std::size_t c = col + 1; c < n; ++c) {
                a[r][c] -= factor * a[col][c];
            }
        }
    }
    long double det = sign;
    for (std::size_t i = 0; i < n; ++i) {
        det *= a[i][i];
    }
    return static_cast<double>(det);
}

} // namespace

CMResult simplex_content(const DistanceMatrix& dist) {
    const int d = static_cast<int>(dist.order()) - 1;
    CMResult result;
    result.dimension = d;
    result.determinant = lu_determinant(cm_matrix(dist));
    const double raw = result.determinant / static_cast<double>(cm_coefficient(d));
    result.degenerate = raw < kDegenerateSquaredContent;
    result.squared_content = raw < 0.0 ? 0.0 : raw;
    result.content = std::sqrt(result.squared_content);
    return result;
}

} // namespace g2l
