#pragma once

// Chart-level linear algebra. Charts are two-dimensional throughout the
// catalog, so the fixed-size types are the workhorses; the small dense
// solver covers the few k x k systems (k <= 4) that appear elsewhere.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "scurv/errors.hpp"

namespace scurv {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline double det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

inline Mat2 inverse(const Mat2& m) {
    double d = det(m);
    if (d == 0.0 || !std::isfinite(1.0 / d)) throw SingularMetricError("2x2 matrix not invertible");
    return {{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
}

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

inline Vec2 mul(const Mat2& m, const Vec2& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

// a-inner product and norm with metric m.
inline double inner(const Mat2& m, const Vec2& u, const Vec2& v) { return dot(u, mul(m, v)); }

// Dense Gaussian elimination with partial pivoting; A is row-major k x k.
// Returns false when the pivot collapses (singular to working precision).
inline bool solve_dense(std::vector<double> A, std::vector<double> b, std::size_t k,
                        std::vector<double>& out) {
    std::vector<std::size_t> piv(k);
    for (std::size_t i = 0; i < k; ++i) piv[i] = i;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t best = col;
        double mag = std::fabs(A[col * k + col]);
        for (std::size_t r = col + 1; r < k; ++r) {
            double m = std::fabs(A[r * k + col]);
            if (m > mag) {
                mag = m;
                best = r;
            }
        }
        if (mag < 1e-300) return false;
        if (best != col) {
            for (std::size_t j = 0; j < k; ++j) std::swap(A[col * k + j], A[best * k + j]);
            std::swap(b[col], b[best]);
        }
        for (std::size_t r = col + 1; r < k; ++r) {
            double f = A[r * k + col] / A[col * k + col];
            for (std::size_t j = col; j < k; ++j) A[r * k + j] -= f * A[col * k + j];
            b[r] -= f * b[col];
        }
    }
    out.assign(k, 0.0);
    for (std::size_t ri = k; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t j = ri + 1; j < k; ++j) s -= A[ri * k + j] * out[j];
        out[ri] = s / A[ri * k + ri];
    }
    return true;
}

} // namespace scurv
