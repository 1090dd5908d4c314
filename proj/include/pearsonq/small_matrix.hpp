#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "pearsonq/errors.hpp"

namespace pearsonq {

/// Dense fixed-size square matrix, row-major. All covariance algebra in this
/// project is at most 4x4, done in closed form.
template <std::size_t N>
struct Mat {
    std::array<double, N * N> a{};

    double& operator()(std::size_t i, std::size_t j) { return a[i * N + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * N + j]; }

    static Mat identity() {
        Mat m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    [[nodiscard]] Mat transposed() const {
        Mat t;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    /// Largest absolute entry; the scale used in singularity thresholds.
    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::fabs(v));
        return m;
    }

    /// 0.5 (M + M^t): kills rounding skew on matrices that are symmetric in
    /// exact arithmetic.
    [[nodiscard]] Mat symmetrized() const {
        Mat s;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
        return s;
    }
};

using Mat2 = Mat<2>;
using Mat3 = Mat<3>;
using Mat4 = Mat<4>;

template <std::size_t N>
[[nodiscard]] Mat<N> operator*(const Mat<N>& x, const Mat<N>& y) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < N; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

template <std::size_t N, std::size_t M>
[[nodiscard]] std::array<std::array<double, M>, N> rows_times(
    const std::array<std::array<double, M>, N>& rows, const Mat<M>& m) {
    std::array<std::array<double, M>, N> r{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < M; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < M; ++k) s += rows[i][k] * m(k, j);
            r[i][j] = s;
        }
    return r;
}

[[nodiscard]] inline double det3(const Mat3& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// 3x3 inverse by adjugate. Throws SingularCovariance when |det| falls below
/// 1e-12 * max_abs(M)^3.
[[nodiscard]] inline Mat3 inverse3_checked(const Mat3& m) {
    const double det = det3(m);
    const double scale = m.max_abs();
    if (std::fabs(det) < 1e-12 * scale * scale * scale) {
        throw SingularCovariance(det, scale);
    }
    Mat3 inv;
    inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / det;
    inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / det;
    inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
    inv(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / det;
    inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
    inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / det;
    inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / det;
    inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / det;
    inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
    return inv;
}

/// Quadratic form v^t M v.
template <std::size_t N>
[[nodiscard]] double quad_form(const std::array<double, N>& v, const Mat<N>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < N; ++j) row += m(i, j) * v[j];
        s += v[i] * row;
    }
    return s;
}

}  // namespace pearsonq
