#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "pearsonq/errors.hpp"
#include "pearsonq/moments.hpp"
#include "pearsonq/small_matrix.hpp"

namespace pearsonq {

/// The delta-method pieces for the estimator vector (mean, delta, beta, gamma):
/// moment covariance Sigma, the two Jacobians, and the composed covariance
/// D = (J_phi J_psi) Sigma (J_phi J_psi)^t. Row/column order is fixed as
/// (mu, delta, beta, gamma).
struct CovModel {
    Mat4 sigma;
    Mat4 j_psi;
    Mat4 j_phi;
    Mat4 d;
    Case kind = Case::continuous;
};

/// Sigma = (mu_{i+j} - mu_i mu_j), i,j = 1..4, with the mu_1 = 0 convention.
/// `mu` holds central moments indexed by order; entries 2..8 are used.
[[nodiscard]] inline Mat4 sigma_matrix(const std::array<double, 9>& mu) {
    std::array<double, 9> c = mu;
    c[0] = 1.0;
    c[1] = 0.0;
    Mat4 s;
    for (std::size_t i = 1; i <= 4; ++i) {
        for (std::size_t j = 1; j <= 4; ++j) {
            s(i - 1, j - 1) = c[i + j] - c[i] * c[j];
        }
    }
    return s;
}

/// Jacobians of the two maps in the delta-method chain, evaluated at
/// theta_vec = (mean, mu2, mu3, mu4). J_psi sends raw centered-power means to
/// central moments; J_phi sends (mean, mu2, mu3, mu4) to (mu, delta, beta, gamma).
[[nodiscard]] inline std::pair<Mat4, Mat4> jacobians(const std::array<double, 4>& theta_vec,
                                                     Case kind) {
    const double m2 = theta_vec[1], m3 = theta_vec[2], m4 = theta_vec[3];
    const double theta = m4 * m2 - m3 * m3 - m2 * m2 * m2;
    if (!(theta > theta_epsilon(m2))) throw ThetaDegenerate(0, theta);

    Mat4 j_psi = Mat4::identity();
    j_psi(2, 0) = -3.0 * m2;
    j_psi(3, 0) = -4.0 * m3;

    const double m2_2 = m2 * m2, m2_3 = m2_2 * m2, m2_4 = m2_3 * m2, m2_5 = m2_4 * m2;
    const double m3_2 = m3 * m3, m3_3 = m3_2 * m3, m3_4 = m3_2 * m3_2;
    const double m4_2 = m4 * m4;
    const double den = 6.0 * theta * theta;

    Mat4 j_phi;
    j_phi(0, 0) = 1.0;
    if (kind == Case::continuous) {
        j_phi(1, 1) = (m4 * m3_2 - 8.0 * m4 * m2_3 + 9.0 * m3_2 * m2_2) / den;
        j_phi(1, 2) = (-2.0 * m4 * m3 * m2 - 6.0 * m3 * m2_3) / den;
        j_phi(1, 3) = (m3_2 * m2 + 4.0 * m2_4) / den;
        j_phi(2, 1) = (-m4_2 * m3 + 6.0 * m4 * m3 * m2_2 - 6.0 * m3_3 * m2 + 3.0 * m3 * m2_4) / den;
        j_phi(2, 2) = (m4_2 * m2 + m4 * m3_2 + 2.0 * m4 * m2_3 + 3.0 * m3_2 * m2_2 - 3.0 * m2_5) / den;
        j_phi(2, 3) = (-m3_3 - 4.0 * m3 * m2_3) / den;
        j_phi(3, 1) = (4.0 * m4_2 * m2_2 - 8.0 * m4 * m3_2 * m2 + 4.0 * m4 * m2_4 + 3.0 * m3_4 -
                       6.0 * m3_2 * m2_3) / den;
        j_phi(3, 2) = (2.0 * m4 * m3 * m2_2 + 6.0 * m3 * m2_4) / den;
        j_phi(3, 3) = (-m3_2 * m2_2 - 4.0 * m2_5) / den;
    } else {
        j_phi(1, 1) = (m4 * m3_2 - 8.0 * m4 * m2_3 + m4 * m2_2 + 9.0 * m3_2 * m2_2 -
                       2.0 * m3_2 * m2 + m2_4) / den;
        j_phi(1, 2) = (-2.0 * m4 * m3 * m2 - 6.0 * m3 * m2_3 + 2.0 * m3 * m2_2) / den;
        j_phi(1, 3) = (m3_2 * m2 + 4.0 * m2_4 - m2_3) / den;
        j_phi(2, 1) = (-m4_2 * m3 + 6.0 * m4 * m3 * m2_2 - 6.0 * m3_3 * m2 + m3_3 +
                       3.0 * m3 * m2_4 - 2.0 * m3 * m2_3) / den;
        j_phi(2, 2) = (m4_2 * m2 + m4 * m3_2 + 2.0 * m4 * m2_3 - m4 * m2_2 +
                       3.0 * m3_2 * m2_2 - m3_2 * m2 - 3.0 * m2_5 + m2_4) / den;
        j_phi(2, 3) = (-m3_3 - 4.0 * m3 * m2_3 + m3 * m2_2) / den;
        j_phi(3, 1) = (4.0 * m4_2 * m2_2 - 8.0 * m4 * m3_2 * m2 + 4.0 * m4 * m2_4 -
                       2.0 * m4 * m2_3 + 3.0 * m3_4 - 6.0 * m3_2 * m2_3 + 3.0 * m3_2 * m2_2) / den;
        j_phi(3, 2) = (2.0 * m4 * m3 * m2_2 + 6.0 * m3 * m2_4 - 2.0 * m3 * m2_3) / den;
        j_phi(3, 3) = (-m3_2 * m2_2 - 4.0 * m2_5 + m2_4) / den;
    }
    return {j_psi, j_phi};
}

/// Composes D = (J_phi J_psi) Sigma (J_phi J_psi)^t from moments up to order 8.
[[nodiscard]] inline CovModel asymptotic_cov(const MomentSet& ms, Case kind) {
    if (ms.max_order < 8) {
        throw std::invalid_argument("asymptotic_cov: moments up to order 8 required");
    }
    CovModel model;
    model.kind = kind;
    model.sigma = sigma_matrix(ms.m);
    auto [j_psi, j_phi] = jacobians({ms.mean, ms.m[2], ms.m[3], ms.m[4]}, kind);
    model.j_psi = j_psi;
    model.j_phi = j_phi;
    const Mat4 c = j_phi * j_psi;
    model.d = (c * model.sigma * c.transposed()).symmetrized();
    return model;
}

/// Null covariance of (delta-hat, beta-hat) under normality, sigma^2 -> s^2.
[[nodiscard]] inline Mat2 null_cov_normality(double s2) {
    if (!(s2 > 0.0)) throw std::invalid_argument("null_cov_normality: s2 must be positive");
    Mat2 m;
    m(0, 0) = 2.0 / 3.0;
    m(1, 1) = 1.5 * s2;
    return m;
}

[[nodiscard]] inline Mat2 null_cov_normality_inverse(double s2) {
    if (!(s2 > 0.0)) throw std::invalid_argument("null_cov_normality_inverse: s2 must be positive");
    Mat2 m;
    m(0, 0) = 1.5;
    m(1, 1) = 2.0 / (3.0 * s2);
    return m;
}

/// Var(delta-hat | delta = 0) with plugged-in sample moments; covers the normal
/// and gamma-type members (the only ones with a linear q).
[[nodiscard]] inline double sigma0_delta(double m2, double m3) {
    if (!(m2 > 0.0)) throw std::invalid_argument("sigma0_delta: m2 must be positive");
    const double m2_3 = m2 * m2 * m2;
    const double m3_2 = m3 * m3;
    return (2.0 / 3.0) * (1.0 + 13.0 * m3_2 / (4.0 * m2_3) +
                          7.0 * m3_2 * m3_2 / (2.0 * m2_3 * (4.0 * m2_3 + m3_2)));
}

/// Null variance of sqrt(n) m3 under symmetry: mu6 - 6 mu4 mu2 + 9 mu2^3.
[[nodiscard]] inline double sigma0_symmetry(double m2, double m4, double m6) {
    const double v = m6 - 6.0 * m4 * m2 + 9.0 * m2 * m2 * m2;
    if (!(v > 0.0)) throw NonpositiveVariance(v);
    return v;
}

/// Null covariance of (delta-hat, beta-hat, m2 - mean) under Poisson(lambda).
/// The (2,2) entry is (9 lambda^2 - 2 lambda + 9)/(6 lambda): composing the
/// discrete delta-method at exact Poisson moments requires the +9 term, and
/// without it the matrix is not positive definite for small lambda. With it,
/// det = 2 lambda^3 > 0 for every lambda > 0.
[[nodiscard]] inline Mat3 null_cov_poisson(double lambda_hat) {
    if (!(lambda_hat > 0.0)) {
        throw std::invalid_argument("null_cov_poisson: lambda must be positive");
    }
    const double l = lambda_hat;
    const double f = 1.0 / (6.0 * l);
    Mat3 m;
    m(0, 0) = (4.0 * l + 9.0) * f;
    m(0, 1) = m(1, 0) = (5.0 * l - 9.0) * f;
    m(1, 1) = (9.0 * l * l - 2.0 * l + 9.0) * f;
    m(1, 2) = m(2, 1) = 12.0 * l * l * f;
    m(2, 2) = 12.0 * l * l * l * f;
    return m;
}

}  // namespace pearsonq
