#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pearsonq/errors.hpp"
#include "pearsonq/moments.hpp"

namespace pearsonq {

/// Coefficients of the Pearson quadratic q(x) = delta (x-mu)^2 + beta (x-mu) + gamma.
/// delta is dimensionless, beta carries the units of X, gamma the units of X^2.
struct QParams {
    double mu = 0.0;
    double delta = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    Case kind = Case::continuous;

    [[nodiscard]] double q_at(double x) const {
        const double d = x - mu;
        return (delta * d + beta) * d + gamma;
    }
};

namespace detail {

inline void check_theta(const MomentSet& ms) {
    if (!(ms.theta > theta_epsilon(ms.m[2]))) {
        throw ThetaDegenerate(0, ms.theta);
    }
}

// Factored and expanded routes must agree; a violation means the moment input
// is inconsistent or the arithmetic has gone off the rails.
inline void check_agree(double a, double b, double unit, const char* what) {
    const double tol = 1e-9 * std::max(std::fabs(a), std::fabs(b)) + 1e-13 * unit;
    if (std::fabs(a - b) > tol) {
        throw std::logic_error(std::string("internal estimator check failed for ") + what +
                               ": " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

}  // namespace detail

/// Moment estimators for the continuous case (factored forms on the hot path,
/// expanded rational forms as cross-checks).
[[nodiscard]] inline QParams estimate_continuous(const MomentSet& ms) {
    detail::check_theta(ms);
    const double m2 = ms.m[2], m3 = ms.m[3], m4 = ms.m[4];
    const double den = 6.0 * ms.theta;

    QParams qp;
    qp.kind = Case::continuous;
    qp.mu = ms.mean;
    qp.delta = (2.0 * m4 * m2 - 3.0 * m3 * m3 - 6.0 * m2 * m2 * m2) / den;
    qp.beta = m3 * (1.0 - 2.0 * qp.delta) / (2.0 * m2);
    qp.gamma = m2 * (1.0 - qp.delta);

    const double beta_expanded = (m4 * m3 + 3.0 * m3 * m2 * m2) / den;
    const double gamma_expanded = (4.0 * m4 * m2 * m2 - 3.0 * m3 * m3 * m2) / den;
    detail::check_agree(qp.beta, beta_expanded, std::sqrt(m2), "beta (continuous)");
    detail::check_agree(qp.gamma, gamma_expanded, m2, "gamma (continuous)");
    return qp;
}

/// Moment estimators for the integer-valued case.
[[nodiscard]] inline QParams estimate_discrete(const MomentSet& ms) {
    detail::check_theta(ms);
    const double m2 = ms.m[2], m3 = ms.m[3], m4 = ms.m[4];
    const double den = 6.0 * ms.theta;

    QParams qp;
    qp.kind = Case::discrete;
    qp.mu = ms.mean;
    qp.delta = (2.0 * m4 * m2 - 3.0 * m3 * m3 - 6.0 * m2 * m2 * m2 + m2 * m2) / den;
    qp.beta = (m3 * (1.0 - 2.0 * qp.delta) - m2) / (2.0 * m2);
    qp.gamma = m2 * (1.0 - qp.delta);

    const double beta_expanded =
        (m4 * m3 - 3.0 * m4 * m2 + 3.0 * m3 * m3 + 3.0 * m3 * m2 * m2 - m3 * m2 +
         3.0 * m2 * m2 * m2) / den;
    const double gamma_expanded =
        (4.0 * m4 * m2 * m2 - 3.0 * m3 * m3 * m2 - m2 * m2 * m2) / den;
    detail::check_agree(qp.beta, beta_expanded, std::sqrt(m2), "beta (discrete)");
    detail::check_agree(qp.gamma, gamma_expanded, m2, "gamma (discrete)");
    return qp;
}

[[nodiscard]] inline QParams estimate(const MomentSet& ms, Case kind) {
    return kind == Case::continuous ? estimate_continuous(ms) : estimate_discrete(ms);
}

/// Independent oracle for estimate_*: builds the 3x3 linear system generated by
/// the covariance identity and solves it by elimination with partial pivoting.
/// Not used on the hot path.
[[nodiscard]] inline QParams solve_moment_system(const MomentSet& ms, Case kind) {
    detail::check_theta(ms);
    const double m2 = ms.m[2], m3 = ms.m[3], m4 = ms.m[4];

    std::array<std::array<double, 4>, 3> aug{};  // [A | b], unknowns (delta, beta, gamma)
    if (kind == Case::continuous) {
        aug[0] = {m2, 0.0, 1.0, m2};
        aug[1] = {2.0 * m3, 2.0 * m2, 0.0, m3};
        aug[2] = {3.0 * m4, 3.0 * m3, 3.0 * m2, m4};
    } else {
        aug[0] = {m2, 0.0, 1.0, m2};
        aug[1] = {2.0 * m3 + m2, 2.0 * m2, 1.0, m3};
        aug[2] = {3.0 * m4 + 3.0 * m3 + m2, 3.0 * m3 + 3.0 * m2, 3.0 * m2 + 1.0, m4};
    }

    // Condition estimate via the adjugate inverse (3x3, closed form).
    const auto det3x3 = [](const std::array<std::array<double, 4>, 3>& m) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double det = det3x3(aug);
    double norm_a = 0.0;
    for (const auto& row : aug) {
        norm_a = std::max(norm_a, std::fabs(row[0]) + std::fabs(row[1]) + std::fabs(row[2]));
    }
    double norm_inv = 0.0;
    if (det != 0.0) {
        const std::array<std::array<double, 3>, 3> adj = {{
            {aug[1][1] * aug[2][2] - aug[1][2] * aug[2][1],
             aug[0][2] * aug[2][1] - aug[0][1] * aug[2][2],
             aug[0][1] * aug[1][2] - aug[0][2] * aug[1][1]},
            {aug[1][2] * aug[2][0] - aug[1][0] * aug[2][2],
             aug[0][0] * aug[2][2] - aug[0][2] * aug[2][0],
             aug[0][2] * aug[1][0] - aug[0][0] * aug[1][2]},
            {aug[1][0] * aug[2][1] - aug[1][1] * aug[2][0],
             aug[0][1] * aug[2][0] - aug[0][0] * aug[2][1],
             aug[0][0] * aug[1][1] - aug[0][1] * aug[1][0]},
        }};
        for (const auto& row : adj) {
            norm_inv = std::max(norm_inv,
                                (std::fabs(row[0]) + std::fabs(row[1]) + std::fabs(row[2])) /
                                    std::fabs(det));
        }
    }
    const double cond = (det == 0.0) ? std::numeric_limits<double>::infinity()
                                     : norm_a * norm_inv;
    if (!(cond < 1e12)) throw SingularSystem(cond);

    // Forward elimination with partial pivoting.
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col])) pivot = r;
        }
        std::swap(aug[col], aug[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = aug[r][col] / aug[col][col];
            for (int c = col; c < 4; ++c) aug[r][c] -= f * aug[col][c];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = aug[r][3];
        for (int c = r + 1; c < 3; ++c) s -= aug[r][c] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = s / aug[r][r];
    }

    QParams qp;
    qp.kind = kind;
    qp.mu = ms.mean;
    qp.delta = x[0];
    qp.beta = x[1];
    qp.gamma = x[2];
    return qp;
}

/// Non-fatal diagnostics on an estimate (spec'd sanity implications).
[[nodiscard]] inline std::vector<std::string> q_params_warnings(const QParams& qp,
                                                                const MomentSet& ms) {
    std::vector<std::string> warnings;
    if (qp.kind == Case::continuous) {
        const double lhs = 4.0 * ms.m[4] * ms.m[2];
        const double rhs = 3.0 * ms.m[3] * ms.m[3];
        if (!(lhs > rhs)) {
            warnings.push_back("4*m4*m2 <= 3*m3^2: gamma-hat is not guaranteed positive "
                               "(gamma-hat = " + std::to_string(qp.gamma) + ")");
        }
    }
    return warnings;
}

}  // namespace pearsonq
