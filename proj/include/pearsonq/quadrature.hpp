#pragma once

#include <cmath>
#include <type_traits>

#include "pearsonq/errors.hpp"
#include "pearsonq/summation.hpp"

namespace pearsonq {

/// Adaptive tanh-sinh (double-exponential) quadrature on a finite interval.
/// Robust to integrable endpoint singularities; the level is doubled until the
/// estimate changes by less than abs_tol.
///
/// The integrand may be f(x) or f(x, dist_a, dist_b), where dist_a = x - a and
/// dist_b = b - x are computed as offsets from the endpoints at full
/// precision. Integrands singular at an endpoint must use the distances:
/// recomputing b - x from x loses the digits that matter there.
class TanhSinh {
public:
    explicit TanhSinh(double abs_tol = 1e-10, int max_level = 12)
        : abs_tol_(abs_tol), max_level_(max_level) {}

    template <typename F>
    [[nodiscard]] double integrate(F&& f, double a, double b) const {
        if (!(b > a)) return 0.0;
        const double half = 0.5 * (b - a);

        const auto eval = [&](double x, double da, double db) {
            if constexpr (std::is_invocable_v<F&, double, double, double>) {
                return f(x, da, db);
            } else {
                return f(x);
            }
        };

        double previous = 0.0;
        for (int level = 1; level <= max_level_; ++level) {
            const double h = 1.0 / static_cast<double>(1 << level);
            CompensatedSum sum;
            // t_k = k*h over the truncated doubly-infinite grid
            for (int k = -max_k(h); k <= max_k(h); ++k) {
                const double t = k * h;
                const double u = 1.5707963267948966 * std::sinh(t);
                const double cosh_u = std::cosh(u);
                const double w = 1.5707963267948966 * std::cosh(t) / (cosh_u * cosh_u);
                if (!(w > 5e-308)) continue;
                // distance from the nearer endpoint: half*(1 -+ tanh(u))
                double x, da, db;
                if (t < 0.0) {
                    da = 2.0 * half / (1.0 + std::exp(-2.0 * u));
                    if (da <= 0.0) continue;
                    x = a + da;
                    db = (b - a) - da;
                } else {
                    db = 2.0 * half / (1.0 + std::exp(2.0 * u));
                    if (db <= 0.0) continue;
                    x = b - db;
                    da = (b - a) - db;
                }
                const double fx = eval(x, da, db);
                if (std::isfinite(fx)) sum.add(w * fx);
            }
            const double estimate = sum.value() * half * h;
            if (level >= 4 && std::fabs(estimate - previous) <= abs_tol_) {
                return estimate;
            }
            previous = estimate;
        }
        throw NumericError("tanh-sinh quadrature did not converge to the requested tolerance");
    }

private:
    static int max_k(double h) {
        // |u| = pi/2 sinh(kh) ~ 354 makes the weight underflow; stop there.
        const double t_max = std::asinh(354.0 / 1.5707963267948966);
        return static_cast<int>(t_max / h) + 1;
    }

    double abs_tol_;
    int max_level_;
};

}  // namespace pearsonq
