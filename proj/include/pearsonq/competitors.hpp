#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pearsonq/errors.hpp"
#include "pearsonq/moments.hpp"
#include "pearsonq/rng.hpp"
#include "pearsonq/special_functions.hpp"

namespace pearsonq {

/// The eight benchmark tests used in the power comparisons. All are applied in
/// the estimated-parameter (Lilliefors) situation, so non-asymptotic critical
/// values come from Monte Carlo calibration under the standard normal null.
enum class CompetitorId { ks, bs, d, ad, cvm, za, zc, cm };

[[nodiscard]] inline const char* to_string(CompetitorId id) {
    switch (id) {
        case CompetitorId::ks: return "ks";
        case CompetitorId::bs: return "bs";
        case CompetitorId::d: return "d";
        case CompetitorId::ad: return "ad";
        case CompetitorId::cvm: return "cvm";
        case CompetitorId::za: return "za";
        case CompetitorId::zc: return "zc";
        case CompetitorId::cm: return "cm";
    }
    return "?";
}

/// D'Agostino's D and the Cabilio-Masaro S_K are two-sided; the rest reject in
/// the upper tail.
[[nodiscard]] inline bool is_two_sided(CompetitorId id) {
    return id == CompetitorId::d || id == CompetitorId::cm;
}

namespace detail {

/// Probability-transformed order statistics u_(i) = Phi((x_(i) - xbar)/s) with
/// s using divisor n-1, clamped away from {0,1} for the log-based statistics.
inline std::vector<double> probit_u(const Sample& s) {
    const std::size_t n = s.n();
    if (n < 4) throw std::invalid_argument("e.d.f. tests require n >= 4");
    std::vector<double> x = s.values;
    std::sort(x.begin(), x.end());
    CompensatedSum total;
    for (double v : x) total.add(v);
    const double mean = total.value() / static_cast<double>(n);
    CompensatedSum ss;
    for (double v : x) ss.add((v - mean) * (v - mean));
    const double sd = std::sqrt(ss.value() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw DataError("degenerate sample: zero standard deviation");
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = std::clamp(normal_cdf((x[i] - mean) / sd), 1e-15, 1.0 - 1e-15);
    }
    return u;
}

[[nodiscard]] inline double ks_from_u(const std::vector<double>& u) {
    const auto n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / n - u[i];
        const double lo = u[i] - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

[[nodiscard]] inline double ad_from_u(const std::vector<double>& u) {
    const std::size_t n = u.size();
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) {
        s.add((2.0 * static_cast<double>(i) + 1.0) *
              (std::log(u[i]) + std::log1p(-u[n - 1 - i])));
    }
    return -static_cast<double>(n) - s.value() / static_cast<double>(n);
}

[[nodiscard]] inline double cvm_from_u(const std::vector<double>& u) {
    const auto n = static_cast<double>(u.size());
    CompensatedSum s;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n);
        s.add(d * d);
    }
    return s.value() + 1.0 / (12.0 * n);
}

[[nodiscard]] inline double za_from_u(const std::vector<double>& u) {
    const auto n = static_cast<double>(u.size());
    CompensatedSum s;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double rank = static_cast<double>(i) + 1.0;
        s.add(std::log(u[i]) / (n - rank + 0.5) + std::log1p(-u[i]) / (rank - 0.5));
    }
    return -s.value();
}

[[nodiscard]] inline double zc_from_u(const std::vector<double>& u) {
    const auto n = static_cast<double>(u.size());
    CompensatedSum s;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double rank = static_cast<double>(i) + 1.0;
        const double t = std::log((1.0 / u[i] - 1.0) / ((n - 0.5) / (rank - 0.75) - 1.0));
        s.add(t * t);
    }
    return s.value();
}

}  // namespace detail

/// Kolmogorov-Smirnov statistic with estimated parameters.
[[nodiscard]] inline double ks_statistic(const Sample& s) {
    return detail::ks_from_u(detail::probit_u(s));
}

/// Bowman-Shenton / Jarque-Bera statistic: n (b1/6 + (b2-3)^2/24) with
/// b1 = m3^2/m2^3 (squared skewness) and b2 = m4/m2^2 (kurtosis).
[[nodiscard]] inline double jarque_bera_from_moments(const MomentSet& ms) {
    const double m2 = ms.m[2];
    if (!(m2 > 0.0)) throw DataError("degenerate sample: zero variance");
    const double b1 = ms.m[3] * ms.m[3] / (m2 * m2 * m2);
    const double b2 = ms.m[4] / (m2 * m2);
    return static_cast<double>(ms.n) * (b1 / 6.0 + (b2 - 3.0) * (b2 - 3.0) / 24.0);
}

[[nodiscard]] inline double jarque_bera(const Sample& s) {
    return jarque_bera_from_moments(central_moments(s, 4));
}

/// D'Agostino's D, standardized: Y = sqrt(n) (D - 0.28209479) / 0.02998598 with
/// D the ratio of Downton's linear estimator of sigma to the sample sd.
[[nodiscard]] inline double dagostino_d(const Sample& s) {
    const std::size_t n = s.n();
    if (n < 10) throw std::invalid_argument("D'Agostino's test requires n >= 10");
    std::vector<double> x = s.values;
    std::sort(x.begin(), x.end());
    const MomentSet ms = central_moments(s, 2);
    if (!(ms.m[2] > 0.0)) throw DataError("degenerate sample: zero variance");
    CompensatedSum t;
    const double mid = (static_cast<double>(n) + 1.0) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        t.add((static_cast<double>(i) + 1.0 - mid) * x[i]);
    }
    const double nd = static_cast<double>(n);
    const double d = t.value() / (nd * nd * std::sqrt(ms.m[2]));
    return std::sqrt(nd) * (d - 0.28209479) / 0.02998598;
}

[[nodiscard]] inline double anderson_darling(const Sample& s) {
    return detail::ad_from_u(detail::probit_u(s));
}

[[nodiscard]] inline double cramer_von_mises(const Sample& s) {
    return detail::cvm_from_u(detail::probit_u(s));
}

[[nodiscard]] inline double zhang_za(const Sample& s) {
    return detail::za_from_u(detail::probit_u(s));
}

[[nodiscard]] inline double zhang_zc(const Sample& s) {
    return detail::zc_from_u(detail::probit_u(s));
}

/// Cabilio-Masaro symmetry statistic S_K = sqrt(n) (mean - median) / s, with s
/// the divisor-n standard deviation and the even-n median the average of the
/// central order statistics.
[[nodiscard]] inline double cabilio_masaro(const Sample& s) {
    const std::size_t n = s.n();
    if (n < 4) throw std::invalid_argument("Cabilio-Masaro test requires n >= 4");
    std::vector<double> x = s.values;
    std::sort(x.begin(), x.end());
    const double median = (n % 2 == 1) ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
    const MomentSet ms = central_moments(s, 2);
    if (!(ms.m[2] > 0.0)) throw DataError("degenerate sample: zero standard deviation");
    return std::sqrt(static_cast<double>(n)) * (ms.mean - median) / std::sqrt(ms.m[2]);
}

[[nodiscard]] inline double competitor_statistic(CompetitorId id, const Sample& s) {
    switch (id) {
        case CompetitorId::ks: return ks_statistic(s);
        case CompetitorId::bs: return jarque_bera(s);
        case CompetitorId::d: return dagostino_d(s);
        case CompetitorId::ad: return anderson_darling(s);
        case CompetitorId::cvm: return cramer_von_mises(s);
        case CompetitorId::za: return zhang_za(s);
        case CompetitorId::zc: return zhang_zc(s);
        case CompetitorId::cm: return cabilio_masaro(s);
    }
    throw std::invalid_argument("unknown competitor test");
}

/// The quantity compared against a calibrated critical value: |statistic| for
/// the two-sided tests, the statistic itself otherwise.
[[nodiscard]] inline double competitor_rejection_statistic(CompetitorId id, const Sample& s) {
    const double v = competitor_statistic(id, s);
    return is_two_sided(id) ? std::fabs(v) : v;
}

/// One calibrated critical value and its provenance.
struct CriticalValue {
    CompetitorId test;
    std::size_t n;
    double alpha;
    double value;
    std::string provenance;  // "monte_carlo" (calibrated) or "published"
    std::uint64_t seed = 0;
    std::uint64_t reps = 0;
};

/// Type-7 quantile (linear interpolation of order statistics) of sorted data.
[[nodiscard]] inline double quantile_type7(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

/// Simulates the null (standard normal, parameters re-estimated in every
/// replication) and returns empirical upper-alpha critical values.
/// Deterministic given the seed.
[[nodiscard]] inline std::vector<CriticalValue> calibrate_critical_values(
    CompetitorId id, const std::vector<std::size_t>& n_list,
    const std::vector<double>& alpha_list, std::uint64_t reps, std::uint64_t seed) {
    std::vector<CriticalValue> out;
    for (const std::size_t n : n_list) {
        const std::uint64_t experiment =
            stream_label("calibrate/" + std::string(to_string(id)) + "/n=" + std::to_string(n));
        std::vector<double> stats(reps);
        for (std::uint64_t rep = 0; rep < reps; ++rep) {
            RngStream g = substream(seed, experiment, rep);
            Sample s;
            s.kind = Case::continuous;
            s.values.resize(n);
            for (auto& v : s.values) v = g.normal();
            stats[rep] = competitor_rejection_statistic(id, s);
        }
        std::sort(stats.begin(), stats.end());
        for (const double alpha : alpha_list) {
            out.push_back(CriticalValue{id, n, alpha, quantile_type7(stats, 1.0 - alpha),
                                        "monte_carlo", seed, reps});
        }
    }
    return out;
}

}  // namespace pearsonq
