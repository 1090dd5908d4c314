#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pearsonq/errors.hpp"
#include "pearsonq/estimators.hpp"
#include "pearsonq/format.hpp"
#include "pearsonq/moments.hpp"
#include "pearsonq/quadrature.hpp"
#include "pearsonq/rng.hpp"
#include "pearsonq/summation.hpp"

namespace pearsonq {

enum class Family {
    normal,
    uniform01,
    beta,
    gamma,
    exponential,
    poisson,
    binomial,
    negbinomial,
};

/// One simulated population: a family plus its parameters.
/// Parsed from CLI strings like "beta:a=5,b=5" or "negbinomial:r=10,p=0.7".
struct FamilySpec {
    Family family = Family::normal;
    double mu = 0.0;       // normal
    double sigma2 = 1.0;   // normal
    double a = 1.0;        // beta shape / gamma shape
    double b = 1.0;        // beta shape
    double theta = 1.0;    // gamma / exponential scale
    double lambda = 1.0;   // poisson
    int trials = 1;        // binomial N
    double p = 0.5;        // binomial / negbinomial success probability
    double r = 1.0;        // negbinomial size

    [[nodiscard]] Case kind() const {
        switch (family) {
            case Family::poisson:
            case Family::binomial:
            case Family::negbinomial:
                return Case::discrete;
            default:
                return Case::continuous;
        }
    }

    [[nodiscard]] double mean() const {
        switch (family) {
            case Family::normal: return mu;
            case Family::uniform01: return 0.5;
            case Family::beta: return a / (a + b);
            case Family::gamma: return a * theta;
            case Family::exponential: return theta;
            case Family::poisson: return lambda;
            case Family::binomial: return trials * p;
            case Family::negbinomial: return r * (1.0 - p) / p;
        }
        return 0.0;
    }

    void validate() const {
        switch (family) {
            case Family::normal:
                if (!(sigma2 > 0.0)) throw DataError("normal: sigma2 must be positive");
                break;
            case Family::uniform01:
                break;
            case Family::beta:
                if (!(a > 0.0) || !(b > 0.0)) throw DataError("beta: a, b must be positive");
                break;
            case Family::gamma:
                if (!(a > 0.0) || !(theta > 0.0)) throw DataError("gamma: a, theta must be positive");
                break;
            case Family::exponential:
                if (!(theta > 0.0)) throw DataError("exponential: theta must be positive");
                break;
            case Family::poisson:
                if (!(lambda > 0.0)) throw DataError("poisson: lambda must be positive");
                break;
            case Family::binomial:
                if (trials < 1) throw DataError("binomial: N must be >= 1");
                if (!(p > 0.0 && p < 1.0)) throw DataError("binomial: p must be in (0,1)");
                break;
            case Family::negbinomial:
                if (!(r > 0.0)) throw DataError("negbinomial: r must be positive");
                if (!(p > 0.0 && p < 1.0)) throw DataError("negbinomial: p must be in (0,1)");
                break;
        }
    }

    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] static FamilySpec parse(const std::string& text);
};

namespace detail {

inline std::map<std::string, double> parse_kv(const std::string& text) {
    std::map<std::string, double> kv;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw DataError("bad family parameter '" + item + "'");
        double value;
        if (!parse_number(item.substr(eq + 1), value)) {
            throw DataError("bad family parameter value in '" + item + "'");
        }
        kv[trim(item.substr(0, eq))] = value;
        pos = comma + 1;
    }
    return kv;
}

inline double take(std::map<std::string, double>& kv, const std::string& key, double fallback,
                   bool required = false) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (required) throw DataError("missing family parameter '" + key + "'");
        return fallback;
    }
    const double v = it->second;
    kv.erase(it);
    return v;
}

}  // namespace detail

inline std::string FamilySpec::to_string() const {
    switch (family) {
        case Family::normal:
            return "normal:mu=" + format_double(mu) + ",sigma2=" + format_double(sigma2);
        case Family::uniform01:
            return "uniform01";
        case Family::beta:
            return "beta:a=" + format_double(a) + ",b=" + format_double(b);
        case Family::gamma:
            return "gamma:a=" + format_double(a) + ",theta=" + format_double(theta);
        case Family::exponential:
            return "exponential:theta=" + format_double(theta);
        case Family::poisson:
            return "poisson:lambda=" + format_double(lambda);
        case Family::binomial:
            return "binomial:N=" + std::to_string(trials) + ",p=" + format_double(p);
        case Family::negbinomial:
            return "negbinomial:r=" + format_double(r) + ",p=" + format_double(p);
    }
    return "?";
}

inline FamilySpec FamilySpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = detail::trim(text.substr(0, colon));
    auto kv = (colon == std::string::npos) ? std::map<std::string, double>{}
                                           : detail::parse_kv(text.substr(colon + 1));
    FamilySpec spec;
    if (name == "normal") {
        spec.family = Family::normal;
        spec.mu = detail::take(kv, "mu", 0.0);
        spec.sigma2 = detail::take(kv, "sigma2", 1.0);
    } else if (name == "uniform01" || name == "uniform") {
        spec.family = Family::uniform01;
    } else if (name == "beta") {
        spec.family = Family::beta;
        spec.a = detail::take(kv, "a", 0.0, true);
        spec.b = detail::take(kv, "b", 0.0, true);
    } else if (name == "gamma") {
        spec.family = Family::gamma;
        spec.a = detail::take(kv, "a", 0.0, true);
        spec.theta = detail::take(kv, "theta", 1.0);
    } else if (name == "exponential") {
        spec.family = Family::exponential;
        spec.theta = detail::take(kv, "theta", 1.0);
    } else if (name == "poisson") {
        spec.family = Family::poisson;
        spec.lambda = detail::take(kv, "lambda", 0.0, true);
    } else if (name == "binomial") {
        spec.family = Family::binomial;
        spec.trials = static_cast<int>(detail::take(kv, "N", 0.0, true));
        spec.p = detail::take(kv, "p", 0.0, true);
    } else if (name == "negbinomial") {
        spec.family = Family::negbinomial;
        spec.r = detail::take(kv, "r", 0.0, true);
        spec.p = detail::take(kv, "p", 0.0, true);
    } else {
        throw DataError("unknown family '" + name + "'");
    }
    if (!kv.empty()) throw DataError("unknown parameter '" + kv.begin()->first + "' for family " + name);
    spec.validate();
    return spec;
}

/// Exact Pearson quadratic parameters for each supported family, derived
/// from the defining identity; the identity verifiers below gate every
/// formula.
[[nodiscard]] inline QParams true_q_params(const FamilySpec& spec) {
    spec.validate();
    QParams qp;
    qp.mu = spec.mean();
    qp.kind = spec.kind();
    switch (spec.family) {
        case Family::normal:
            qp.delta = 0.0; qp.beta = 0.0; qp.gamma = spec.sigma2;
            break;
        case Family::uniform01:
            qp.delta = -0.5; qp.beta = 0.0; qp.gamma = 0.125;
            break;
        case Family::beta: {
            const double s = spec.a + spec.b;
            const double m = spec.a / s;
            qp.delta = -1.0 / s;
            qp.beta = (1.0 - 2.0 * m) / s;
            qp.gamma = m * (1.0 - m) / s;
            break;
        }
        case Family::gamma:
            qp.delta = 0.0; qp.beta = spec.theta; qp.gamma = spec.a * spec.theta * spec.theta;
            break;
        case Family::exponential:
            qp.delta = 0.0; qp.beta = spec.theta; qp.gamma = spec.theta * spec.theta;
            break;
        case Family::poisson:
            qp.delta = 0.0; qp.beta = 0.0; qp.gamma = spec.lambda;
            break;
        case Family::binomial:
            qp.delta = 0.0; qp.beta = -spec.p;
            qp.gamma = spec.trials * spec.p * (1.0 - spec.p);
            break;
        case Family::negbinomial:
            qp.delta = 0.0; qp.beta = (1.0 - spec.p) / spec.p;
            qp.gamma = spec.r * (1.0 - spec.p) / (spec.p * spec.p);
            break;
    }
    return qp;
}

namespace detail {

// Stirling numbers of the second kind S(k,i), k,i <= 8.
inline constexpr std::array<std::array<double, 9>, 9> kStirling2 = {{
    {1, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 1, 0, 0, 0, 0, 0, 0, 0},
    {0, 1, 1, 0, 0, 0, 0, 0, 0},
    {0, 1, 3, 1, 0, 0, 0, 0, 0},
    {0, 1, 7, 6, 1, 0, 0, 0, 0},
    {0, 1, 15, 25, 10, 1, 0, 0, 0},
    {0, 1, 31, 90, 65, 15, 1, 0, 0},
    {0, 1, 63, 301, 350, 140, 21, 1, 0},
    {0, 1, 127, 966, 1701, 1050, 266, 28, 1},
}};

inline double binom_coeff(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

// Raw moments E[X^k], k = 0..max_order, per family.
inline std::array<double, 9> raw_moments(const FamilySpec& spec, int max_order) {
    std::array<double, 9> raw{};
    raw[0] = 1.0;
    switch (spec.family) {
        case Family::normal: {
            // E[X^k] from central normal moments and the mean
            std::array<double, 9> central{};
            central[0] = 1.0;
            for (int k = 2; k <= max_order; k += 2) {
                double dd = 1.0;
                for (int j = 1; j < k; j += 2) dd *= j;  // (k-1)!!
                central[static_cast<std::size_t>(k)] =
                    dd * std::pow(spec.sigma2, k / 2.0);
            }
            for (int k = 1; k <= max_order; ++k) {
                double s = 0.0;
                for (int j = 0; j <= k; ++j) {
                    s += binom_coeff(k, j) * central[static_cast<std::size_t>(j)] *
                         std::pow(spec.mu, k - j);
                }
                raw[static_cast<std::size_t>(k)] = s;
            }
            break;
        }
        case Family::uniform01:
            for (int k = 1; k <= max_order; ++k) raw[static_cast<std::size_t>(k)] = 1.0 / (k + 1);
            break;
        case Family::beta:
            for (int k = 1; k <= max_order; ++k) {
                double v = 1.0;
                for (int i = 0; i < k; ++i) v *= (spec.a + i) / (spec.a + spec.b + i);
                raw[static_cast<std::size_t>(k)] = v;
            }
            break;
        case Family::gamma:
        case Family::exponential: {
            const double shape = (spec.family == Family::gamma) ? spec.a : 1.0;
            for (int k = 1; k <= max_order; ++k) {
                double v = 1.0;
                for (int i = 0; i < k; ++i) v *= (shape + i) * spec.theta;
                raw[static_cast<std::size_t>(k)] = v;
            }
            break;
        }
        case Family::poisson:
            // Touchard: E[X^k] = sum_i S(k,i) lambda^i
            for (int k = 1; k <= max_order; ++k) {
                double s = 0.0, lp = 1.0;
                for (int i = 1; i <= k; ++i) {
                    lp *= spec.lambda;
                    s += kStirling2[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * lp;
                }
                raw[static_cast<std::size_t>(k)] = s;
            }
            break;
        case Family::binomial:
            // E[X^k] = sum_i S(k,i) (N)_i p^i with (N)_i the falling factorial
            for (int k = 1; k <= max_order; ++k) {
                double s = 0.0, ff = 1.0, pp = 1.0;
                for (int i = 1; i <= k; ++i) {
                    ff *= spec.trials - (i - 1);
                    pp *= spec.p;
                    if (ff <= 0.0) break;  // i > N: falling factorial vanished
                    s += kStirling2[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * ff * pp;
                }
                raw[static_cast<std::size_t>(k)] = s;
            }
            break;
        case Family::negbinomial: {
            // factorial moments E[(X)_i] = r^(i-rising) * ((1-p)/p)^i
            const double qt = (1.0 - spec.p) / spec.p;
            for (int k = 1; k <= max_order; ++k) {
                double s = 0.0, rf = 1.0, qq = 1.0;
                for (int i = 1; i <= k; ++i) {
                    rf *= spec.r + (i - 1);
                    qq *= qt;
                    s += kStirling2[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * rf * qq;
                }
                raw[static_cast<std::size_t>(k)] = s;
            }
            break;
        }
    }
    return raw;
}

}  // namespace detail

/// Exact central moments up to max_order via closed-form raw moments and the
/// binomial conversion. The independent route against which the estimators'
/// exact-recovery property is checked.
[[nodiscard]] inline MomentSet population_moments(const FamilySpec& spec, int max_order = 8) {
    if (max_order < 2 || max_order > 8) {
        throw std::invalid_argument("population_moments: max_order must be in 2..8");
    }
    spec.validate();
    const auto raw = detail::raw_moments(spec, max_order);
    const double mean = spec.mean();

    MomentSet ms;
    ms.mean = mean;
    ms.max_order = max_order;
    ms.m[0] = 1.0;
    ms.m[1] = 0.0;
    for (int k = 2; k <= max_order; ++k) {
        CompensatedSum s;
        double sign_pow = 1.0;  // (-mean)^(k-j) built from high j down
        // sum_{j=0..k} C(k,j) raw_j (-mean)^(k-j)
        for (int j = k; j >= 0; --j) {
            s.add(detail::binom_coeff(k, j) * raw[static_cast<std::size_t>(j)] * sign_pow);
            sign_pow *= -mean;
        }
        ms.m[static_cast<std::size_t>(k)] = s.value();
    }
    if (max_order >= 4) {
        ms.theta = ms.m[4] * ms.m[2] - ms.m[3] * ms.m[3] - ms.m[2] * ms.m[2] * ms.m[2];
    }
    return ms;
}

// ---------------------------------------------------------------------------
// Samplers. All consume an explicit RngStream; no global state.
// ---------------------------------------------------------------------------

namespace detail {

/// Marsaglia-Tsang squeeze-rejection for shape >= 1; Johnk-style boost
/// X = Gamma(a+1) U^(1/a) below 1. Scale applied by the caller.
inline double gamma_variate_unit(RngStream& g, double shape) {
    if (shape < 1.0) {
        const double u = g.uniform_pos();
        return gamma_variate_unit(g, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = g.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = g.uniform_pos();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

inline double beta_variate(RngStream& g, double a, double b) {
    for (;;) {
        const double x = gamma_variate_unit(g, a);
        const double y = gamma_variate_unit(g, b);
        if (x + y > 0.0) return x / (x + y);
    }
}

inline long poisson_inversion(RngStream& g, double lambda) {
    const double u = g.uniform();
    double prob = std::exp(-lambda);
    double cdf = prob;
    long k = 0;
    while (u > cdf && k < 2000) {
        ++k;
        prob *= lambda / static_cast<double>(k);
        cdf += prob;
    }
    return k;
}

/// Hormann's transformed rejection (PTRS), for lambda >= 10.
inline long poisson_ptrs(RngStream& g, double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = g.uniform() - 0.5;
        const double v = g.uniform();
        const double us = 0.5 - std::fabs(u);
        const auto k = static_cast<long>(std::floor((2.0 * a / us + b) * u + lambda + 0.43));
        if (us >= 0.07 && v <= v_r) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * loglam - lambda - std::lgamma(static_cast<double>(k) + 1.0)) {
            return k;
        }
    }
}

inline long poisson_variate(RngStream& g, double lambda) {
    if (lambda <= 0.0) return 0;
    return lambda < 10.0 ? poisson_inversion(g, lambda) : poisson_ptrs(g, lambda);
}

inline long binomial_inversion(RngStream& g, int n, double p) {
    // requires p <= 0.5
    const double q = 1.0 - p;
    const double ratio = p / q;
    const double u = g.uniform();
    double prob = std::pow(q, n);
    double cdf = prob;
    long k = 0;
    while (u > cdf && k < n) {
        prob *= ratio * static_cast<double>(n - k) / static_cast<double>(k + 1);
        ++k;
        cdf += prob;
    }
    return k;
}

/// Hormann's BTRS transformed rejection, for n*min(p,1-p) large. p <= 0.5.
inline long binomial_btrs(RngStream& g, int n, double p) {
    const double q = 1.0 - p;
    const double spq = std::sqrt(n * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = n * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const auto m = static_cast<long>(std::floor((n + 1) * p));
    const double h = std::lgamma(m + 1.0) + std::lgamma(n - m + 1.0);
    for (;;) {
        const double u = g.uniform() - 0.5;
        double v = g.uniform();
        const double us = 0.5 - std::fabs(u);
        const auto k = static_cast<long>(std::floor((2.0 * a / us + b) * u + c));
        if (k < 0 || k > n) continue;
        if (us >= 0.07 && v <= v_r) return k;
        v = v * alpha / (a / (us * us) + b);
        if (std::log(v) <=
            h - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + (k - m) * lpq) {
            return k;
        }
    }
}

inline long binomial_variate(RngStream& g, int n, double p) {
    const bool flip = p > 0.5;
    const double pp = flip ? 1.0 - p : p;
    const long k = (n * pp <= 30.0) ? binomial_inversion(g, n, pp) : binomial_btrs(g, n, pp);
    return flip ? n - k : k;
}

}  // namespace detail

/// One variate from the family.
[[nodiscard]] inline double family_variate(const FamilySpec& spec, RngStream& g) {
    switch (spec.family) {
        case Family::normal:
            return spec.mu + std::sqrt(spec.sigma2) * g.normal();
        case Family::uniform01:
            return g.uniform();
        case Family::beta:
            return detail::beta_variate(g, spec.a, spec.b);
        case Family::gamma:
            return spec.theta * detail::gamma_variate_unit(g, spec.a);
        case Family::exponential:
            return -spec.theta * std::log(g.uniform_pos());
        case Family::poisson:
            return static_cast<double>(detail::poisson_variate(g, spec.lambda));
        case Family::binomial:
            return static_cast<double>(detail::binomial_variate(g, spec.trials, spec.p));
        case Family::negbinomial: {
            // gamma-Poisson mixture
            const double lam =
                detail::gamma_variate_unit(g, spec.r) * (1.0 - spec.p) / spec.p;
            return static_cast<double>(detail::poisson_variate(g, lam));
        }
    }
    return 0.0;
}

/// n i.i.d. variates, in stream order.
[[nodiscard]] inline Sample sample(const FamilySpec& spec, std::size_t n, RngStream& stream) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    spec.validate();
    Sample s;
    s.kind = spec.kind();
    s.values.resize(n);
    for (auto& v : s.values) v = family_variate(spec, stream);
    return s;
}

/// Density of a continuous family member.
[[nodiscard]] inline double density(const FamilySpec& spec, double x) {
    switch (spec.family) {
        case Family::normal: {
            const double d = x - spec.mu;
            return std::exp(-0.5 * d * d / spec.sigma2) /
                   std::sqrt(6.283185307179586477 * spec.sigma2);
        }
        case Family::uniform01:
            return (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
        case Family::beta: {
            if (x <= 0.0 || x >= 1.0) return 0.0;
            const double lbeta =
                std::lgamma(spec.a) + std::lgamma(spec.b) - std::lgamma(spec.a + spec.b);
            return std::exp((spec.a - 1.0) * std::log(x) + (spec.b - 1.0) * std::log1p(-x) - lbeta);
        }
        case Family::gamma: {
            if (x <= 0.0) return 0.0;
            return std::exp((spec.a - 1.0) * std::log(x) - x / spec.theta -
                            std::lgamma(spec.a) - spec.a * std::log(spec.theta));
        }
        case Family::exponential:
            return (x < 0.0) ? 0.0 : std::exp(-x / spec.theta) / spec.theta;
        default:
            throw std::invalid_argument("density: discrete family");
    }
}

[[nodiscard]] inline double variance_of(const FamilySpec& spec) {
    return population_moments(spec, 2).m[2];
}

/// Max |sum_{k<=j}(mu-k)p(k) - q(j)p(j)| over the support, with the p.m.f.
/// supplied as an explicit vector starting at support point j_lo.
[[nodiscard]] inline double discrete_identity_residual(const std::vector<double>& pmf,
                                                       long j_lo, double mu,
                                                       const QParams& qp) {
    CompensatedSum lhs;
    double max_resid = 0.0;
    for (std::size_t idx = 0; idx < pmf.size(); ++idx) {
        const double j = static_cast<double>(j_lo + static_cast<long>(idx));
        lhs.add((mu - j) * pmf[idx]);
        const double rhs = qp.q_at(j) * pmf[idx];
        max_resid = std::max(max_resid, std::fabs(lhs.value() - rhs));
    }
    return max_resid;
}

/// Brute-force check of the discrete defining identity for a family member,
/// using p.m.f. ratio recurrences (no factorials). j_max <= 0 selects a
/// support prefix holding at least 1 - 1e-13 of the mass.
[[nodiscard]] inline double verify_discrete_identity(const FamilySpec& spec, const QParams& qp,
                                                     long j_max = 0) {
    spec.validate();
    if (spec.kind() != Case::discrete) {
        throw std::invalid_argument("verify_discrete_identity: continuous family");
    }
    std::vector<double> pmf;
    double prob = 0.0;
    long hard_cap = 0;
    switch (spec.family) {
        case Family::poisson:
            prob = std::exp(-spec.lambda);
            hard_cap = 200000;
            break;
        case Family::binomial:
            prob = std::pow(1.0 - spec.p, spec.trials);
            hard_cap = spec.trials;
            break;
        case Family::negbinomial:
            prob = std::pow(spec.p, spec.r);
            hard_cap = 2000000;
            break;
        default:
            break;
    }
    if (j_max > 0) hard_cap = std::min(hard_cap, j_max);

    CompensatedSum mass;
    long j = 0;
    for (;;) {
        pmf.push_back(prob);
        mass.add(prob);
        if (j >= hard_cap) break;
        if (j_max <= 0 && mass.value() >= 1.0 - 1e-13 && prob < 1e-18) break;
        const double next_j = static_cast<double>(j + 1);
        switch (spec.family) {
            case Family::poisson:
                prob *= spec.lambda / next_j;
                break;
            case Family::binomial:
                prob *= (static_cast<double>(spec.trials - j) / next_j) *
                        (spec.p / (1.0 - spec.p));
                break;
            case Family::negbinomial:
                prob *= ((next_j - 1.0 + spec.r) / next_j) * (1.0 - spec.p);
                break;
            default:
                break;
        }
        ++j;
    }
    return discrete_identity_residual(pmf, 0, spec.mean(), qp);
}

/// Evaluation grid spanning the interior of the support.
[[nodiscard]] inline std::vector<double> default_identity_grid(const FamilySpec& spec,
                                                               std::size_t points = 50) {
    double lo, hi;
    switch (spec.family) {
        case Family::normal: {
            const double sd = std::sqrt(spec.sigma2);
            lo = spec.mu - 4.0 * sd;
            hi = spec.mu + 4.0 * sd;
            break;
        }
        case Family::uniform01:
        case Family::beta:
            lo = 0.02;
            hi = 0.98;
            break;
        case Family::gamma:
        case Family::exponential: {
            const double mean = spec.mean();
            const double sd = std::sqrt(variance_of(spec));
            lo = 0.05 * mean;
            hi = mean + 8.0 * sd;
            break;
        }
        default:
            throw std::invalid_argument("default_identity_grid: discrete family");
    }
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return grid;
}

/// Brute-force check of the continuous defining identity: the left side is
/// integrated by adaptive tanh-sinh quadrature (abs. tolerance 1e-10), the
/// right side is q(x) f(x) in closed form. Returns the max residual over the grid.
[[nodiscard]] inline double verify_continuous_identity(const FamilySpec& spec, const QParams& qp,
                                                       const std::vector<double>& grid) {
    spec.validate();
    if (spec.kind() != Case::continuous) {
        throw std::invalid_argument("verify_continuous_identity: discrete family");
    }
    double support_lo;
    if (spec.family == Family::normal) {
        support_lo = spec.mu - 45.0 * std::sqrt(spec.sigma2);
    } else {
        support_lo = 0.0;
    }
    const double mu = spec.mean();
    const TanhSinh quad(1e-10);
    double max_resid = 0.0;
    for (double x : grid) {
        const double lhs = quad.integrate(
            [&](double t) { return (mu - t) * density(spec, t); }, support_lo, x);
        const double rhs = qp.q_at(x) * density(spec, x);
        max_resid = std::max(max_resid, std::fabs(lhs - rhs));
    }
    return max_resid;
}

[[nodiscard]] inline double verify_continuous_identity(const FamilySpec& spec, const QParams& qp) {
    return verify_continuous_identity(spec, qp, default_identity_grid(spec));
}

}  // namespace pearsonq
