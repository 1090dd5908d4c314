#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "pearsonq/asymptotics.hpp"
#include "pearsonq/distributions.hpp"

using namespace pearsonq;
using Catch::Approx;

namespace {

MomentSet population(const char* family) {
    return population_moments(FamilySpec::parse(family), 8);
}

// max over entries of |a - b| / max(|a|, |b|, floor)
double max_rel_err(const Mat4& a, const std::array<oracles::Vec4, 4>& b, double floor_scale) {
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double x = a(i, j), y = b[i][j];
            const double denom = std::max({std::fabs(x), std::fabs(y), floor_scale});
            worst = std::max(worst, std::fabs(x - y) / denom);
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("sigma matrix at exact normal moments", "[asymptotics]") {
    std::array<double, 9> mu{};  // standard normal central moments
    mu[2] = 1; mu[4] = 3; mu[6] = 15; mu[8] = 105;
    const Mat4 s = sigma_matrix(mu);
    const double expected[4][4] = {
        {1, 0, 3, 0}, {0, 2, 0, 12}, {3, 0, 15, 0}, {0, 12, 0, 96}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            REQUIRE(s(i, j) == Approx(expected[i][j]).margin(1e-12));
}

TEST_CASE("sigma matrix of degenerate moments is zero", "[asymptotics]") {
    const Mat4 s = sigma_matrix({});
    for (double v : s.a) REQUIRE(v == 0.0);
}

TEST_CASE("sigma matrix entry (4,4) at exponential moments", "[asymptotics]") {
    // central moments of Exp(1) are the derangement numbers
    std::array<double, 9> mu{};
    mu[2] = 1; mu[3] = 2; mu[4] = 9; mu[5] = 44; mu[6] = 265; mu[7] = 1854; mu[8] = 14833;
    const Mat4 s = sigma_matrix(mu);
    REQUIRE(s(3, 3) == Approx(14833.0 - 81.0).epsilon(1e-14));
    REQUIRE(s(3, 3) == Approx(14752.0));
}

TEST_CASE("sigma is symmetric PSD on real moment sets", "[asymptotics]") {
    for (const char* family : {"normal", "uniform01", "gamma:a=3,theta=2", "poisson:lambda=4"}) {
        const MomentSet ms = population(family);
        const Mat4 s = sigma_matrix(ms.m);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) REQUIRE(s(i, j) == Approx(s(j, i)).margin(1e-12));
        // PSD check via random quadratic forms
        RngStream g(5, stream_label("asymptotics/psd"));
        for (int k = 0; k < 200; ++k) {
            std::array<double, 4> v{};
            for (auto& x : v) x = g.normal();
            REQUIRE(quad_form(v, s) >= -1e-9 * (s(0, 0) + s(1, 1) + s(2, 2) + s(3, 3)));
        }
    }
}

TEST_CASE("jacobian structure", "[asymptotics]") {
    const auto [j_psi, j_phi] = jacobians({0.7, 1.3, 0.4, 5.2}, Case::continuous);
    // j_psi rows 1-2 are unit rows; the only off-diagonal entries are (3,1), (4,1)
    REQUIRE(j_psi(0, 0) == 1.0);
    REQUIRE(j_psi(1, 1) == 1.0);
    REQUIRE(j_psi(2, 0) == Approx(-3.0 * 1.3));
    REQUIRE(j_psi(3, 0) == Approx(-4.0 * 0.4));
    REQUIRE(j_psi(2, 2) == 1.0);
    REQUIRE(j_psi(3, 3) == 1.0);
    // j_phi first row is e1
    REQUIRE(j_phi(0, 0) == 1.0);
    REQUIRE(j_phi(0, 1) == 0.0);
    REQUIRE(j_phi(1, 0) == 0.0);
}

TEST_CASE("jacobian row 2 at the normal point", "[asymptotics]") {
    const auto [j_psi, j_phi] = jacobians({0.0, 1.0, 0.0, 3.0}, Case::continuous);
    REQUIRE(j_phi(1, 0) == Approx(0.0).margin(1e-15));
    REQUIRE(j_phi(1, 1) == Approx(-1.0).epsilon(1e-14));
    REQUIRE(j_phi(1, 2) == Approx(0.0).margin(1e-15));
    REQUIRE(j_phi(1, 3) == Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("analytic jacobian matches finite differences at the pinned point", "[asymptotics]") {
    const oracles::Vec4 point = {0.0, 1.3, 0.4, 5.2};
    const auto [j_psi, j_phi] = jacobians(point, Case::continuous);
    const auto fd = oracles::fd_jacobian(
        [&](const oracles::Vec4& x) { return oracles::phi_map(x, Case::continuous); }, point);
    REQUIRE(max_rel_err(j_phi, fd, 1e-2 * j_phi.max_abs()) < 1e-6);
}

TEST_CASE("analytic jacobians match finite differences at random points", "[asymptotics]") {
    for (const Case kind : {Case::continuous, Case::discrete}) {
        const auto points = oracles::random_moment_points(50, kind == Case::continuous ? 101 : 202);
        double worst = 0.0;
        for (const auto& point : points) {
            const auto [j_psi, j_phi] = jacobians(point, kind);
            const auto fd = oracles::fd_jacobian(
                [&](const oracles::Vec4& x) { return oracles::phi_map(x, kind); }, point);
            worst = std::max(worst, max_rel_err(j_phi, fd, 1e-2 * j_phi.max_abs()));
        }
        INFO("case " << to_string(kind));
        REQUIRE(worst < 1e-6);
    }
}

TEST_CASE("asymptotic covariance at exact normal moments", "[asymptotics]") {
    const CovModel cov = asymptotic_cov(population("normal"), Case::continuous);
    REQUIRE(cov.d(0, 0) == Approx(1.0).epsilon(1e-12));          // Var of the mean = mu2
    REQUIRE(cov.d(1, 1) == Approx(2.0 / 3.0).epsilon(1e-12));    // Var delta-hat
    REQUIRE(cov.d(2, 2) == Approx(1.5).epsilon(1e-12));          // Var beta-hat = 3 sigma^2/2
    REQUIRE(cov.d(1, 2) == Approx(0.0).margin(1e-12));
    // d symmetric
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            REQUIRE(cov.d(i, j) == Approx(cov.d(j, i)).margin(1e-12));
}

TEST_CASE("normality null block from the composition, sigma2 != 1", "[asymptotics]") {
    const CovModel cov = asymptotic_cov(population("normal:mu=3,sigma2=4"), Case::continuous);
    REQUIRE(cov.d(1, 1) == Approx(2.0 / 3.0).epsilon(1e-9));
    REQUIRE(cov.d(2, 2) == Approx(1.5 * 4.0).epsilon(1e-9));
    REQUIRE(cov.d(1, 2) == Approx(0.0).margin(1e-9));
}

TEST_CASE("composition equals brute-force delta method", "[asymptotics]") {
    // beta moments are rescaled to unit order (moments of 10X) so that the
    // h=1e-5 differencing step resolves the map; the algebra is scale-free.
    auto scaled_beta = [] {
        MomentSet ms = population_moments(FamilySpec::parse("beta:a=2,b=5"), 8);
        ms.mean *= 10.0;
        double pw = 1.0;
        for (int k = 2; k <= 8; ++k) {
            pw = std::pow(10.0, k);
            ms.m[static_cast<std::size_t>(k)] *= pw;
        }
        ms.theta = ms.m[4] * ms.m[2] - ms.m[3] * ms.m[3] - ms.m[2] * ms.m[2] * ms.m[2];
        return ms;
    };
    for (const char* family : {"gamma:a=3,theta=1", "beta-x10", "normal:mu=1,sigma2=2"}) {
        const MomentSet ms =
            std::string(family) == "beta-x10" ? scaled_beta() : population(family);
        const CovModel cov = asymptotic_cov(ms, Case::continuous);
        // composed map g(x) = phi(psi(x) + (mu,0,0,0)) differentiated numerically
        const oracles::Vec4 x0 = {0.0, ms.m[2], ms.m[3], ms.m[4]};
        const double mu = ms.mean;
        const auto g = [&](const oracles::Vec4& x) {
            oracles::Vec4 t = oracles::psi_map(x);
            t[0] += mu;
            return oracles::phi_map(t, Case::continuous);
        };
        const auto jg = oracles::fd_jacobian(g, x0);
        const Mat4 sigma = sigma_matrix(ms.m);
        Mat4 fd_d;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < 4; ++k)
                    for (std::size_t l = 0; l < 4; ++l)
                        s += jg[i][k] * sigma(k, l) * jg[j][l];
                fd_d(i, j) = s;
            }
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                const double denom =
                    std::max({std::fabs(cov.d(i, j)), std::fabs(fd_d(i, j)), 1e-3 * cov.d.max_abs()});
                INFO(family << " entry " << i << "," << j);
                REQUIRE(std::fabs(cov.d(i, j) - fd_d(i, j)) / denom < 1e-5);
            }
    }
}

TEST_CASE("poisson null covariance from the composition", "[asymptotics]") {
    // tau = (delta-hat, beta-hat, m2 - mean): rows 2-3 of J_phi plus (-1,1,0,0),
    // composed with J_psi and Sigma, must reproduce the closed form at exact
    // Poisson moments.
    for (const double lambda : {1.0, 5.0, 10.0}) {
        const FamilySpec spec = FamilySpec::parse("poisson:lambda=" + std::to_string(lambda));
        const MomentSet ms = population_moments(spec, 8);
        const CovModel cov = asymptotic_cov(ms, Case::discrete);

        std::array<std::array<double, 4>, 3> j_tau{};
        for (std::size_t c = 0; c < 4; ++c) {
            j_tau[0][c] = cov.j_phi(1, c);
            j_tau[1][c] = cov.j_phi(2, c);
        }
        j_tau[2] = {-1.0, 1.0, 0.0, 0.0};
        const auto c_rows = rows_times(j_tau, cov.j_psi);

        Mat3 composed;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < 4; ++k)
                    for (std::size_t l = 0; l < 4; ++l)
                        s += c_rows[i][k] * cov.sigma(k, l) * c_rows[j][l];
                composed(i, j) = s;
            }

        const Mat3 expected = null_cov_poisson(lambda);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                INFO("lambda=" << lambda << " entry " << i << "," << j);
                REQUIRE(composed(i, j) ==
                        Approx(expected(i, j)).epsilon(1e-9).margin(1e-9));
            }
    }
}

TEST_CASE("null_cov_poisson closed form and determinant", "[asymptotics]") {
    // lambda = 1: (1/6) [[13,-4,0],[-4,16,12],[0,12,12]] with the (2,2) entry
    // carrying the +9 the composition requires
    const Mat3 m = null_cov_poisson(1.0);
    REQUIRE(m(0, 0) == Approx(13.0 / 6.0));
    REQUIRE(m(0, 1) == Approx(-4.0 / 6.0));
    REQUIRE(m(0, 2) == 0.0);
    REQUIRE(m(1, 1) == Approx(16.0 / 6.0));
    REQUIRE(m(1, 2) == Approx(2.0));
    REQUIRE(m(2, 2) == Approx(2.0));
    REQUIRE(det3(m) == Approx(2.0).epsilon(1e-12));  // det = 2 lambda^3

    const Mat3 m10 = null_cov_poisson(10.0);
    REQUIRE(m10(0, 0) == Approx(49.0 / 60.0));
    REQUIRE(m10(0, 1) == Approx(41.0 / 60.0));
    REQUIRE(m10(1, 1) == Approx(889.0 / 60.0));
    REQUIRE(m10(1, 2) == Approx(1200.0 / 60.0));
    REQUIRE(m10(2, 2) == Approx(12000.0 / 60.0));
    REQUIRE(det3(m10) == Approx(2000.0).epsilon(1e-12));

    REQUIRE_THROWS_AS(null_cov_poisson(0.0), std::invalid_argument);
}

TEST_CASE("inverse3_checked flags singular matrices", "[asymptotics]") {
    Mat3 singular;
    singular(0, 0) = 1.0;
    singular(0, 1) = singular(1, 0) = 2.0;
    singular(1, 1) = 4.0;  // rank 1 block
    singular(2, 2) = 1.0;
    REQUIRE_THROWS_AS(inverse3_checked(singular), SingularCovariance);

    const Mat3 fine = null_cov_poisson(2.0);
    const Mat3 inv = inverse3_checked(fine);
    const Mat3 prod = inv * fine;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            REQUIRE(prod(i, j) == Approx(i == j ? 1.0 : 0.0).margin(1e-12));
}

TEST_CASE("null_cov_normality and its closed-form inverse", "[asymptotics]") {
    const Mat2 m = null_cov_normality(1.0);
    REQUIRE(m(0, 0) == Approx(2.0 / 3.0));
    REQUIRE(m(1, 1) == Approx(1.5));
    const Mat2 m4 = null_cov_normality(4.0);
    REQUIRE(m4(0, 0) == Approx(2.0 / 3.0));
    REQUIRE(m4(1, 1) == Approx(6.0));
    const Mat2 inv = null_cov_normality_inverse(1.0);
    REQUIRE(inv(0, 0) == Approx(1.5));
    REQUIRE(inv(1, 1) == Approx(2.0 / 3.0));
    REQUIRE_THROWS_AS(null_cov_normality(0.0), std::invalid_argument);
}

TEST_CASE("sigma0_delta reference values", "[asymptotics]") {
    REQUIRE(sigma0_delta(1.0, 0.0) == Approx(2.0 / 3.0));
    REQUIRE(sigma0_delta(4.0, 0.0) == Approx(2.0 / 3.0));
    REQUIRE(sigma0_delta(1.0, 2.0) == Approx(14.0).epsilon(1e-14));
    REQUIRE_THROWS_AS(sigma0_delta(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("sigma0_symmetry reference values", "[asymptotics]") {
    REQUIRE(sigma0_symmetry(1.0, 3.0, 15.0) == Approx(6.0));
    // uniform(0,1): mu2 = 1/12, mu4 = 1/80, mu6 = 1/448 -> 1/840
    REQUIRE(sigma0_symmetry(1.0 / 12.0, 1.0 / 80.0, 1.0 / 448.0) ==
            Approx(1.0 / 840.0).epsilon(1e-12));
    REQUIRE_THROWS_AS(sigma0_symmetry(0.0, 0.0, 0.0), NonpositiveVariance);
}
