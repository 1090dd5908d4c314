#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pearsonq/distributions.hpp"
#include "pearsonq/estimators.hpp"

using namespace pearsonq;
using Catch::Approx;

TEST_CASE("family spec parsing round-trips", "[distributions]") {
    for (const char* text : {"normal:mu=0,sigma2=1", "uniform01", "beta:a=5,b=5",
                             "gamma:a=10,theta=1", "exponential:theta=1", "poisson:lambda=10",
                             "binomial:N=10,p=0.65", "negbinomial:r=10,p=0.7"}) {
        const FamilySpec spec = FamilySpec::parse(text);
        const FamilySpec again = FamilySpec::parse(spec.to_string());
        REQUIRE(again.to_string() == spec.to_string());
    }
    REQUIRE(FamilySpec::parse("normal").sigma2 == 1.0);
    REQUIRE(FamilySpec::parse("uniform").family == Family::uniform01);
    REQUIRE_THROWS_AS(FamilySpec::parse("cauchy"), DataError);
    REQUIRE_THROWS_AS(FamilySpec::parse("beta:a=5"), DataError);
    REQUIRE_THROWS_AS(FamilySpec::parse("beta:a=5,b=0"), DataError);
    REQUIRE_THROWS_AS(FamilySpec::parse("binomial:N=10,p=1.5"), DataError);
    REQUIRE_THROWS_AS(FamilySpec::parse("normal:mu=0,bogus=1"), DataError);
}

TEST_CASE("true q parameters match their published values", "[distributions]") {
    const QParams uni = true_q_params(FamilySpec::parse("uniform01"));
    REQUIRE(uni.delta == Approx(-0.5));
    REQUIRE(uni.beta == Approx(0.0));
    REQUIRE(uni.gamma == Approx(0.125));

    const QParams b55 = true_q_params(FamilySpec::parse("beta:a=5,b=5"));
    REQUIRE(b55.delta == Approx(-0.1));
    REQUIRE(b55.beta == Approx(0.0).margin(1e-15));
    REQUIRE(b55.gamma == Approx(0.025));

    const QParams b28 = true_q_params(FamilySpec::parse("beta:a=2,b=8"));
    REQUIRE(b28.delta == Approx(-0.1));
    REQUIRE(b28.beta == Approx(0.06));
    REQUIRE(b28.gamma == Approx(0.016));

    const QParams b02 = true_q_params(FamilySpec::parse("beta:a=0.2,b=0.2"));
    REQUIRE(b02.delta == Approx(-2.5));
    REQUIRE(b02.gamma == Approx(0.625));

    const QParams g10 = true_q_params(FamilySpec::parse("gamma:a=10,theta=1"));
    REQUIRE(g10.delta == Approx(0.0));
    REQUIRE(g10.beta == Approx(1.0));
    REQUIRE(g10.gamma == Approx(10.0));

    const QParams bin = true_q_params(FamilySpec::parse("binomial:N=10,p=0.3"));
    REQUIRE(bin.delta == Approx(0.0));
    REQUIRE(bin.beta == Approx(-0.3));
    REQUIRE(bin.gamma == Approx(2.1));
}

TEST_CASE("discrete identity holds for the true parameters", "[distributions]") {
    const FamilySpec poisson4 = FamilySpec::parse("poisson:lambda=4");
    REQUIRE(verify_discrete_identity(poisson4, true_q_params(poisson4), 60) < 1e-12);

    const FamilySpec bin = FamilySpec::parse("binomial:N=10,p=0.3");
    REQUIRE(verify_discrete_identity(bin, true_q_params(bin)) < 1e-12);

    const FamilySpec nb = FamilySpec::parse("negbinomial:r=3,p=0.6");
    REQUIRE(verify_discrete_identity(nb, true_q_params(nb)) < 1e-12);
}

TEST_CASE("discrete identity for the three-point uniform", "[distributions]") {
    // uniform on {-1, 0, 1}: p = 1/3 each, mu = 0, q params (-1/2, -1/2, 1)
    QParams qp;
    qp.mu = 0.0;
    qp.delta = -0.5;
    qp.beta = -0.5;
    qp.gamma = 1.0;
    qp.kind = Case::discrete;
    const std::vector<double> pmf = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    REQUIRE(discrete_identity_residual(pmf, -1, 0.0, qp) < 1e-15);
}

TEST_CASE("discrete identity rejects wrong parameters", "[distributions]") {
    const FamilySpec poisson4 = FamilySpec::parse("poisson:lambda=4");
    QParams wrong = true_q_params(poisson4);
    wrong.gamma += 0.05;
    REQUIRE(verify_discrete_identity(poisson4, wrong, 60) > 1e-4);
}

TEST_CASE("continuous identity holds for the true parameters", "[distributions]") {
    const FamilySpec normal = FamilySpec::parse("normal");
    REQUIRE(verify_continuous_identity(normal, true_q_params(normal)) < 1e-8);

    const FamilySpec g10 = FamilySpec::parse("gamma:a=10,theta=1");
    std::vector<double> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(0.5 + i * (30.0 - 0.5) / 49.0);
    REQUIRE(verify_continuous_identity(g10, true_q_params(g10), grid) < 1e-8);

    const FamilySpec b02 = FamilySpec::parse("beta:a=0.2,b=0.2");
    REQUIRE(verify_continuous_identity(b02, true_q_params(b02)) < 1e-7);

    const FamilySpec b55 = FamilySpec::parse("beta:a=5,b=5");
    REQUIRE(verify_continuous_identity(b55, true_q_params(b55)) < 1e-8);
}

TEST_CASE("identities hold across random parameter draws", "[distributions]") {
    RngStream g(61, stream_label("distributions/random-params"));
    for (int trial = 0; trial < 5; ++trial) {
        FamilySpec beta;
        beta.family = Family::beta;
        beta.a = 0.2 + 7.8 * g.uniform();
        beta.b = 0.2 + 7.8 * g.uniform();
        REQUIRE(verify_continuous_identity(beta, true_q_params(beta)) < 1e-7);

        FamilySpec gam;
        gam.family = Family::gamma;
        gam.a = 0.5 + 29.5 * g.uniform();
        gam.theta = 0.25 + 3.0 * g.uniform();
        REQUIRE(verify_continuous_identity(gam, true_q_params(gam)) < 1e-7);

        FamilySpec bin;
        bin.family = Family::binomial;
        bin.trials = 5 + static_cast<int>(35.0 * g.uniform());
        bin.p = 0.1 + 0.8 * g.uniform();
        REQUIRE(verify_discrete_identity(bin, true_q_params(bin)) < 1e-12);

        FamilySpec nb;
        nb.family = Family::negbinomial;
        nb.r = 0.5 + 14.5 * g.uniform();
        nb.p = 0.3 + 0.6 * g.uniform();
        REQUIRE(verify_discrete_identity(nb, true_q_params(nb)) < 1e-12);

        FamilySpec poi;
        poi.family = Family::poisson;
        poi.lambda = 0.2 + 20.0 * g.uniform();
        REQUIRE(verify_discrete_identity(poi, true_q_params(poi)) < 1e-12);
    }
}

TEST_CASE("continuous identity rejects wrong parameters", "[distributions]") {
    const FamilySpec normal = FamilySpec::parse("normal");
    QParams wrong = true_q_params(normal);
    wrong.delta += 0.02;
    REQUIRE(verify_continuous_identity(normal, wrong) > 1e-4);
}

TEST_CASE("population moments: closed-form reference values", "[distributions]") {
    const MomentSet n01 = population_moments(FamilySpec::parse("normal"), 8);
    REQUIRE(n01.m[2] == Approx(1.0));
    REQUIRE(n01.m[3] == Approx(0.0).margin(1e-15));
    REQUIRE(n01.m[4] == Approx(3.0));
    REQUIRE(n01.m[5] == Approx(0.0).margin(1e-15));
    REQUIRE(n01.m[6] == Approx(15.0));
    REQUIRE(n01.m[7] == Approx(0.0).margin(1e-12));
    REQUIRE(n01.m[8] == Approx(105.0));

    const MomentSet uni = population_moments(FamilySpec::parse("uniform01"), 8);
    REQUIRE(uni.m[2] == Approx(1.0 / 12.0).epsilon(1e-13));
    REQUIRE(uni.m[4] == Approx(1.0 / 80.0).epsilon(1e-13));
    REQUIRE(uni.m[6] == Approx(1.0 / 448.0).epsilon(1e-12));

    const double lam = 2.0;
    const MomentSet poi = population_moments(FamilySpec::parse("poisson:lambda=2"), 8);
    REQUIRE(poi.m[2] == Approx(lam).epsilon(1e-13));
    REQUIRE(poi.m[3] == Approx(lam).epsilon(1e-13));
    REQUIRE(poi.m[4] == Approx(lam + 3 * lam * lam).epsilon(1e-13));
    REQUIRE(poi.m[5] == Approx(lam + 10 * lam * lam).epsilon(1e-12));
    REQUIRE(poi.m[6] == Approx(lam + 25 * lam * lam + 15 * lam * lam * lam).epsilon(1e-12));
    REQUIRE(poi.m[8] ==
            Approx(lam + 119 * lam * lam + 490 * lam * lam * lam + 105 * std::pow(lam, 4))
                .epsilon(1e-12));
}

TEST_CASE("exponential central moments are the derangement numbers", "[distributions]") {
    const MomentSet e1 = population_moments(FamilySpec::parse("exponential:theta=1"), 8);
    REQUIRE(e1.m[2] == Approx(1.0));
    REQUIRE(e1.m[3] == Approx(2.0));
    REQUIRE(e1.m[4] == Approx(9.0));
    REQUIRE(e1.m[5] == Approx(44.0));
    REQUIRE(e1.m[6] == Approx(265.0));
    REQUIRE(e1.m[7] == Approx(1854.0));
    REQUIRE(e1.m[8] == Approx(14833.0));
}

TEST_CASE("population moments agree with the Pearson recurrence", "[distributions]") {
    for (const char* text : {"uniform01", "beta:a=2,b=8", "gamma:a=10,theta=1",
                             "gamma:a=0.5,theta=2", "normal:mu=1,sigma2=4"}) {
        const FamilySpec spec = FamilySpec::parse(text);
        const QParams qp = true_q_params(spec);
        const auto expect = oracles::pearson_recurrence_moments(qp.delta, qp.beta, qp.gamma);
        const MomentSet ms = population_moments(spec, 8);
        for (int k = 2; k <= 8; ++k) {
            INFO(text << " order " << k);
            REQUIRE(ms.m[static_cast<std::size_t>(k)] ==
                    Approx(expect[static_cast<std::size_t>(k)]).epsilon(1e-9).margin(1e-12));
        }
    }
}

TEST_CASE("exact recovery: estimators invert the population moments", "[distributions]") {
    for (const char* text : {"normal:mu=0,sigma2=1", "normal:mu=2,sigma2=5", "uniform01",
                             "beta:a=5,b=5", "beta:a=0.2,b=0.2", "beta:a=2,b=8",
                             "gamma:a=1,theta=1", "gamma:a=10,theta=1", "gamma:a=50,theta=1",
                             "exponential:theta=2", "poisson:lambda=1", "poisson:lambda=10",
                             "binomial:N=10,p=0.65", "binomial:N=100,p=0.5",
                             "negbinomial:r=3,p=0.6", "negbinomial:r=10,p=0.7"}) {
        const FamilySpec spec = FamilySpec::parse(text);
        const QParams truth = true_q_params(spec);
        const QParams est = estimate(population_moments(spec, 4), spec.kind());
        const double scale = std::max(1.0, std::fabs(truth.gamma));
        INFO(text);
        REQUIRE(std::fabs(est.delta - truth.delta) < 1e-10);
        REQUIRE(std::fabs(est.beta - truth.beta) < 1e-10 * scale);
        REQUIRE(std::fabs(est.gamma - truth.gamma) < 1e-10 * scale);
    }
}

TEST_CASE("samplers reproduce their population moments", "[distributions]") {
    // m2 and m3 from 1e6 variates within 5 asymptotic standard errors
    for (const char* text : {"normal:mu=0,sigma2=1", "uniform01", "beta:a=5,b=5",
                             "beta:a=0.2,b=0.2", "gamma:a=10,theta=1", "gamma:a=0.7,theta=2",
                             "exponential:theta=1", "poisson:lambda=1", "poisson:lambda=10",
                             "binomial:N=10,p=0.65", "binomial:N=100,p=0.35",
                             "negbinomial:r=10,p=0.7"}) {
        const FamilySpec spec = FamilySpec::parse(text);
        const MomentSet pop = population_moments(spec, 8);
        const std::size_t n = 1000000;
        RngStream g = substream(777, stream_label(std::string("sampler-check/") + text), 0);
        const Sample s = sample(spec, n, g);
        const MomentSet ms = central_moments(s, 3);

        const double se_m2 = std::sqrt((pop.m[4] - pop.m[2] * pop.m[2]) / n);
        const double var_m3 = pop.m[6] - 6.0 * pop.m[4] * pop.m[2] - pop.m[3] * pop.m[3] +
                              9.0 * pop.m[2] * pop.m[2] * pop.m[2];
        const double se_m3 = std::sqrt(var_m3 / n);
        INFO(text << ": m2 " << ms.m[2] << " vs " << pop.m[2] << ", m3 " << ms.m[3] << " vs "
                  << pop.m[3]);
        REQUIRE(std::fabs(ms.m[2] - pop.m[2]) < 5.0 * se_m2);
        REQUIRE(std::fabs(ms.m[3] - pop.m[3]) < 5.0 * se_m3);
    }
}

TEST_CASE("sampler means satisfy CLT bounds at n=1e6", "[distributions]") {
    const std::size_t n = 1000000;
    {
        RngStream g = substream(778, stream_label("clt/normal"), 0);
        const Sample s = sample(FamilySpec::parse("normal"), n, g);
        const MomentSet ms = central_moments(s, 2);
        REQUIRE(std::fabs(ms.mean) < 0.004);          // 4 sigma
        REQUIRE(std::fabs(ms.m[2] - 1.0) < 0.006);
    }
    {
        RngStream g = substream(779, stream_label("clt/poisson10"), 0);
        const Sample s = sample(FamilySpec::parse("poisson:lambda=10"), n, g);
        const MomentSet ms = central_moments(s, 2);
        REQUIRE(std::fabs(ms.mean - 10.0) < 0.013);   // ~4 sigma
    }
}

TEST_CASE("samplers are deterministic given the stream", "[distributions]") {
    for (const char* text : {"beta:a=0.2,b=0.2", "poisson:lambda=10", "binomial:N=100,p=0.35",
                             "negbinomial:r=10,p=0.7"}) {
        const FamilySpec spec = FamilySpec::parse(text);
        RngStream g1 = substream(5, stream_label("determinism"), 3);
        RngStream g2 = substream(5, stream_label("determinism"), 3);
        const Sample a = sample(spec, 500, g1);
        const Sample b = sample(spec, 500, g2);
        REQUIRE(a.values == b.values);
    }
}

TEST_CASE("discrete samplers emit integers; continuous stay in support", "[distributions]") {
    RngStream g = substream(6, stream_label("support"), 0);
    const Sample b = sample(FamilySpec::parse("binomial:N=10,p=0.65"), 5000, g);
    for (const double v : b.values) {
        REQUIRE(v == std::floor(v));
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 10.0);
    }
    const Sample u = sample(FamilySpec::parse("beta:a=0.2,b=0.2"), 5000, g);
    for (const double v : u.values) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
}
