#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "moonlab/errors.hpp"
#include "moonlab/oracles.hpp"

using namespace moonlab;
using namespace moonlab::oracle;

namespace {

const SurvivalFunction kExp{DistributionSpec{}};
constexpr DependencyModel kModels[] = {DependencyModel::Linear, DependencyModel::GlobalCCF, DependencyModel::MarginalCCF};

}  // namespace

TEST(Independent, Reliability) {
    EXPECT_EQ(indep_moon_reliability(0.0, {3, 2}, kExp), 1.0);
    EXPECT_NEAR(indep_moon_reliability(1.0, {3, 3}, kExp), std::exp(-3.0), 1e-15);
    EXPECT_NEAR(indep_moon_reliability(std::numbers::ln2, {3, 2}, kExp), 0.5, 1e-15);
}

TEST(Independent, HarmonicMeans) {
    EXPECT_NEAR(indep_moon_mean_exponential({3, 3}, {}), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(indep_moon_mean_exponential({3, 2}, {}), 5.0 / 6.0, 1e-15);
    EXPECT_NEAR(indep_moon_mean_exponential({3, 1}, {}), 11.0 / 6.0, 1e-15);
    EXPECT_NEAR(indep_moon_mean_exponential({3, 1}, {1.0, 2.0}), 11.0 / 3.0, 1e-15);
    EXPECT_THROW(indep_moon_mean_exponential({3, 1}, {2.0, 1.0}), UnsupportedError);
}

TEST(LinearMean, Prediction) {
    EXPECT_NEAR(linear_mean_prediction(0.0, {3, 1}, {}), 11.0 / 6.0, 1e-15);
    EXPECT_NEAR(linear_mean_prediction(1.0, {3, 1}, {}), 1.0, 1e-15);
    EXPECT_NEAR(linear_mean_prediction(0.5, {3, 2}, {}), 11.0 / 12.0, 1e-15);
    EXPECT_THROW(linear_mean_prediction(0.5, {3, 2}, {0.5, 1.0}), UnsupportedError);
}

TEST(GlobalCcf, Mixture) {
    for (const double t : {0.0, 0.3, 1.7}) {
        EXPECT_NEAR(global_ccf_reliability(t, 0.0, {3, 2}, kExp), indep_moon_reliability(t, {3, 2}, kExp), 1e-15);
        EXPECT_NEAR(global_ccf_reliability(t, 1.0, {3, 2}, kExp), kExp(t), 1e-15);
    }
    EXPECT_NEAR(global_ccf_reliability(1.0, 0.5, {3, 3}, kExp), 0.20883325476965314, 1e-14);
    EXPECT_NEAR(global_ccf_reliability(1.0, 0.5, {3, 3}, kExp), 0.2088332, 1e-7);
}

TEST(MarginalCcf, Endpoints) {
    for (const double t : {0.0, 0.3, 1.7}) {
        EXPECT_NEAR(marginal_ccf_reliability(t, 0.0, {3, 1}, kExp), indep_moon_reliability(t, {3, 1}, kExp), 1e-15);
        EXPECT_NEAR(marginal_ccf_reliability(t, 1.0, {3, 1}, kExp), kExp(t), 1e-15);
    }
}

// Values computed independently with scipy.integrate.quad from the joint law.
TEST(MarginalCcf, ReferenceValues) {
    EXPECT_NEAR(marginal_ccf_reliability(1.0, 0.5, {3, 1}, kExp), 0.6448535508974587, 1e-13);
    EXPECT_NEAR(marginal_ccf_reliability(0.7, 0.3, {3, 2}, kExp), 0.49524680530892723, 1e-13);
}

TEST(MarginalCcf, MeansByConditioning) {
    EXPECT_NEAR(model_mean(DependencyModel::MarginalCCF, 0.5, {3, 1}, {}), 1.6041666666666667, 1e-5);
    EXPECT_NEAR(model_mean(DependencyModel::MarginalCCF, 0.5, {3, 2}, {}), 0.9166666666666667, 1e-5);
    EXPECT_NEAR(model_mean(DependencyModel::MarginalCCF, 0.5, {3, 3}, {}), 0.4791666666666667, 1e-5);
}

TEST(MarginalCcf, DepartsFromLinearPrediction) {
    EXPECT_GT(model_mean(DependencyModel::MarginalCCF, 0.5, {3, 1}, {}) - linear_mean_prediction(0.5, {3, 1}, {}), 0.05);
    EXPECT_GT(linear_mean_prediction(0.5, {3, 3}, {}) - model_mean(DependencyModel::MarginalCCF, 0.5, {3, 3}, {}), 0.05);
}

TEST(LinearModel, Degenerate) {
    for (const double t : {0.2, 1.0, 3.0}) {
        EXPECT_NEAR(linear_model_reliability(t, 0.0, {3, 2}, kExp), indep_moon_reliability(t, {3, 2}, kExp), 1e-6);
    }
    EXPECT_EQ(linear_model_reliability(0.0, 0.4, {3, 2}, kExp), 1.0);
}

TEST(LinearModel, ReferenceValue) {
    EXPECT_NEAR(linear_model_reliability(1.0, 0.5, {3, 2}, kExp), 0.35353768522030193, 1e-9);
}

// scipy quad over x0 for Weibull(0.5, 1) and Weibull(2, 1).
TEST(LinearModel, NonExponentialReferenceValues) {
    const SurvivalFunction half{DistributionSpec{0.5, 1.0}};
    EXPECT_NEAR(linear_model_reliability(0.1, 0.5, {3, 2}, half), 0.9191019288257676, 1e-9);
    EXPECT_NEAR(linear_model_reliability(1.0, 0.5, {3, 2}, half), 0.4191892974222538, 1e-9);
    EXPECT_NEAR(linear_model_reliability(8.0, 0.5, {3, 2}, half), 0.022944894048851323, 1e-10);
    const SurvivalFunction two{DistributionSpec{2.0, 1.0}};
    EXPECT_NEAR(linear_model_reliability(4.0, 0.5, {3, 2}, two) / 9.63612383633634e-18, 1.0, 1e-6);
}

TEST(LinearModel, MeanMatchesPrediction) {
    const double mean = oracle_mean([](double t) { return linear_model_reliability(t, 0.5, {3, 2}, kExp); });
    EXPECT_NEAR(mean, 11.0 / 12.0, 1e-4);
}

TEST(OracleMean, Anchors) {
    EXPECT_NEAR(oracle_mean([](double t) { return indep_moon_reliability(t, {3, 3}, kExp); }), 1.0 / 3.0, 1e-5);
    EXPECT_NEAR(oracle_mean([](double t) { return indep_moon_reliability(t, {3, 1}, kExp); }), 11.0 / 6.0, 1e-5);
    EXPECT_NEAR(oracle_mean([](double t) { return global_ccf_reliability(t, 0.5, {3, 2}, kExp); }), 11.0 / 12.0, 1e-5);
}

TEST(OracleMean, NonDecayingReliabilityFails) {
    EXPECT_THROW(oracle_mean([](double) { return 1.0; }), QuadratureError);
}

TEST(OracleMean, GlobalCcfIsLinearInP) {
    for (int m = 1; m <= 3; ++m) {
        for (int k = 0; k <= 20; ++k) {
            const double p = k / 20.0;
            EXPECT_NEAR(model_mean(DependencyModel::GlobalCCF, p, {3, m}, {}), linear_mean_prediction(p, {3, m}, {}), 1e-4);
        }
    }
}

TEST(Oracles, ShapeProperties) {
    for (const auto model : kModels) {
        for (int m = 1; m <= 3; ++m) {
            for (const double p : {0.0, 0.3, 0.8, 1.0}) {
                double prev = 1.0;
                EXPECT_EQ(model_reliability(model, 0.0, p, {3, m}, kExp), 1.0);
                for (int i = 1; i <= 1000; ++i) {
                    const double r = model_reliability(model, 0.01 * i, p, {3, m}, kExp);
                    ASSERT_GE(r, 0.0);
                    ASSERT_LE(r, prev + 1e-12);
                    prev = r;
                }
            }
        }
    }
}

TEST(Oracles, ModelsAgreeAtEndpoints) {
    for (int m = 1; m <= 3; ++m) {
        for (const double t : {0.1, 0.9, 2.5}) {
            const double r0 = indep_moon_reliability(t, {3, m}, kExp);
            for (const auto model : kModels) {
                EXPECT_NEAR(model_reliability(model, t, 0.0, {3, m}, kExp), r0, 1e-9);
                EXPECT_NEAR(model_reliability(model, t, 1.0, {3, m}, kExp), kExp(t), 1e-9);
            }
        }
    }
}

TEST(Oracles, GlobalTwoOfThreeMedianInvariant) {
    for (const double p : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        EXPECT_NEAR(global_ccf_reliability(std::numbers::ln2, p, {3, 2}, kExp), 0.5, 1e-15) << p;
    }
}

TEST(Oracles, DomainErrors) {
    EXPECT_THROW(global_ccf_reliability(1.0, 1.5, {3, 2}, kExp), DomainError);
    EXPECT_THROW(marginal_ccf_reliability(-1.0, 0.5, {3, 2}, kExp), DomainError);
    EXPECT_THROW(linear_model_reliability(1.0, -0.1, {3, 2}, kExp), DomainError);
}

TEST(Binomial, Tail) {
    EXPECT_EQ(binomial_tail(3, 0.4, 0), 1.0);
    EXPECT_EQ(binomial_tail(3, 0.4, 4), 0.0);
    EXPECT_NEAR(binomial_tail(3, 0.5, 2), 0.5, 1e-15);
}
