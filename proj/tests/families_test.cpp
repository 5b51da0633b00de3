#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "transferlab/distribution.hpp"
#include "transferlab/families.hpp"

using namespace transferlab;

namespace {

const DiscreteJoint& joint(const Distribution& d) { return std::get<DiscreteJoint>(d); }

double mass_sum(const DiscreteJoint& d) { return std::accumulate(d.mass.begin(), d.mass.end(), 0.0); }

std::size_t block_distance(const SignVector& a, const SignVector& b, std::size_t lo, std::size_t hi) {
    std::size_t n = 0;
    for (std::size_t i = lo; i < hi; ++i) n += a[i] != b[i];
    return n;
}

}  // namespace

TEST(TwoLevelFamily, MarginalsAndLabels) {
    const double eps = 0.25, rho = 2.0, bP = 0.5, bQ = 0.3;
    const auto f = build_theorem3_family(9, rho, bP, bQ, eps);
    ASSERT_EQ(f.d, 8U);
    ASSERT_EQ(f.size(), 256U);
    const auto& q0 = joint(f.pairs[0].q);
    const auto& p0 = joint(f.pairs[0].p);
    EXPECT_NEAR(q0.mass[0], 1.0 - std::pow(eps, bQ), 1e-15);
    EXPECT_NEAR(q0.mass[3], std::pow(eps, bQ) / 8.0, 1e-15);
    EXPECT_NEAR(p0.mass[0], 1.0 - std::pow(eps, rho * bP), 1e-15);
    EXPECT_NEAR(p0.mass[5], std::pow(eps, rho * bP) / 8.0, 1e-15);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& p = joint(f.pairs[i].p);
        const auto& q = joint(f.pairs[i].q);
        EXPECT_NEAR(mass_sum(p), 1.0, 1e-12);
        EXPECT_NEAR(mass_sum(q), 1.0, 1e-12);
        EXPECT_EQ(p.mass, p0.mass);
        EXPECT_EQ(q.mass, q0.mass);
        EXPECT_EQ(p.eta[0], 1.0);
        EXPECT_EQ(f.bayes(i)(0), 1);
        for (std::size_t k = 0; k < f.d; ++k) {
            const double s = f.sigmas[i][k];
            EXPECT_NEAR(q.eta[k + 1], 0.5 + 0.5 * s * std::pow(eps, 1.0 - bQ), 1e-15);
            EXPECT_NEAR(p.eta[k + 1], 0.5 + 0.5 * s * std::pow(eps, rho * (1.0 - bP)), 1e-15);
            EXPECT_EQ(f.bayes(i)(k + 1), s > 0 ? 1 : 0);
        }
    }
}

TEST(TwoLevelFamily, ExcessIsScaledHammingDistance) {
    const double eps = 0.1, rho = 3.0;
    const auto f = build_theorem3_family(10, rho, 0.4, 0.6, eps);
    const auto cls = f.hypothesis_class();
    const double d = static_cast<double>(f.d);
    for (std::size_t i : {0UL, 7UL, 300UL}) {
        for (std::size_t j : {0UL, 1UL, 300UL, 511UL}) {
            const double dist = static_cast<double>(hamming(f.sigmas[i], f.sigmas[j]));
            EXPECT_NEAR(excess_risk(f.pairs[i].q, f.bayes(j), cls), dist / d * eps, 1e-14);
            EXPECT_NEAR(excess_risk(f.pairs[i].p, f.bayes(j), cls), dist / d * std::pow(eps, rho), 1e-14);
        }
    }
}

TEST(TwoLevelFamily, RejectsOutOfRange) {
    EXPECT_THROW(build_theorem3_family(8, 2, 0.5, 0.5, 0.25), std::invalid_argument);
    EXPECT_THROW(build_theorem3_family(9, 2, 0.5, 0.5, 0.6), std::invalid_argument);
    EXPECT_THROW(build_theorem3_family(9, 2, 0.5, 0.5, 0.0), std::invalid_argument);
    EXPECT_THROW(build_theorem3_family(9, 0.5, 0.5, 0.5, 0.25), std::invalid_argument);
    EXPECT_THROW(build_theorem3_family(9, 2, 1.5, 0.5, 0.25), std::invalid_argument);
}

TEST(TwoLevelFamily, LargeDimensionUsesPacking) {
    const auto f = build_theorem3_family(17, 2, 0.5, 0.5, 0.25, 5);
    EXPECT_EQ(f.d, 16U);
    EXPECT_EQ(f.sigmas, vg_packing(16, 5));
}

TEST(TwoBlockFamily, MarginalsAndExcess) {
    const double rho = 2.5, bP = 0.6, bQ = 0.5, e1 = 0.2, e2 = 0.3;
    const auto f = build_theorem4_family(11, rho, bP, bQ, e1, e2);
    ASSERT_EQ(f.d, 10U);
    const double gamma = rho * bP;
    const double tau = std::max(0.5, std::pow(0.5, 1.0 / gamma));
    EXPECT_EQ(f.params.tau, tau);
    const auto& q = joint(f.pairs[0].q);
    EXPECT_NEAR(q.mass[0], 1.0 - 0.5 * (std::pow(e1, bQ) + e2 / tau), 1e-15);
    EXPECT_NEAR(q.mass[1], std::pow(e1, bQ) / 10.0, 1e-15);
    EXPECT_NEAR(q.mass[10], e2 / tau / 10.0, 1e-15);
    ASSERT_TRUE(f.pairs[0].certified && f.pairs[0].certified->gamma);
    EXPECT_DOUBLE_EQ(*f.pairs[0].certified->gamma, gamma);
    EXPECT_DOUBLE_EQ(*f.pairs[0].certified->C_gamma, 2.0);

    const auto cls = f.hypothesis_class();
    for (std::size_t i : {0UL, 33UL, 1000UL}) {
        EXPECT_NEAR(mass_sum(joint(f.pairs[i].p)), 1.0, 1e-12);
        for (std::size_t j : {0UL, 5UL, 777UL, 1023UL}) {
            const double d1 = static_cast<double>(block_distance(f.sigmas[i], f.sigmas[j], 0, 5));
            const double d2 = static_cast<double>(block_distance(f.sigmas[i], f.sigmas[j], 5, 10));
            EXPECT_NEAR(excess_risk(f.pairs[i].q, f.bayes(j), cls), d1 / 10.0 * e1 + d2 / 10.0 * e2, 1e-14);
        }
    }
}

TEST(TwoBlockFamily, OddDimensionDropsOneCoordinate) {
    EXPECT_EQ(build_theorem4_family(12, 2.5, 0.6, 0.5, 0.2, 0.3).d, 10U);
}

TEST(TwoBlockFamily, RejectsOutOfRange) {
    EXPECT_THROW(build_theorem4_family(11, 1.5, 0.5, 0.5, 0.2, 0.2), std::invalid_argument);  // rho < 1/beta
    EXPECT_THROW(build_theorem4_family(11, 2.0, 0.5, 0.5, 0.6, 0.2), std::invalid_argument);
    EXPECT_THROW(build_theorem4_family(11, 2.0, 0.5, 0.5, 0.2, 0.2, 0.3), std::invalid_argument);  // tau too small
    EXPECT_THROW(build_theorem4_family(11, 2.0, 0.5, 0.5, 0.2, 0.2, 1.0), std::invalid_argument);
    EXPECT_THROW(build_theorem4_family(11, 2.0, 1.0, 0.5, 0.2, 0.2), std::invalid_argument);
}

class PackingBounds : public ::testing::TestWithParam<std::size_t> {};

TEST_P(PackingBounds, SizeAndSeparation) {
    const std::size_t d = GetParam();
    const auto pk = vg_packing(d, 11);
    EXPECT_GE(static_cast<double>(pk.size()), std::exp2(d / 8.0) + 1.0);
    EXPECT_EQ(pk.front(), SignVector(d, 1));
    std::set<SignVector> distinct(pk.begin(), pk.end());
    EXPECT_EQ(distinct.size(), pk.size());
    for (std::size_t a = 0; a < pk.size(); ++a) {
        for (int v : pk[a]) EXPECT_TRUE(v == 1 || v == -1);
        for (std::size_t b = a + 1; b < pk.size(); ++b)
            EXPECT_GE(static_cast<double>(hamming(pk[a], pk[b])), d / 8.0);
    }
}

INSTANTIATE_TEST_SUITE_P(Dims, PackingBounds, ::testing::Values(8, 16, 24, 32));

TEST(Packing, StatedInstances) {
    EXPECT_GE(vg_packing(8, 0).size(), 3U);
    EXPECT_GE(vg_packing(16, 0).size(), 5U);
    EXPECT_THROW(vg_packing(7, 0), std::invalid_argument);
}

TEST(Kl, HandValues) {
    EXPECT_EQ(kl_bernoulli(0.3, 0.3), 0.0);
    EXPECT_NEAR(chi2_bound(0.5, 1), 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(chi2_bound(0.5, -1), 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(kl_bernoulli(0.75, 0.25), 0.5 * std::log(3.0), 1e-15);
    EXPECT_NEAR(kl_chi2_constant(), 16.0 / 3.0, 1e-14);
}

TEST(Kl, BoundedByChiSquareOnGrid) {
    for (int k = 1; k <= 49; ++k) {
        const double eps = k / 100.0;
        for (int z : {-1, 1}) {
            const double p = 0.5 + 0.5 * z * eps, q = 0.5 - 0.5 * z * eps;
            EXPECT_LE(kl_bernoulli(p, q), chi2_bound(eps, z)) << eps;
            EXPECT_LE(chi2_bound(eps, z), kl_chi2_constant() * eps * eps * (1 + 1e-12)) << eps;
        }
    }
}

TEST(Kl, RejectsBoundary) {
    EXPECT_THROW(kl_bernoulli(0.0, 0.5), std::invalid_argument);
    EXPECT_THROW(kl_bernoulli(0.5, 1.0), std::invalid_argument);
    EXPECT_THROW(chi2_bound(0.0, 1), std::invalid_argument);
    EXPECT_THROW(chi2_bound(0.2, 0), std::invalid_argument);
}

TEST(KlProduct, ZeroSymmetricAndBounded) {
    const double eps = 0.2, rho = 2.0, bP = 0.5, bQ = 0.5, nP = 300, nQ = 40;
    const auto f = build_theorem3_family(9, rho, bP, bQ, eps);
    const double c0 = kl_chi2_constant();
    const double bound = c0 * (nP * std::pow(eps, rho * (2.0 - bP)) + nQ * std::pow(eps, 2.0 - bQ));
    for (std::size_t i = 0; i < f.size(); i += 17) {
        EXPECT_EQ(kl_product(f, i, i, nP, nQ), 0.0);
        for (std::size_t j = 0; j < f.size(); j += 13) {
            const double a = kl_product(f, i, j, nP, nQ);
            EXPECT_NEAR(a, kl_product(f, j, i, nP, nQ), 1e-12 * (1 + a));
            EXPECT_LE(a, bound * (1 + 1e-12));
        }
    }
}

TEST(KlProduct, NoiselessMembersDiverge) {
    const auto f = build_theorem3_family(9, 1.0, 1.0, 1.0, 0.5);  // beta = 1 puts eta at 0 and 1
    EXPECT_TRUE(std::isinf(kl_product(f, 0, 1, 1, 1)));
}

TEST(KlProduct, TunedEpsilonKeepsDivergenceBelowDimensionScale) {
    // With eps = min(1/2, c1 * minimax_epsilon) and c1 = 1/4, KL stays under c0 * d.
    const double c0 = kl_chi2_constant();
    for (double nP : {10.0, 1e3, 1e5}) {
        for (double nQ : {0.0, 10.0, 1e4}) {
            for (double bP : {0.25, 0.5, 0.9}) {
                const std::size_t dH = 9;
                const double rho = 2.0, bQ = 0.5;
                const double eps = lower_bound_epsilon(nP, nQ, dH, rho, bP, bQ, 0.25);
                const auto f = build_theorem3_family(dH, rho, bP, bQ, eps);
                for (std::size_t j = 1; j < f.size(); j += 31)
                    EXPECT_LE(kl_product(f, 0, j, nP, nQ), c0 * f.d) << nP << ' ' << nQ << ' ' << bP;
            }
        }
    }
}

TEST(MinimaxEpsilon, EmptySampleSide) {
    EXPECT_NEAR(minimax_epsilon(0, 100, 10, 2, 0.5, 0.5), std::pow(0.1, 1.0 / 1.5), 1e-15);
    EXPECT_NEAR(minimax_epsilon(1000, 0, 10, 2, 0.5, 0.5), std::pow(0.01, 1.0 / 3.0), 1e-15);
    EXPECT_TRUE(std::isinf(minimax_epsilon(0, 0, 10, 2, 0.5, 0.5)));
    EXPECT_EQ(lower_bound_epsilon(0, 0, 10, 2, 0.5, 0.5, 0.1), 0.5);
}

TEST(Examples, CertifiedMetadata) {
    const auto e2 = example_scenario(2);
    ASSERT_TRUE(e2.certified);
    EXPECT_EQ(*e2.certified->gamma, 1.0);
    EXPECT_EQ(*e2.certified->C_gamma, 2.0);
    const auto e3 = example_scenario(3, ExampleParams{3.0, 8});
    EXPECT_EQ(*e3.certified->gamma, 3.0);
    const auto e4 = example_scenario(4, ExampleParams{0.5, 8});
    EXPECT_LT(*e4.certified->gamma, 1.0);
    const auto e1 = example_scenario(1);
    EXPECT_EQ(*e1.certified->gamma, 1.0);
    EXPECT_EQ(joint(e1.p).size(), 16U);
}

TEST(Examples, RingSurrogateIsRealizableWithDisjointSupports) {
    const auto pair = example_scenario(1, ExampleParams{2.0, 12});
    const auto cls = example_class(1, ExampleParams{2.0, 12});
    const auto& p = joint(pair.p);
    const auto& q = joint(pair.q);
    for (std::size_t k = 0; k < p.size(); ++k) EXPECT_EQ(p.mass[k] * q.mass[k], 0.0);
    const auto h = best_in_class(pair.p, cls);
    EXPECT_EQ(true_risk(pair.p, h), 0.0);
    EXPECT_EQ(true_risk(pair.q, h), 0.0);
    EXPECT_EQ(cls.vc_dim(), 2U);
}

TEST(Examples, RejectInvalidParameters) {
    EXPECT_THROW(example_scenario(3, ExampleParams{0.5, 8}), std::invalid_argument);
    EXPECT_THROW(example_scenario(4, ExampleParams{1.0, 8}), std::invalid_argument);
    EXPECT_THROW(example_scenario(1, ExampleParams{2.0, 5}), std::invalid_argument);
    EXPECT_THROW(example_scenario(5), std::invalid_argument);
}
