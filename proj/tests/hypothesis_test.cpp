#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "transferlab/hypothesis.hpp"
#include "transferlab/projection.hpp"
#include "transferlab/rng.hpp"

using namespace transferlab;

namespace {

LabeledSample random_sample(std::size_t support, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    LabeledSample s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<double>(rng.below(support)), rng.bernoulli(0.5));
    return s;
}

int count_mismatch(const Hypothesis& h, const LabeledSample& s) {
    int m = 0;
    for (std::size_t i = 0; i < s.size(); ++i) m += predict(h, s.x[i]) != s.y[i];
    return m;
}

}  // namespace

TEST(EmpiricalRisk, AllOnesHypothesis) {
    const Hypothesis h = Labeling{0b1, 1};
    LabeledSample s;
    s.push_back(0, 1);
    s.push_back(0, 1);
    EXPECT_EQ(empirical_risk(h, s), 0.0);
    s.y[0] = 0;
    EXPECT_EQ(empirical_risk(h, s), 0.5);
}

TEST(EmpiricalRisk, EmptySampleIsZero) {
    EXPECT_EQ(empirical_risk(Threshold{0.5}, LabeledSample{}), 0.0);
}

TEST(EmpiricalRisk, HandCountOnThreePoints) {
    const Hypothesis h = Labeling{0b101, 3};
    LabeledSample s;
    // (x, y): (0,1) ok, (1,1) wrong, (2,0) wrong, (1,0) ok, (0,0) wrong
    s.push_back(0, 1);
    s.push_back(1, 1);
    s.push_back(2, 0);
    s.push_back(1, 0);
    s.push_back(0, 0);
    EXPECT_DOUBLE_EQ(empirical_risk(h, s), 3.0 / 5.0);
}

TEST(EmpiricalDisagreement, Basics) {
    const std::vector<double> xs = {0, 1, 2};
    const Hypothesis h = Labeling{0b011, 3};
    EXPECT_EQ(empirical_disagreement(h, h, xs), 0.0);
    EXPECT_EQ(empirical_disagreement(h, Labeling{0b100, 3}, xs), 1.0);
    EXPECT_EQ(empirical_disagreement(h, h, std::vector<double>{}), 0.0);
}

TEST(EmpiricalDisagreement, ThresholdPair) {
    const std::vector<double> xs = {0.1, 0.5, 0.9};
    EXPECT_DOUBLE_EQ(empirical_disagreement(Threshold{0.3}, Threshold{0.7}, xs), 1.0 / 3.0);
}

TEST(Threshold, OrientationSemantics) {
    const Threshold above{0.5, Orientation::positive_above};
    const Threshold below{0.5, Orientation::positive_below};
    EXPECT_EQ(above(0.5), 0);
    EXPECT_EQ(above(0.6), 1);
    EXPECT_EQ(below(0.5), 1);
    EXPECT_EQ(below(0.6), 0);
}

TEST(ProjectClass, MemberCounts) {
    const auto cls = HypothesisClass::thresholds();
    EXPECT_EQ(project_class(cls, std::vector<double>{0.3}).size(), 2u);
    EXPECT_EQ(project_class(cls, std::vector<double>{0.5, 0.1, 0.9}).size(), 4u);
    EXPECT_EQ(project_class(cls, std::vector<double>{0.5, 0.5}).size(), 2u);
    EXPECT_THROW(project_class(cls, std::vector<double>{}), std::invalid_argument);
}

TEST(ProjectClass, MembersAreMonotoneAndRealized) {
    Rng rng(7);
    for (int orient = 0; orient < 2; ++orient) {
        const auto o = orient ? Orientation::positive_below : Orientation::positive_above;
        for (std::size_t n = 1; n <= 12; ++n) {
            std::vector<double> pts;
            for (std::size_t i = 0; i < n; ++i) pts.push_back(rng.uniform() * 10 - 5);
            const auto proj = project_class(HypothesisClass::thresholds(o), pts);
            ASSERT_EQ(proj.size(), n + 1);
            std::sort(pts.begin(), pts.end());
            for (std::size_t j = 0; j < proj.size(); ++j) {
                const auto bits = proj.members()[j];
                // Labels along sorted points change at most once.
                int changes = 0;
                for (std::size_t k = 1; k < n; ++k) changes += ((bits >> k) & 1U) != ((bits >> (k - 1)) & 1U);
                EXPECT_LE(changes, 1);
                const Threshold rep{proj.representatives()[j], o};
                for (std::size_t k = 0; k < n; ++k) EXPECT_EQ(rep(pts[k]), static_cast<int>((bits >> k) & 1U));
            }
        }
    }
}

TEST(Erm, EmptySampleReturnsFirstMember) {
    const auto cls = HypothesisClass::all_labelings(3);
    EXPECT_EQ(std::get<Labeling>(erm(cls, LabeledSample{})).bits, 0u);
}

TEST(Erm, RealizableSample) {
    const auto cls = HypothesisClass::all_labelings(3);
    LabeledSample s;
    s.push_back(0, 1);
    s.push_back(1, 0);
    s.push_back(2, 1);
    EXPECT_EQ(std::get<Labeling>(erm(cls, s)).bits, 0b101u);
}

TEST(Erm, ThresholdTieGoesToSmallestThreshold) {
    LabeledSample s;
    s.push_back(0.2, 0);
    s.push_back(0.8, 1);
    s.push_back(0.9, 1);
    const auto h = std::get<Threshold>(erm(HypothesisClass::thresholds(), s));
    EXPECT_GT(h.t, 0.2);
    EXPECT_LT(h.t, 0.8);
    EXPECT_EQ(empirical_risk(h, s), 0.0);
    // With no data every threshold ties; the smallest representative wins.
    const auto h0 = std::get<Threshold>(erm(HypothesisClass::thresholds(), LabeledSample{}));
    EXPECT_EQ(h0.t, 0.0);
}

TEST(Erm, MatchesExhaustiveMinimum) {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint64_t> members;
        while (members.size() < 8) {
            const std::uint64_t m = rng.below(1U << 5);
            if (std::find(members.begin(), members.end(), m) == members.end()) members.push_back(m);
        }
        const auto cls = HypothesisClass::finite(5, members, 3);
        const auto s = random_sample(5, 20, rng.next());
        int best = 1 << 30;
        std::size_t best_idx = 0;
        for (std::size_t j = 0; j < members.size(); ++j) {
            const int c = count_mismatch(Labeling{members[j], 5}, s);
            if (c < best) best = c, best_idx = j;
        }
        EXPECT_EQ(std::get<Labeling>(erm(cls, s)).bits, members[best_idx]);
    }
}

TEST(Erm, NeverWorseThanAnyMember) {
    const auto cls = HypothesisClass::all_labelings(10);
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_sample(10, 40, rng.next());
        const double r = empirical_risk(erm(cls, s), s);
        for (std::size_t j = 0; j < cls.size(); ++j) ASSERT_LE(r, empirical_risk(cls.member(j), s));
    }
}

TEST(EmpiricalDisagreement, SymmetryZeroAndTriangle) {
    const auto cls = HypothesisClass::all_labelings(4);
    Rng rng(5);
    std::vector<double> xs;
    for (int i = 0; i < 15; ++i) xs.push_back(static_cast<double>(rng.below(4)));
    for (std::size_t a = 0; a < cls.size(); ++a) {
        for (std::size_t b = 0; b < cls.size(); ++b) {
            const double dab = empirical_disagreement(cls.member(a), cls.member(b), xs);
            EXPECT_EQ(dab, empirical_disagreement(cls.member(b), cls.member(a), xs));
            bool agree = true;
            for (double x : xs) agree &= predict(cls.member(a), x) == predict(cls.member(b), x);
            EXPECT_EQ(dab == 0.0, agree);
            for (std::size_t c = 0; c < cls.size(); ++c) {
                const double dac = empirical_disagreement(cls.member(a), cls.member(c), xs);
                const double dbc = empirical_disagreement(cls.member(b), cls.member(c), xs);
                EXPECT_LE(dac, dab + dbc + 1e-15);
            }
        }
    }
}

TEST(HypothesisClass, Validation) {
    EXPECT_THROW(HypothesisClass::finite(3, {1, 1}, 1), std::invalid_argument);
    EXPECT_THROW(HypothesisClass::finite(3, {8}, 1), std::invalid_argument);
    EXPECT_THROW(HypothesisClass::finite(3, {1}, 0), std::invalid_argument);
    EXPECT_THROW(HypothesisClass::finite(3, {}, 1), std::invalid_argument);
    EXPECT_EQ(HypothesisClass::all_labelings(4).vc_dim(), 4u);
    EXPECT_EQ(HypothesisClass::all_labelings(4, true).size(), 8u);
}

TEST(ProjectedClass, ErrorsMatchDirectEvaluation) {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        LabeledSample s;
        for (int i = 0; i < 30; ++i) s.push_back(std::floor(rng.uniform() * 12) / 4, rng.bernoulli(0.4));
        for (auto o : {Orientation::positive_above, Orientation::positive_below}) {
            const ProjectedClass pc(HypothesisClass::thresholds(o), {std::span<const double>(s.x)});
            const auto errs = pc.errors(pc.tally(s));
            for (std::size_t j = 0; j < pc.size(); ++j) EXPECT_DOUBLE_EQ(errs[j], empirical_risk(pc.hypothesis(j), s));
            const std::size_t ref = rng.below(pc.size());
            const auto dis = pc.disagreements(ref, pc.mass(s.x));
            for (std::size_t j = 0; j < pc.size(); ++j)
                EXPECT_DOUBLE_EQ(dis[j], empirical_disagreement(pc.hypothesis(j), pc.hypothesis(ref), s.x));
        }
    }
}

TEST(ProjectedClass, TableAndLoopPathsAgree) {
    // 2^12 members over 12 cells takes the lookup-table path; 8 members the loop path.
    const auto big = HypothesisClass::all_labelings(12);
    const auto s = random_sample(12, 200, 99);
    const ProjectedClass pc(big, {});
    const auto errs = pc.errors(pc.tally(s));
    const auto dis = pc.disagreements(1234, pc.mass(s.x));
    for (std::size_t j = 0; j < big.size(); j += 37) {
        EXPECT_NEAR(errs[j], empirical_risk(big.member(j), s), 1e-15);
        EXPECT_NEAR(dis[j], empirical_disagreement(big.member(j), big.member(1234), s.x), 1e-15);
    }
}

TEST(Rng, DeriveSeedIsStable) {
    EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
    EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
    Rng a(5), b(5);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
}
