#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fhe/weights.hpp"

using namespace fhe;

namespace {
std::vector<double> pt(double x) { return {x}; }
}  // namespace

TEST(ExampleWeights, ClosedForms) {
    const HardyParams hp{1, 0.3, 2.0};
    const double a2 = 0.6;
    for (double x : {0.1, 0.5, 2.0}) {
        const double t = std::pow(x, a2);
        const auto X = pt(x);
        EXPECT_DOUBLE_EQ(example_weight("W3", hp)(X), 1.0 / (1.0 + t));
        EXPECT_DOUBLE_EQ(example_weight("W4", hp)(X), 1.0 / (t * (1.0 + t)));
        EXPECT_DOUBLE_EQ(example_weight("W1", hp)(X), 1.0 / ((1.0 + t) * std::pow(std::log(2.0 + t), a2)));
        EXPECT_DOUBLE_EQ(example_weight("W2", hp)(X), 1.0 / (t * (1.0 + t) * std::pow(std::log(2.0 + 1.0 / t), a2)));
    }
}

TEST(ExampleWeights, W1AtOrigin) {
    for (double a : {0.2, 0.5, 0.8})
        for (int n : {1, 2}) {
            const HardyParams hp{n, a, 2.0};
            const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
            EXPECT_NEAR(example_weight("W1", hp)(zero), 1.0 / std::pow(std::log(2.0), 2.0 * a / n), 1e-15);
        }
}

TEST(ExampleWeights, DecompositionAndSingularPoints) {
    const HardyParams hp{1, 0.3, 2.0};
    for (const char* name : {"W1", "W2", "W3", "W4"}) {
        const Weight w = example_weight(name, hp);
        ASSERT_TRUE(w.has_decomposition());
        EXPECT_EQ(w.v1(pt(0.4)), 0.0);
        EXPECT_EQ(w.v2(pt(0.4)), w(pt(0.4)));
    }
    EXPECT_TRUE(example_weight("W1", hp).singular_points().empty());
    EXPECT_EQ(example_weight("W2", hp).singular_points().size(), 1u);
    EXPECT_EQ(example_weight("W4", hp).singular_points().size(), 1u);
    EXPECT_THROW(example_weight("W5", hp), ValidationError);
}

TEST(Weight, ConstantAndScaling) {
    const Weight c = Weight::constant(2.0);
    EXPECT_EQ(c(pt(0.3)), 2.0);
    EXPECT_EQ(c.v1(pt(0.3)), 2.0);
    EXPECT_EQ(c.v2(pt(0.3)), 0.0);
    const Weight d = c.scaled(3.0);
    EXPECT_EQ(d(pt(0.3)), 6.0);
    EXPECT_EQ(d.v1(pt(0.3)), 6.0);
    const Weight neg = Weight::constant(-1.0);
    EXPECT_EQ(neg.plus(pt(0.0)), 0.0);
    EXPECT_EQ(neg.minus(pt(0.0)), 1.0);
}

TEST(Weight, ExpressionWithDecomposition) {
    const HardyParams hp{1, 0.25, 2.0};
    const Weight w = Weight::from_expression("x - 0.2", hp, std::string("0"), std::string("max(x - 0.2, 0)"));
    EXPECT_DOUBLE_EQ(w(pt(0.5)), 0.3);
    EXPECT_DOUBLE_EQ(w.v2(pt(0.5)), 0.3);
    EXPECT_DOUBLE_EQ(w.minus(pt(-0.3)), 0.5);
    EXPECT_THROW(Weight::from_expression("x", hp, std::string("0"), std::nullopt), ValidationError);
    EXPECT_THROW(Weight::from_expression("x", hp).v1(pt(0.0)), ValidationError);
    // alpha, p and n are bound.
    EXPECT_DOUBLE_EQ(Weight::from_expression("alpha + p + n", hp)(pt(0.0)), 3.25);
}

TEST(Weight, DecompositionConsistencyNodewise) {
    const HardyParams hp{1, 0.25, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 32, 1.0);
    const Weight w = Weight::from_expression("sin(3*x)", hp, std::string("0"), std::string("max(sin(3*x), 0)"));
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        const auto x = g.interior_node(k);
        EXPECT_NEAR(w(x), w.v1(x) + w.v2(x) - w.minus(x), 1e-12);
        EXPECT_EQ(w.plus(x) * w.minus(x), 0.0);
    }
}

TEST(CheckAp, W1AdmissibleAndW3InadmissibleInFourDimensions) {
    // Both weights are radial, so rays through a 1D grid probe the same
    // sequences as rays in R^4.
    const HardyParams hp{4, 0.5, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 32, 1.0);
    SamplingPlan plan;
    plan.whole_space = true;
    const auto r1 = check_Ap(example_weight("W1", hp), hp, g, plan);
    EXPECT_EQ(r1.verdict, ApVerdict::Admissible) << r1.detail;
    EXPECT_TRUE(r1.v2_tail);
    const auto r3 = check_Ap(example_weight("W3", hp), hp, g, plan);
    EXPECT_EQ(r3.verdict, ApVerdict::Inadmissible);
    EXPECT_EQ(r3.tail_status, ProxyStatus::NonVanishing);
    // |x|^{2 alpha} W3 -> 1 along the tail.
    for (const auto& s : r3.tail_sequences) EXPECT_NEAR(s.values.back(), 1.0, 1e-12);
}

TEST(CheckAp, W3OnBoundedDomainHasVacuousTail) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 32, 1.0);
    const auto r = check_Ap(example_weight("W3", hp), hp, g);
    EXPECT_TRUE(r.tail_vacuous);
    EXPECT_EQ(r.verdict, ApVerdict::Admissible);
}

TEST(CheckAp, W4FailsLocallyAtOrigin) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 32, 1.0);
    const auto r = check_Ap(example_weight("W4", hp), hp, g);
    EXPECT_EQ(r.verdict, ApVerdict::Inadmissible);
    EXPECT_EQ(r.local_status, ProxyStatus::NonVanishing);
}

TEST(CheckAp, W2PassesLocally) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 32, 1.0);
    const auto r = check_Ap(example_weight("W2", hp), hp, g);
    EXPECT_EQ(r.local_status, ProxyStatus::Vanishing);
    EXPECT_EQ(r.verdict, ApVerdict::Admissible);
}

TEST(CheckAp, NegativeWeightIsInadmissible) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 16, 1.0);
    const auto r = check_Ap(Weight::constant(-1.0), hp, g);
    EXPECT_FALSE(r.positive_part_nonzero);
    EXPECT_EQ(r.verdict, ApVerdict::Inadmissible);
}

TEST(CheckAp, MissingOrInconsistentDecomposition) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 16, 1.0);
    EXPECT_THROW(check_Ap(Weight::from_expression("1", hp), hp, g), ValidationError);
    EXPECT_THROW(check_Ap(Weight::from_expression("1", hp, std::string("0.5"), std::string("0.4")), hp, g),
                 ValidationError);
}

TEST(CheckAp, ProxiesScaleLinearlyWithV2) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 16, 1.0);
    SamplingPlan plan;
    plan.whole_space = true;
    const Weight w = example_weight("W2", hp);
    const auto a = check_Ap(w, hp, g, plan);
    const auto b = check_Ap(w.with_v2_scaled(3.0), hp, g, plan);
    ASSERT_EQ(a.local_sequences.size(), b.local_sequences.size());
    for (std::size_t i = 0; i < a.local_sequences.size(); ++i)
        for (std::size_t k = 0; k < a.local_sequences[i].values.size(); ++k)
            EXPECT_NEAR(b.local_sequences[i].values[k], 3.0 * a.local_sequences[i].values[k],
                        1e-15 * std::abs(b.local_sequences[i].values[k]));
    for (std::size_t i = 0; i < a.tail_sequences.size(); ++i)
        for (std::size_t k = 0; k < a.tail_sequences[i].values.size(); ++k)
            EXPECT_NEAR(b.tail_sequences[i].values[k], 3.0 * a.tail_sequences[i].values[k],
                        1e-15 * std::abs(b.tail_sequences[i].values[k]));
}

TEST(CheckAp, NonIntegrableV1IsNotAdmissible) {
    // V1 = |x|^{-1}: the L^{1/(p alpha)} norm for p alpha = 0.8 blows up under refinement.
    const HardyParams hp{1, 0.4, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 16, 1.0);
    const Weight w = Weight::from_expression("1/|x|", hp, std::string("1/|x|"), std::string("0"));
    const auto r = check_Ap(w, hp, g);
    EXPECT_FALSE(r.v1_integrable);
    EXPECT_NE(r.verdict, ApVerdict::Admissible);
}

TEST(PointwiseCompare, Cases) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 16, 1.0);
    const Weight V = Weight::constant(1.0);
    const Weight bump = V + Weight::box_indicator({0.0}, {0.125}, 1.0);
    const auto a = pointwise_compare(V, bump, g);
    EXPECT_TRUE(a.ordered);
    EXPECT_TRUE(a.strict);
    EXPECT_EQ(a.strict_nodes, 1u);
    EXPECT_DOUBLE_EQ(a.strict_measure, g.spacing(0));
    const auto b = pointwise_compare(V, V, g);
    EXPECT_TRUE(b.ordered);
    EXPECT_FALSE(b.strict);
    const Weight s = Weight::from_expression("x", hp, std::string("0"), std::string("max(x, 0)"));
    const auto c = pointwise_compare(s, s.absolute(), g);
    EXPECT_TRUE(c.ordered);
    EXPECT_EQ(c.strict_nodes, 8u);
    EXPECT_FALSE(pointwise_compare(bump, V, g).ordered);
}
