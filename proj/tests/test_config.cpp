#include <gtest/gtest.h>

#include "fhe/config.hpp"

using namespace fhe;

TEST(Config, ParsesReferenceFile) {
    const auto c = load_config(std::string(FHE_SOURCE_DIR) + "/configs/reference.cfg");
    EXPECT_EQ(c.problem.n, 1);
    EXPECT_DOUBLE_EQ(c.problem.alpha, 0.4);
    EXPECT_DOUBLE_EQ(c.problem.p, 2.0);
    ASSERT_TRUE(c.mu_fraction.has_value());
    EXPECT_DOUBLE_EQ(*c.mu_fraction, 0.3);
    EXPECT_EQ(c.m[0], 64u);
    EXPECT_EQ(*c.seed, 20240601u);
    EXPECT_EQ(c.k_max, 10u);
    EXPECT_EQ(c.hardy_n, (std::vector<int>{1, 2}));
    EXPECT_EQ(c.hardy_alpha.size(), 3u);
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.make_grid().interior_count(), 64u);
}

TEST(Config, BoxDomainAndExpressionWeight) {
    const auto c = parse_config_string(R"(
[problem]
n = 2   # plane
alpha = 0.3
p = 3
mu = 0.01
[domain]
shape = box
center = 0.5, 0
half_widths = 1, 0.5
m = 8, 4
collar = 0.5
[weight]
kind = expression
expr = 1 + x^2
whole_space = yes
[solver]
seed = 3
)");
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.make_grid().interior_count(), 32u);
    EXPECT_TRUE(c.whole_space);
    EXPECT_DOUBLE_EQ(c.resolved_mu(), 0.01);
    const std::array<double, 2> x{2.0, 0.0};
    EXPECT_DOUBLE_EQ(c.make_weight()(Grid::Point(x)), 5.0);
}

TEST(Config, ResolvedMu) {
    RunConfig c;
    EXPECT_EQ(c.resolved_mu(), 0.0);
    c.mu_fraction = 0.5;
    EXPECT_NEAR(c.resolved_mu(), 0.5 * hardy_constant(c.problem, 1e-10).value, 1e-14);
}

TEST(Config, ErrorsCarryLineNumbers) {
    auto message = [](const std::string& text) {
        try {
            parse_config_string(text);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message("[problem]\nn = 1\nbogus = 2\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("[nowhere]\n").find("unknown section"), std::string::npos);
    EXPECT_NE(message("n = 1\n").find("outside"), std::string::npos);
    EXPECT_NE(message("[problem]\nalpha = abc\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("[problem\n").find("malformed"), std::string::npos);
    EXPECT_NE(message("[solver]\nseed = -4\n").find("seed"), std::string::npos);
    EXPECT_NE(message("[domain]\nm = 1\n").find("m must"), std::string::npos);
    EXPECT_NE(message("[weight]\nwhole_space = maybe\n").find("boolean"), std::string::npos);
    EXPECT_NE(message("[domain]\nshape = interval\nm = 4, 4\n").find("single m"), std::string::npos);
}

TEST(Config, ValidationRules) {
    RunConfig c;
    EXPECT_THROW(c.validate(), ValidationError);  // no seed
    c.seed = 1;
    EXPECT_NO_THROW(c.validate());
    auto bad = c;
    bad.mu = 0.1;
    bad.mu_fraction = 0.1;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = c;
    bad.mu_fraction = 1.0;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = c;
    bad.shape = "box";
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = c;
    bad.problem.alpha = 0.5;
    EXPECT_THROW(bad.validate(), ValidationError);  // degenerate at n = 1, p = 2
    bad = c;
    bad.weight_kind = "expression";
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = c;
    bad.scaling_direction = "sideways";
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = c;
    bad.k_max = 0;
    EXPECT_THROW(bad.validate(), ValidationError);
}
