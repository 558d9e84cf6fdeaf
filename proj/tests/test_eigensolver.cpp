#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fhe/eigensolver.hpp"

using namespace fhe;

namespace {

FormOptions quiet_form() {
    FormOptions f;
    f.warn_stream = nullptr;
    return f;
}

SolverOptions quiet_solver(std::uint64_t seed = 1) {
    SolverOptions o;
    o.seed = seed;
    o.tol = 1e-11;
    o.warn_stream = nullptr;
    return o;
}

NonlocalForm make_form(double a, double b, std::size_t m, HardyParams hp, double mu_fraction = 0.0) {
    const double mu = mu_fraction > 0.0 ? mu_fraction * hardy_constant(hp, 1e-10).value : 0.0;
    return NonlocalForm::assemble(build_interval_grid(a, b, m, 1.0), hp, mu, quiet_form());
}

// Dense generalized problem B u = nu A u, with A rebuilt from the kernel,
// exterior and Hardy vectors and B = diag(w V). A is positive definite and B
// may be indefinite; positive nu give lambda = 1 / nu, returned ascending.
Eigen::VectorXd dense_oracle(const NonlocalForm& f, const Weight& V) {
    const auto& K = f.kernel();
    const Eigen::Index N = K.rows();
    Eigen::MatrixXd A = -2.0 * K, B = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        A(i, i) = 2.0 * K.row(i).sum() + 2.0 * f.exterior()[i] - f.hardy()[i];
        const auto k = static_cast<std::size_t>(i);
        B(i, i) = f.grid().interior_weight(k) * V(f.grid().interior_node(k));
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, A);
    std::vector<double> lam;
    for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
        if (es.eigenvalues()[i] > 1e-14) lam.push_back(1.0 / es.eigenvalues()[i]);
    return Eigen::Map<Eigen::VectorXd>(lam.data(), static_cast<Eigen::Index>(lam.size()));
}

}  // namespace

TEST(Lambda1, DescentMatchesDensePencilOnUnitInterval) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(0.0, 1.0, 64, hp);
    const Weight V = Weight::constant(1.0);
    const auto r = solve_lambda1(f, V, quiet_solver());
    const double ref = dense_oracle(f, V)[0];
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.lambda, ref, 1e-9 * ref);
    EXPECT_NEAR(solve_pencil_p2(f, V).lambdas.at(0), ref, 1e-10 * ref);
    EXPECT_LE(r.constraint_residual, 1e-12);
    EXPECT_LE(r.stationarity_residual, 1e-11);
}

TEST(Lambda1, ReferenceProblemValue) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 64, hp, 0.3);
    EXPECT_NEAR(solve_lambda1(f, Weight::constant(1.0), quiet_solver(20240601)).lambda, 7.184341490723021, 1e-8);
}

TEST(Lambda1, InverseHomogeneityInWeight) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 32, hp, 0.3);
    const Weight V = example_weight("W1", hp);
    const double l1 = solve_lambda1(f, V, quiet_solver()).lambda;
    const double l4 = solve_lambda1(f, V.scaled(4.0), quiet_solver()).lambda;
    EXPECT_NEAR(l4, l1 / 4.0, 1e-9 * l1);
}

TEST(Lambda1, SignChangingWeightMatchesOracle) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 32, hp);
    const Weight V = Weight::from_expression("x + 0.3", hp, std::string("0"), std::string("max(x + 0.3, 0)"));
    const auto ev = dense_oracle(f, V);
    ASSERT_GT(ev.size(), 0);
    const double ref = ev[0];
    EXPECT_NEAR(solve_lambda1(f, V, quiet_solver()).lambda, ref, 1e-8 * ref);
}

TEST(Lambda1, NonlinearCaseIsAMinimumOverStartsAndRandomFunctions) {
    const HardyParams hp{1, 0.25, 3.0};
    const auto f = make_form(-1.0, 1.0, 16, hp);
    const Weight V = Weight::constant(1.0);
    double lo = INFINITY, hi = -INFINITY;
    for (std::uint64_t t = 0; t < 20; ++t) {
        auto o = quiet_solver(t);
        o.perturbation = 1.0;
        const double l = solve_lambda1(f, V, o).lambda;
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    EXPECT_LE((hi - lo) / lo, 1e-8);
    const Eigen::VectorXd wv = f.mass(V);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        FunctionVec u(16);
        for (auto& x : u) x = U(rng);
        EXPECT_GE(f.energy(u) / f.psi(wv, u), lo * (1.0 - 1e-10));
    }
}

TEST(Lambda1, HistoryIsNonincreasing) {
    const HardyParams hp{1, 0.25, 3.0};
    const auto f = make_form(-1.0, 1.0, 16, hp);
    auto o = quiet_solver();
    o.record_history = true;
    const auto r = solve_lambda1(f, Weight::constant(1.0), o);
    ASSERT_FALSE(r.history.empty());
    for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_LE(r.history[k], r.history[k - 1] * (1.0 + 1e-12));
}

TEST(Lambda1, ReproducibleForFixedSeed) {
    const HardyParams hp{1, 0.25, 3.0};
    const auto f = make_form(-1.0, 1.0, 16, hp);
    const auto a = solve_lambda1(f, Weight::constant(1.0), quiet_solver(5));
    const auto b = solve_lambda1(f, Weight::constant(1.0), quiet_solver(5));
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ((a.phi - b.phi).norm(), 0.0);
}

TEST(Sequence, MatchesDenseOracle) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 48, hp, 0.3);
    const Weight V = Weight::constant(1.0);
    const auto rep = solve_sequence_p2(f, V, 6);
    const auto ref = dense_oracle(f, V);
    ASSERT_EQ(rep.pairs.size(), 6u);
    EXPECT_FALSE(rep.truncated);
    for (std::size_t k = 0; k < 6; ++k)
        EXPECT_NEAR(rep.pairs[k].lambda, ref[static_cast<Eigen::Index>(k)], 1e-9 * ref[static_cast<Eigen::Index>(k)]);
    EXPECT_NEAR(rep.pairs[0].lambda, solve_lambda1(f, V, quiet_solver()).lambda, 1e-9 * rep.pairs[0].lambda);
    EXPECT_EQ(rep.lambda1_multiplicity, 1u);
}

TEST(Sequence, TruncatesWhenFewerEigenvaluesExist) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 8, hp);
    const auto rep = solve_sequence_p2(f, Weight::constant(1.0), 20);
    EXPECT_TRUE(rep.truncated);
    EXPECT_EQ(rep.pairs.size(), 8u);
    EXPECT_EQ(rep.requested, 20u);
}

TEST(Sequence, StableUnderRefinement) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto s32 = solve_sequence_p2(make_form(-1.0, 1.0, 32, hp), Weight::constant(1.0), 4);
    const auto s64 = solve_sequence_p2(make_form(-1.0, 1.0, 64, hp), Weight::constant(1.0), 4);
    const auto st = refinement_stability(s32, s64, 4, 0.05);
    EXPECT_TRUE(st.pass) << st.max_rel_change;
}

TEST(Sequence, GrowthCheck) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto rep = solve_sequence_p2(make_form(-1.0, 1.0, 64, hp), Weight::constant(1.0), 10);
    const auto g = lambda_growth_check(rep, 5.0);
    EXPECT_TRUE(g.nondecreasing);
    EXPECT_TRUE(g.pass) << g.ratio;
    const auto one = solve_sequence_p2(make_form(-1.0, 1.0, 16, hp), Weight::constant(1.0), 1);
    EXPECT_TRUE(lambda_growth_check(one, 5.0).pass);
}

TEST(Simplicity, RepeatedStartsAgree) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 32, hp, 0.3);
    const auto s = verify_simplicity(f, Weight::constant(1.0), 6, quiet_solver(2));
    EXPECT_TRUE(s.passes(1e-6, 1e-8));
    EXPECT_EQ(pencil_multiplicity(f, Weight::constant(1.0)), 1u);
    const auto& phi = s.runs.front().phi;
    EXPECT_NEAR(alignment(f.grid(), phi, -phi), 1.0, 1e-14);
}

TEST(Signs, Helpers) {
    FunctionVec c = FunctionVec::Constant(5, 0.3);
    EXPECT_TRUE(is_one_signed(c));
    EXPECT_TRUE(is_one_signed(-c));
    EXPECT_FALSE(changes_sign(c));
    FunctionVec d(4);
    d << 1.0, 0.5, -0.5, -1.0;
    EXPECT_TRUE(changes_sign(d));
    EXPECT_FALSE(is_one_signed(d));
}

TEST(Signs, FirstEigenfunctionOneSignedHigherChangeSign) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto rep = solve_sequence_p2(make_form(-1.0, 1.0, 48, hp, 0.3), Weight::constant(1.0), 4);
    const auto s = verify_sign_properties(rep);
    EXPECT_TRUE(s.phi1_one_signed);
    EXPECT_TRUE(s.higher_change_sign);
    const auto p3 = solve_lambda1(make_form(-1.0, 1.0, 16, HardyParams{1, 0.25, 3.0}), Weight::constant(1.0),
                                  quiet_solver());
    EXPECT_TRUE(is_one_signed(p3.phi));
    EXPECT_GT(p3.phi.minCoeff(), 0.0);
}

TEST(Monotonicity, WeightEqualIsNotStrict) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 32, hp);
    const auto r = verify_weight_monotonicity(f, Weight::constant(1.0), Weight::constant(1.0), quiet_solver());
    EXPECT_FALSE(r.strict);
    EXPECT_NEAR(r.margin, 0.0, 1e-9 * r.lambda_small);
    EXPECT_THROW(verify_weight_monotonicity(f, Weight::constant(2.0), Weight::constant(1.0), quiet_solver()),
                 ValidationError);
}

TEST(Monotonicity, NestedDomainsIncreaseLambda) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto g = build_interval_grid(-1.0, 1.0, 48, 1.0);
    const auto r1 = restrict_grid(g, [](Grid::Point x) { return x[0] > -1.0 / 3.0; });
    const auto r2 = restrict_grid(r1.child, [](Grid::Point x) { return x[0] > 1.0 / 3.0; });
    const Weight V = Weight::constant(1.0);
    const auto a = verify_domain_monotonicity(r1, V, hp, 0.0, quiet_solver(), quiet_form());
    const auto b = verify_domain_monotonicity(r2, V, hp, 0.0, quiet_solver(), quiet_form());
    EXPECT_TRUE(a.strict);
    EXPECT_TRUE(b.strict);
    EXPECT_NEAR(a.lambda_small, b.lambda_big, 1e-9 * a.lambda_small);
}

TEST(Monotonicity, LambdaDecreasesInMu) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 32, hp);
    const double C = hardy_constant(hp, 1e-10).value;
    const auto r = verify_mu_monotonicity(f, Weight::constant(1.0), {0.5 * C, 0.0, 0.25 * C}, quiet_solver());
    EXPECT_TRUE(r.strict);
    EXPECT_EQ(r.mus.front(), 0.0);
}

TEST(Scaling, BaseRowAndAdmissibleWeightBounded) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 32, hp);
    FunctionVec u0(32);
    for (std::size_t k = 0; k < 32; ++k) {
        const double sn = std::sin(0.5 * M_PI * (f.grid().interior_node(k)[0] + 1.0));
        u0[static_cast<Eigen::Index>(k)] = sn * sn;
    }
    const Weight V = example_weight("W1", hp);
    const auto t = scaling_collapse_test(f, V, u0, {1.0, 0.5, 0.25}, ScalingDirection::ToOrigin, quiet_form());
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0].r, 1.0);
    EXPECT_DOUBLE_EQ(t.rows[0].quotient, f.energy(u0) / f.psi(f.mass(V), u0));
    EXPECT_EQ(t.base_quotient, t.rows[0].quotient);
    EXPECT_GE(t.min_over_base, 0.5);
    EXPECT_THROW(scaling_collapse_test(f, V, u0, {2.0}, ScalingDirection::ToInfinity, quiet_form()), ValidationError);
}

TEST(Errors, VanishingPositivePartIsRejected) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 16, hp);
    EXPECT_THROW(solve_lambda1(f, Weight::box_indicator({5.0}, {6.0}, 1.0), quiet_solver()), InadmissibleWeightError);
    EXPECT_THROW(solve_lambda1(f, Weight::constant(-1.0), quiet_solver()), InadmissibleWeightError);
}

TEST(Errors, InadmissibleWeightNeedsOverride) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 16, hp);
    const Weight bad = Weight::from_function(
                           "|x|^-1", [](Grid::Point x) { return 1.0 / Grid::norm(x); }, [](Grid::Point) { return 0.0; },
                           [](Grid::Point x) { return 1.0 / Grid::norm(x); })
                           .with_singular_point({0.0});
    EXPECT_THROW(solve_lambda1(f, bad, quiet_solver()), InadmissibleWeightError);
    std::ostringstream warn;
    auto o = quiet_solver();
    o.allow_inadmissible = true;
    o.warn_stream = &warn;
    EXPECT_NO_THROW(solve_lambda1(f, bad, o));
    EXPECT_NE(warn.str().find("inadmissible"), std::string::npos);
}

TEST(Errors, ExponentBelowTwo) {
    const HardyParams hp{1, 0.4, 1.5};
    const auto f = make_form(-1.0, 1.0, 16, hp);
    EXPECT_THROW(solve_lambda1(f, Weight::constant(1.0), quiet_solver()), ValidationError);
    EXPECT_THROW(solve_pencil_p2(f, Weight::constant(1.0)), ValidationError);
}

TEST(Errors, NonConvergenceIsReported) {
    const HardyParams hp{1, 0.25, 3.0};
    const auto f = make_form(-1.0, 1.0, 16, hp);
    auto o = quiet_solver();
    o.max_iter = 1;
    EXPECT_THROW(solve_lambda1(f, Weight::constant(1.0), o), ConvergenceError);
}

TEST(Errors, MuGuardAgainstDiscreteConstant) {
    const HardyParams hp{1, 0.4, 2.0};
    const auto f = make_form(-1.0, 1.0, 16, hp, 0.3);
    auto o = quiet_solver();
    const double cd = discrete_hardy_constant(f, o.hardy_trials, o.seed);
    EXPECT_GT(cd, hardy_constant(hp, 1e-10).value);
    o.mu_fraction_limit = 0.9 * f.mu() / cd;
    EXPECT_THROW(solve_lambda1(f, Weight::constant(1.0), o), ValidationError);
    o.mu_fraction_limit = 1.1 * f.mu() / cd;
    EXPECT_NO_THROW(solve_lambda1(f, Weight::constant(1.0), o));
}
