#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fhe/cli.hpp"

using namespace fhe;
namespace fs = std::filesystem;

namespace {

struct Capture {
    std::ostringstream out, err;
    CommandContext ctx(const std::string& dir = "", bool quiet = false) {
        CommandContext c;
        c.out_dir = dir;
        c.quiet = quiet;
        c.out = &out;
        c.err = &err;
        return c;
    }
};

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("fhe_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string str() const { return path_.string(); }
    fs::path operator/(const std::string& s) const { return path_ / s; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

RunConfig reference() { return load_config(std::string(FHE_SOURCE_DIR) + "/configs/reference.cfg"); }

}  // namespace

TEST(HardyConstantCommand, SingleTriple) {
    RunConfig c = reference();
    c.hardy_n = {1};
    c.hardy_alpha = {0.25};
    c.hardy_p = {2.0};
    Capture cap;
    EXPECT_EQ(run_command("hardy-constant", c, cap.ctx()), kExitOk);
    EXPECT_EQ(lines(cap.out.str()), 2u);
    EXPECT_EQ(cap.out.str().rfind("n,alpha,p,C,err,status\n", 0), 0u);
}

TEST(HardyConstantCommand, LatticeMarksDegenerateRows) {
    RunConfig c = reference();
    c.hardy_n = {1};
    c.hardy_alpha = {0.25, 0.5, 0.75};
    c.hardy_p = {2.0, 3.0, 4.0};
    Capture cap;
    EXPECT_EQ(run_command("hardy-constant", c, cap.ctx()), kExitOk);
    const std::string s = cap.out.str();
    EXPECT_LE(lines(s) - 1, 9u);
    EXPECT_NE(s.find("1,0.5,2,,,degenerate"), std::string::npos);
    EXPECT_NE(cap.err.str().find("degenerate"), std::string::npos);
    Capture q;
    run_command("hardy-constant", c, q.ctx("", true));
    EXPECT_TRUE(q.err.str().empty());
}

TEST(SolveCommand, ReferenceWritesTables) {
    TempDir dir;
    Capture cap;
    EXPECT_EQ(run_command("solve", reference(), cap.ctx(dir.str())), kExitOk);
    const std::string tab = slurp(dir / "lambda.csv");
    EXPECT_EQ(lines(tab), 11u);
    EXPECT_NE(tab.find("1,7.18434149"), std::string::npos);
    for (int k = 1; k <= 10; ++k) EXPECT_TRUE(fs::exists(dir / ("phi_" + std::to_string(k) + ".csv"))) << k;
    EXPECT_NE(cap.out.str().find("lambda_1 ="), std::string::npos);
}

TEST(SolveCommand, FiveEigenfunctions) {
    TempDir dir;
    RunConfig c = reference();
    c.k_max = 5;
    Capture cap;
    EXPECT_EQ(run_command("solve", c, cap.ctx(dir.str(), true)), kExitOk);
    std::size_t phis = 0;
    for (const auto& e : fs::directory_iterator(dir / ""))
        if (e.path().filename().string().rfind("phi_", 0) == 0) ++phis;
    EXPECT_EQ(phis, 5u);
    EXPECT_TRUE(cap.out.str().empty());
}

TEST(SolveCommand, VanishingPositivePartExitsWithValidationCode) {
    TempDir dir;
    RunConfig c = reference();
    c.weight_value = -1.0;
    Capture cap;
    EXPECT_EQ(run_command("solve", c, cap.ctx(dir.str())), kExitValidation);
    EXPECT_NE(cap.err.str().find("V+ vanishes"), std::string::npos);
}

TEST(SolveCommand, SupercriticalMuIsRejectedWithWarning) {
    TempDir dir;
    RunConfig c = reference();
    c.mu_fraction.reset();
    c.mu = 1.05 * hardy_constant(c.problem, 1e-10).value;
    Capture cap;
    EXPECT_EQ(run_command("solve", c, cap.ctx(dir.str())), kExitValidation);
    EXPECT_NE(cap.err.str().find("warning"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "lambda.csv"));
}

TEST(SolveCommand, NonConvergenceExitCode) {
    TempDir dir;
    RunConfig c = reference();
    c.max_iter = 1;
    Capture cap;
    EXPECT_EQ(run_command("solve", c, cap.ctx(dir.str(), true)), kExitConvergence);
}

TEST(VerifyCommand, ReferenceConfigPassesAndIsDeterministic) {
    TempDir a, b;
    Capture ca, cb;
    EXPECT_EQ(run_command("verify", reference(), ca.ctx(a.str(), true)), kExitOk);
    EXPECT_EQ(run_command("verify", reference(), cb.ctx(b.str(), true)), kExitOk);
    const std::string ra = slurp(a / "verify_report.txt"), rb = slurp(b / "verify_report.txt");
    EXPECT_EQ(ra, rb);
    EXPECT_EQ(ra.rfind("# fhe verify report v1\n", 0), 0u);
    EXPECT_NE(ra.find("overall PASS failed=0"), std::string::npos);
    EXPECT_EQ(ra.find(" FAIL "), std::string::npos);
}

TEST(CheckWeightCommand, WholeSpaceW3IsInadmissible) {
    TempDir dir;
    const RunConfig c = load_config(std::string(FHE_SOURCE_DIR) + "/configs/w3_whole_space.cfg");
    Capture cap;
    EXPECT_EQ(run_command("check-weight", c, cap.ctx(dir.str(), true)), kExitVerification);
    const std::string txt = slurp(dir / "check_weight.txt");
    EXPECT_NE(txt.find("verdict=inadmissible"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "check_weight_sequences.csv"));
}

TEST(CheckWeightCommand, ConstantWeightIsAdmissible) {
    Capture cap;
    EXPECT_EQ(run_command("check-weight", reference(), cap.ctx()), kExitOk);
    EXPECT_NE(cap.out.str().find("verdict=admissible"), std::string::npos);
}

TEST(ScalingCommand, WritesOneRowPerStepPlusBase) {
    RunConfig c = reference();
    c.weight_kind = "example";
    c.weight_name = "W1";
    Capture cap;
    EXPECT_EQ(run_command("scaling-test", c, cap.ctx()), kExitOk);
    EXPECT_EQ(lines(cap.out.str()), 1u + 1u + static_cast<std::size_t>(c.scaling_steps));
    c.scaling_direction = "infinity";
    c.scaling_base = 2.0;
    c.scaling_steps = 3;
    Capture inf;
    EXPECT_EQ(run_command("scaling-test", c, inf.ctx()), kExitOk);
}

TEST(RunCommand, UnknownCommandAndMissingSeed) {
    Capture cap;
    EXPECT_EQ(run_command("frobnicate", reference(), cap.ctx()), kExitValidation);
    RunConfig c = reference();
    c.seed.reset();
    EXPECT_EQ(run_command("solve", c, cap.ctx()), kExitValidation);
    EXPECT_NE(cap.err.str().find("seed"), std::string::npos);
}
