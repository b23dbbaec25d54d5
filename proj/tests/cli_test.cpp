// Drives the installed binary end to end; every command is a thin wrapper
// over library calls, so these mostly pin exit codes and output contracts.

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "test_util.hpp"

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunResult run_cli(const std::string& args) {
  std::string out_path = ::testing::TempDir() + "cli_stdout.txt";
  std::string err_path = ::testing::TempDir() + "cli_stderr.txt";
  std::string cmd = std::string(HFSCHED_CLI) + " " + args + " > " + out_path +
                    " 2> " + err_path;
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp_file(out_path), slurp_file(err_path)};
}

std::string fixture(const std::string& name) {
  return std::string(HFSCHED_FIXTURES_DIR) + "/" + name;
}

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST(Cli, ValidateFixtureExitsZero) {
  RunResult r = run_cli("validate " + fixture("demeulemeester.proj"));
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("8 activities"), std::string::npos);
}

TEST(Cli, ValidatePsplibFixture) {
  RunResult r = run_cli("validate " + fixture("mini3.sm"));
  EXPECT_EQ(r.exit_code, 0) << r.err;
}

TEST(Cli, ValidateCyclicFixtureExitsTwo) {
  std::string path = write_temp("cyclic.proj",
                                "hfsched-project 1\n"
                                "variant renewable\n"
                                "activity X duration 1\n"
                                "activity Y duration 1\n"
                                "arc X Y\n"
                                "arc Y X\n");
  RunResult r = run_cli("validate " + path);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("cycle"), std::string::npos);
}

TEST(Cli, MissingFileExitsSixtySix) {
  RunResult r = run_cli("validate /no/such/file.proj");
  EXPECT_EQ(r.exit_code, 66);
}

TEST(Cli, UsageErrorsExitSixtyFour) {
  EXPECT_EQ(run_cli("frobnicate").exit_code, 64);
  EXPECT_EQ(run_cli("solve").exit_code, 64);
}

TEST(Cli, TransformEmitsOperandNet) {
  RunResult r = run_cli("transform " + fixture("demeulemeester.proj"));
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("10 places, 9 transitions"), std::string::npos);
  EXPECT_NE(r.out.find("color red"), std::string::npos);

  RunResult burn = run_cli("transform " + fixture("demeulemeester.proj") +
                           " --variant nonrenewable --capacity R1=25");
  EXPECT_EQ(burn.exit_code, 0);
  EXPECT_EQ(burn.out.find("color red"), std::string::npos);
  // consumption side is unchanged
  EXPECT_NE(burn.out.find("arc pool:R1 -> transition:C weight 4 color black"),
            std::string::npos);
}

TEST(Cli, TransformEmptyProject) {
  std::string path =
      write_temp("empty.proj", "hfsched-project 1\nvariant renewable\n");
  RunResult r = run_cli("transform " + path);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("1 places, 1 transitions"), std::string::npos);
}

TEST(Cli, SolveBothPrintsEquivalence) {
  RunResult r = run_cli("solve " + fixture("demeulemeester.proj") +
                        " --formulation both");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("rcpsp=15 hfnmcf=15 equivalent=true"), std::string::npos);
}

TEST(Cli, SolveNonRenewableOverride) {
  RunResult r = run_cli("solve " + fixture("demeulemeester.proj") +
                        " --capacity R1=25 --variant nonrenewable"
                        " --formulation rcpsp");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("makespan=13"), std::string::npos);
}

TEST(Cli, SolveInfeasibleBudgetAgreesAndExitsThree) {
  RunResult r = run_cli("solve " + fixture("demeulemeester.proj") +
                        " --capacity R1=24 --variant nonrenewable"
                        " --formulation both");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("infeasible"), std::string::npos);
}

TEST(Cli, SolveTooSmallHorizonFails) {
  RunResult r = run_cli("solve " + fixture("demeulemeester.proj") + " --horizon 3");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("horizon"), std::string::npos);
}

TEST(Cli, SolveCsvFormat) {
  RunResult r = run_cli("solve " + fixture("demeulemeester.proj") +
                        " --formulation hfnmcf --format csv");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("hfnmcf,15,16,optimal"), std::string::npos);
}

TEST(Cli, SolveDocFormatStreamsResultDocument) {
  RunResult r = run_cli("solve " + fixture("demeulemeester.proj") +
                        " --formulation rcpsp --format doc");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("hfsched-result 1"), std::string::npos);
  EXPECT_NE(r.out.find("makespan 15"), std::string::npos);
  EXPECT_NE(r.out.find("qs pool R1 8 2 2 1 1 1 1 1 0 0 0 0 0 0 1 1 8 8 8"),
            std::string::npos);
}

TEST(Cli, SolvePsplibFixture) {
  RunResult r = run_cli("solve " + fixture("mini3.sm") + " --formulation both");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("rcpsp=5 hfnmcf=5 equivalent=true"), std::string::npos);
}

TEST(Cli, ReportTableMatchesReferenceFooter) {
  std::string result_path = ::testing::TempDir() + "renewable.result";
  RunResult solve_run = run_cli("solve " + fixture("demeulemeester.proj") +
                                " --formulation hfnmcf -o " + result_path);
  ASSERT_EQ(solve_run.exit_code, 0) << solve_run.err;

  RunResult table = run_cli("report table " + result_path);
  EXPECT_EQ(table.exit_code, 0) << table.err;
  EXPECT_NE(table.out.find("Perform Activity A"), std::string::npos);

  RunResult csv = run_cli("report table " + result_path + " --format csv");
  EXPECT_NE(csv.out.find(
                "operands allocated per period,0,6,6,7,7,7,7,7,8,8,8,8,8,8,7,7"),
            std::string::npos);
}

TEST(Cli, ReportSlackNamesWaitingPlaces) {
  std::string result_path = ::testing::TempDir() + "renewable_slack.result";
  ASSERT_EQ(run_cli("solve " + fixture("demeulemeester.proj") +
                    " --formulation hfnmcf -o " + result_path)
                .exit_code,
            0);
  RunResult r = run_cli("report slack " + result_path);
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("arc A -> C slack 2"), std::string::npos);
  EXPECT_NE(r.out.find("arc D -> F slack 3"), std::string::npos);
  EXPECT_NE(r.out.find("arc D -> G slack 5"), std::string::npos);
  EXPECT_NE(r.out.find("place done A holds tokens for 2 periods"),
            std::string::npos);
  EXPECT_NE(r.out.find("place done D holds tokens for 8 periods"),
            std::string::npos);
  EXPECT_NE(r.out.find("place done F holds tokens for 2 periods"),
            std::string::npos);
  EXPECT_EQ(r.out.find("place done B"), std::string::npos);
}

TEST(Cli, ReportEvaIdentityAndDelay) {
  std::string plan_path = ::testing::TempDir() + "plan.result";
  ASSERT_EQ(run_cli("solve " + fixture("demeulemeester.proj") +
                    " --formulation hfnmcf -o " + plan_path)
                .exit_code,
            0);
  RunResult same =
      run_cli("report eva " + plan_path + " --actual " + plan_path +
              " --values unit");
  EXPECT_EQ(same.exit_code, 0) << same.err;
  EXPECT_NE(same.out.find("sv 0"), std::string::npos);
  EXPECT_NE(same.out.find("spi 8/8"), std::string::npos);
}

TEST(Cli, ExportLpRoundTrip) {
  std::string lp_path = ::testing::TempDir() + "fixture.lp";
  RunResult r = run_cli("export-lp " + fixture("demeulemeester.proj") +
                        " --formulation rcpsp -o " + lp_path);
  EXPECT_EQ(r.exit_code, 0) << r.err;
  std::string lp = slurp_file(lp_path);
  EXPECT_NE(lp.find("Minimize"), std::string::npos);
  EXPECT_NE(lp.find("x_finish_"), std::string::npos);
  EXPECT_NE(lp.find("cap_R1_"), std::string::npos);
}

TEST(Cli, WriteToUnwritablePathExitsSeventyFour) {
  RunResult r = run_cli("solve " + fixture("demeulemeester.proj") +
                        " --formulation hfnmcf -o /nonexistent_dir_hfsched/x.result");
  EXPECT_EQ(r.exit_code, 74);
}
