#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace hfsched;
namespace tt = hfsched::testing;

namespace {

std::string fixture_path(const std::string& name) {
  return std::string(HFSCHED_FIXTURES_DIR) + "/" + name;
}

std::string slurp(const std::string& path) { return read_text_file(path); }

}  // namespace

TEST(ParseNative, BundledFixtureMatchesPaperNetwork) {
  InstanceDocument doc = parse_native(slurp(fixture_path("demeulemeester.proj")));
  EXPECT_EQ(doc.network, tt::paper_network());
  EXPECT_EQ(doc.horizon, 18);
}

TEST(ParseNative, EmptyDocumentRejectedAtPositionZero) {
  try {
    parse_native("");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 0);
  }
}

TEST(ParseNative, DuplicateActivityNamesTheId) {
  std::string text =
      "hfsched-project 1\n"
      "variant renewable\n"
      "activity X duration 1\n"
      "activity X duration 2\n";
  try {
    parse_native(text);
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'X'"), std::string::npos);
  }
}

TEST(ParseNative, UnknownFieldCarriesLineNumber) {
  std::string text = "hfsched-project 1\nvariant renewable\nfrobnicate yes\n";
  try {
    parse_native(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 3);
    EXPECT_NE(std::string(e.what()).find("frobnicate"), std::string::npos);
  }
}

TEST(ParseNative, RoundTripOnRandomNetworks) {
  std::mt19937 rng(83);
  for (int trial = 0; trial < 80; ++trial) {
    InstanceDocument doc;
    doc.network = tt::random_network(rng);
    if (std::uniform_int_distribution<int>(0, 1)(rng))
      doc.horizon = doc.network.default_horizon();
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) doc.formulation = "both";
    InstanceDocument round = parse_native(serialize_native(doc));
    EXPECT_EQ(round, doc);
  }
}

TEST(ParseNative, QuotedLabelsSurvive) {
  InstanceDocument doc;
  doc.network.activities.push_back({"A", "Perform Activity A", 2, {}});
  InstanceDocument round = parse_native(serialize_native(doc));
  EXPECT_EQ(round.network.activities[0].label, "Perform Activity A");
}

TEST(ParsePsplib, MinimalThreeJobFixture) {
  ProjectNetwork net = parse_psplib_sm(slurp(fixture_path("mini3.sm")));
  ASSERT_EQ(net.activities.size(), 1u);  // one real job between the dummies
  EXPECT_EQ(net.activities[0].id, "j2");
  EXPECT_EQ(net.activities[0].duration, 5);
  EXPECT_EQ(net.activities[0].demand("R1"), 3);
  EXPECT_TRUE(net.arcs.empty());  // only dummy arcs in the file
  ASSERT_EQ(net.pools.size(), 1u);
  EXPECT_EQ(net.pools[0].capacity, 4);
  EXPECT_EQ(net.variant, Variant::Renewable);
  EXPECT_TRUE(validate_network(net).valid());
}

TEST(ParsePsplib, ZeroResourcesGiveEmptyPoolList) {
  std::string text = slurp(fixture_path("mini3.sm"));
  // flip the resource count and drop the per-job demand column
  std::string patched;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("- renewable") != std::string::npos)
      line = "  - renewable                 :  0   R";
    else if (line.find("jobnr. mode duration") != std::string::npos)
      line = "jobnr. mode duration";
    else if (line == "  1      1     0       0")
      line = "  1      1     0";
    else if (line == "  2      1     5       3")
      line = "  2      1     5";
    else if (line == "  3      1     0       0")
      line = "  3      1     0";
    patched += line + "\n";
  }
  ProjectNetwork net = parse_psplib_sm(patched);
  EXPECT_TRUE(net.pools.empty());
  EXPECT_TRUE(net.activities[0].demands.empty());
}

TEST(ParsePsplib, TruncatedFileNamesMissingSection) {
  std::string text = slurp(fixture_path("mini3.sm"));
  std::string truncated = text.substr(0, text.find("REQUESTS/DURATIONS"));
  try {
    parse_psplib_sm(truncated);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("REQUESTS/DURATIONS"), std::string::npos);
  }
}

TEST(ParsePsplib, MultiModeRejected) {
  std::string text = slurp(fixture_path("mini3.sm"));
  std::size_t pos = text.find("   2        1          1           3");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 37, "   2        3          1           3");
  try {
    parse_psplib_sm(text);
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("multi-mode unsupported"),
              std::string::npos);
  }
}

TEST(ParsePsplib, GeneratedFilesAlwaysValidate) {
  // Emit a synthetic .sm for random data and check the parsed network.
  std::mt19937 rng(89);
  for (int trial = 0; trial < 30; ++trial) {
    int real = std::uniform_int_distribution<int>(1, 5)(rng);
    int jobs = real + 2;
    int resources = std::uniform_int_distribution<int>(0, 2)(rng);
    std::vector<int> durations(jobs + 1, 0), caps(resources, 0);
    std::vector<std::vector<int>> demand(jobs + 1, std::vector<int>(resources, 0));
    for (int j = 2; j < jobs; ++j)
      durations[j] = std::uniform_int_distribution<int>(0, 5)(rng);
    for (int r = 0; r < resources; ++r)
      caps[r] = std::uniform_int_distribution<int>(3, 8)(rng);
    for (int j = 2; j < jobs; ++j)
      for (int r = 0; r < resources; ++r)
        demand[j][r] = std::uniform_int_distribution<int>(0, caps[r])(rng);

    std::ostringstream sm;
    sm << "************\n";
    sm << "jobs (incl. supersource/sink ):  " << jobs << "\n";
    sm << "RESOURCES\n";
    sm << "  - renewable                 :  " << resources << "   R\n";
    sm << "  - nonrenewable              :  0   N\n";
    sm << "************\n";
    sm << "PRECEDENCE RELATIONS:\n";
    sm << "jobnr.    #modes  #successors   successors\n";
    sm << "   1        1          " << real << "        ";
    for (int j = 2; j < jobs; ++j) sm << "   " << j;
    sm << "\n";
    for (int j = 2; j < jobs; ++j) {
      std::vector<int> succ;
      for (int s = j + 1; s < jobs; ++s)
        if (std::uniform_int_distribution<int>(0, 99)(rng) < 40) succ.push_back(s);
      succ.push_back(jobs);  // everything reaches the sink
      sm << "   " << j << "        1          " << succ.size() << "        ";
      for (int s : succ) sm << "   " << s;
      sm << "\n";
    }
    sm << "   " << jobs << "        1          0\n";
    sm << "************\n";
    sm << "REQUESTS/DURATIONS:\n";
    sm << "jobnr. mode duration";
    for (int r = 0; r < resources; ++r) sm << "  R " << r + 1;
    sm << "\n------------\n";
    for (int j = 1; j <= jobs; ++j) {
      sm << "  " << j << "      1     " << durations[j];
      for (int r = 0; r < resources; ++r) sm << "   " << demand[j][r];
      sm << "\n";
    }
    sm << "************\n";
    sm << "RESOURCEAVAILABILITIES:\n  ";
    for (int r = 0; r < resources; ++r) sm << "R " << r + 1 << "  ";
    sm << "\n  ";
    for (int r = 0; r < resources; ++r) sm << caps[r] << "  ";
    sm << "\n************\n";

    ProjectNetwork net = parse_psplib_sm(sm.str());
    EXPECT_TRUE(validate_network(net).valid());
    EXPECT_EQ(net.activities.size(), static_cast<std::size_t>(real));
  }
}

TEST(WriteResults, RenewableUsageRowMatchesReferenceTable) {
  ProjectNetwork net = tt::paper_network();
  InstanceDocument doc;
  doc.network = net;
  doc.horizon = tt::kPaperHorizon;
  TimeWindows windows = critical_path_windows(net, tt::kPaperHorizon);
  SolveResult res = solve(build_rcpsp(net, windows));
  std::string text =
      serialize_results(res.schedule, *res.trajectory, doc, "rcpsp");
  EXPECT_NE(text.find("pool R1 period 0 6 6 7 7 7 7 7 8 8 8 8 8 8 7 7"),
            std::string::npos);
  EXPECT_NE(
      text.find("pool R1 cumulative 0 6 6 9 9 13 13 13 18 18 21 21 21 21 25 25"),
      std::string::npos);
  EXPECT_NE(text.find("makespan 15"), std::string::npos);
}

TEST(WriteResults, RoundTripThroughReader) {
  ProjectNetwork net = tt::paper_network();
  InstanceDocument doc;
  doc.network = net;
  doc.horizon = tt::kPaperHorizon;
  SolveResult res = solve(
      build_hfnmcf(build_operand_net(net), tt::kPaperHorizon));
  std::string path = ::testing::TempDir() + "hfsched_roundtrip.result";
  write_results(res.schedule, *res.trajectory, doc, "hfnmcf", path);
  ResultDocument back = read_results(path);
  EXPECT_EQ(back.instance, doc);
  EXPECT_EQ(back.makespan, 15);
  EXPECT_EQ(back.starts, res.schedule.starts);
  EXPECT_EQ(back.trajectory.q_s, res.trajectory->q_s);
  EXPECT_EQ(back.trajectory.u_minus, res.trajectory->u_minus);
}

TEST(WriteResults, EmptyProjectMakespanZero) {
  InstanceDocument doc;
  SolveResult res = solve(
      build_hfnmcf(build_operand_net(doc.network), doc.network.default_horizon()));
  std::string text =
      serialize_results(res.schedule, *res.trajectory, doc, "hfnmcf");
  EXPECT_NE(text.find("makespan 0"), std::string::npos);
}

TEST(WriteResults, UnwritablePathSurfacesIoError) {
  ProjectNetwork net = tt::paper_network();
  InstanceDocument doc;
  doc.network = net;
  SolveResult res = solve(
      build_hfnmcf(build_operand_net(net), tt::kPaperHorizon));
  EXPECT_THROW(write_results(res.schedule, *res.trajectory, doc, "hfnmcf",
                             "/nonexistent_dir_hfsched/out.result"),
               IoError);
}
