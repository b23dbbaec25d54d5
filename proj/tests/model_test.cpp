#include "hfsched/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "hfsched/solver.hpp"
#include "test_util.hpp"

using namespace hfsched;
namespace tt = hfsched::testing;

TEST(Validate, PaperNetworkIsClean) {
  EXPECT_TRUE(validate_network(tt::paper_network()).valid());
  EXPECT_TRUE(validate_network(tt::paper_network_nonrenewable()).valid());
}

TEST(Validate, SelfLoopIsACycle) {
  ProjectNetwork net;
  net.activities.push_back({"X", "X", 1, {}});
  net.arcs.push_back({"X", "X"});
  ValidationReport report = validate_network(net);
  int cycles = 0;
  for (const auto& issue : report.issues) cycles += issue.code == "cycle";
  EXPECT_EQ(cycles, 1);
}

TEST(Validate, DemandAboveCapacity) {
  ProjectNetwork net;
  net.pools = {{"R1", OperandKind::Renewable, 8}};
  net.activities.push_back({"X", "X", 1, {{"R1", 9}}});
  ValidationReport report = validate_network(net);
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_EQ(report.issues[0].code, "demand-exceeds-capacity");
}

TEST(Validate, CollectsEveryViolation) {
  ProjectNetwork net;
  net.pools = {{"R1", OperandKind::Renewable, 2}};
  net.activities.push_back({"X", "X", -1, {{"R1", 9}, {"nope", 1}}});
  net.activities.push_back({"X", "X", 1, {}});
  net.arcs.push_back({"X", "ghost"});
  ValidationReport report = validate_network(net);
  std::set<std::string> codes;
  for (const auto& issue : report.issues) codes.insert(issue.code);
  EXPECT_TRUE(codes.count("duplicate-activity"));
  EXPECT_TRUE(codes.count("negative-duration"));
  EXPECT_TRUE(codes.count("unknown-pool"));
  EXPECT_TRUE(codes.count("demand-exceeds-capacity"));
  EXPECT_TRUE(codes.count("dangling-arc"));
}

TEST(Validate, MixedPoolKindsRejected) {
  ProjectNetwork net = tt::paper_network();
  net.pools.push_back({"R2", OperandKind::NonRenewable, 5});
  ValidationReport report = validate_network(net);
  ASSERT_FALSE(report.valid());
  EXPECT_EQ(report.issues[0].code, "variant-mismatch");
}

TEST(TopologicalOrder, PaperNetwork) {
  std::vector<std::string> order = topological_order(tt::paper_network());
  auto pos = [&](const std::string& id) {
    return std::find(order.begin(), order.end(), id) - order.begin();
  };
  EXPECT_EQ(order.size(), 8u);
  EXPECT_LT(pos("A"), pos("C"));
  EXPECT_LT(pos("D"), pos("F"));
  EXPECT_LT(pos("D"), pos("G"));
  EXPECT_LT(pos("G"), pos("H"));
}

TEST(TopologicalOrder, EmptyNetwork) {
  EXPECT_TRUE(topological_order(ProjectNetwork{}).empty());
}

TEST(TopologicalOrder, DiamondEndpointsForced) {
  ProjectNetwork net;
  for (const char* id : {"A", "B", "C", "D"})
    net.activities.push_back({id, id, 1, {}});
  net.arcs = {{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}};
  std::vector<std::string> order = topological_order(net);
  EXPECT_EQ(order.front(), "A");
  EXPECT_EQ(order.back(), "D");
}

TEST(TopologicalOrder, CycleListsOffendingNodes) {
  ProjectNetwork net;
  for (const char* id : {"A", "B", "C"}) net.activities.push_back({id, id, 1, {}});
  net.arcs = {{"A", "B"}, {"B", "C"}, {"C", "B"}};
  try {
    topological_order(net);
    FAIL() << "expected CycleError";
  } catch (const CycleError& e) {
    std::set<std::string> nodes(e.offending_nodes.begin(), e.offending_nodes.end());
    EXPECT_EQ(nodes, (std::set<std::string>{"B", "C"}));
  }
}

TEST(TopologicalOrder, RespectsArcsOnRandomDags) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    ProjectNetwork net = tt::random_network(rng);
    std::vector<std::string> order = topological_order(net);

    std::set<std::string> ids;
    for (const Activity& a : net.activities) ids.insert(a.id);
    EXPECT_EQ(std::set<std::string>(order.begin(), order.end()), ids);

    auto pos = [&](const std::string& id) {
      return std::find(order.begin(), order.end(), id) - order.begin();
    };
    for (const Arc& arc : net.arcs) EXPECT_LT(pos(arc.pred), pos(arc.succ));
  }
}

TEST(CriticalPath, PaperBoundIsThirteen) {
  TimeWindows w = critical_path_windows(tt::paper_network(), tt::kPaperHorizon);
  EXPECT_EQ(w.makespan_bound, 13);
  EXPECT_EQ(w.finish.est, 14);
  EXPECT_EQ(w.finish.lst, 18);
}

TEST(CriticalPath, SingleActivity) {
  ProjectNetwork net;
  net.activities.push_back({"X", "X", 5, {}});
  TimeWindows w = critical_path_windows(net);
  EXPECT_EQ(w.window("X").est, 1);
  EXPECT_EQ(w.makespan_bound, 5);
  EXPECT_EQ(w.horizon, 6);  // default grid leaves room for the finish event
}

TEST(CriticalPath, ChainBound) {
  ProjectNetwork net;
  net.activities.push_back({"a", "a", 1, {}});
  net.activities.push_back({"b", "b", 2, {}});
  net.activities.push_back({"c", "c", 3, {}});
  net.arcs = {{"a", "b"}, {"b", "c"}};
  TimeWindows w = critical_path_windows(net);
  EXPECT_EQ(w.makespan_bound, 6);
  EXPECT_EQ(w.window("b").est, 2);
  EXPECT_EQ(w.window("c").eft, 7);
}

TEST(CriticalPath, WindowInvariants) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    ProjectNetwork net = tt::random_network(rng);
    TimeWindows w = critical_path_windows(net);
    for (const auto& [id, win] : w.by_activity) {
      int d = net.find_activity(id)->duration;
      EXPECT_LE(win.est, win.lst);
      EXPECT_EQ(win.eft, win.est + d);
      EXPECT_LE(win.lst + d, w.horizon);
    }
  }
}

TEST(CriticalPath, TooSmallHorizonRejected) {
  EXPECT_THROW(critical_path_windows(tt::paper_network(), 3), HorizonError);
  EXPECT_THROW(critical_path_windows(tt::paper_network(), 13), HorizonError);
  EXPECT_NO_THROW(critical_path_windows(tt::paper_network(), 14));
}

// Relaxing the pool to the total demand makes capacity vacuous, so the
// critical-path bound must equal the solved optimum.
TEST(CriticalPath, BoundMatchesRelaxedSolve) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    ProjectNetwork net = tt::random_network(rng);
    for (OperandPool& pool : net.pools)
      pool.capacity = static_cast<int>(net.total_demand(pool.id));
    TimeWindows w = critical_path_windows(net);
    SolveResult res = solve(build_rcpsp(net, w));
    ASSERT_EQ(res.schedule.proof, ProofTag::Optimal);
    EXPECT_EQ(res.schedule.makespan, w.makespan_bound);
  }
}

TEST(Windows, DummiesCarryNothing) {
  // Dummy start/finish are implicit; the finish transition materialized by
  // the transform has zero duration and no demands.
  OperandNet net = build_operand_net(tt::paper_network());
  int fin = net.finish_transition();
  EXPECT_EQ(net.durations[fin], 0);
  for (int p = 0; p < net.place_count(); ++p) EXPECT_EQ(net.m_plus.at(p, fin), 0);
  for (int l = 0; l < net.pool_count; ++l)
    EXPECT_EQ(net.m_minus.at(net.pool_place(l), fin), 0);
}
