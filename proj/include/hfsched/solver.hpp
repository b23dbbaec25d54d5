#pragma once

#include <atomic>
#include <chrono>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hfsched/program.hpp"

namespace hfsched {

enum class ProofTag { Optimal, FeasibleOnly, Infeasible };

inline const char* to_string(ProofTag p) {
  switch (p) {
    case ProofTag::Optimal: return "optimal";
    case ProofTag::FeasibleOnly: return "feasible";
    default: return "infeasible";
  }
}

struct Schedule {
  std::map<std::string, int> starts;  // real activities plus "finish"
  int makespan = 0;
  long long objective = 0;  // start index of the finish transition
  ProofTag proof = ProofTag::Infeasible;
};

struct SolveStats {
  long long nodes = 0;
  std::vector<std::pair<long long, int>> incumbent_trace;  // (nodes, makespan)
  double wall_ms = 0;
};

struct SolveOptions {
  int threads = 1;
  long long node_limit = -1;  // apportioned across root branches
  double timeout_ms = -1;     // wall clock; inherently nondeterministic
};

struct SolveResult {
  Schedule schedule;
  std::optional<StateTrajectory> trajectory;
  SolveStats stats;
};

namespace detail {

// Branch-and-bound over transition start times. Branching follows the
// topological order of the real transitions (lexicographic tie-break,
// ascending starts); the finish transition lands at its earliest feasible
// step on each leaf. Pruning: precedence-driven start ranges, pool-profile
// feasibility of the scheduled prefix (the operand net's pool rows), and a
// critical-path completion bound. Pruning against the shared best is strict
// (bound must exceed it), so every root branch finds its first leaf at its
// own best value no matter how threads interleave; branches merge by
// (value, branch index). Node counts may differ across thread counts, the
// returned schedule may not.
class StartTimeSearch {
 public:
  explicit StartTimeSearch(const TimedStartKernel& kernel)
      : k_(kernel), net_(kernel.net) {
    E_ = net_.transition_count();
    fin_ = net_.finish_transition();

    // Topological branch order over real transitions, lexicographic
    // tie-break, matching topological_order on the source network.
    std::vector<int> indegree(E_, 0);
    std::vector<std::vector<int>> succs(E_);
    for (int t = 0; t < E_; ++t)
      for (int u : k_.preds[t]) {
        succs[u].push_back(t);
        ++indegree[t];
      }
    std::vector<int> ready;
    for (int t = 0; t < E_; ++t)
      if (indegree[t] == 0 && t != fin_) ready.push_back(t);
    auto by_name = [&](int a, int b) {
      return net_.transitions[a] < net_.transitions[b];
    };
    std::sort(ready.begin(), ready.end(), by_name);
    while (!ready.empty()) {
      int t = ready.front();
      ready.erase(ready.begin());
      order_.push_back(t);
      for (int u : succs[t])
        if (--indegree[u] == 0 && u != fin_) {
          ready.insert(std::upper_bound(ready.begin(), ready.end(), u, by_name), u);
        }
    }

    for (int l = 0; l < net_.pool_count; ++l) {
      PoolSpec ps;
      int p = net_.pool_place(l);
      ps.capacity = net_.initial_marking[p];
      ps.demand.resize(E_);
      for (int t = 0; t < E_; ++t) ps.demand[t] = net_.m_minus.at(p, t);
      pools_.push_back(std::move(ps));
    }
  }

  struct Outcome {
    bool complete = true;
    std::optional<std::vector<int>> best;  // starts per transition incl finish
    int best_makespan = std::numeric_limits<int>::max();
    SolveStats stats;
  };

  Outcome run(const SolveOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    global_best_.store(std::numeric_limits<int>::max());

    // Root branches: the first branch-order transition's candidate starts.
    std::vector<int> root_starts;
    if (!order_.empty()) {
      int t = order_[0];
      for (int s = k_.est[t]; s <= k_.lst[t]; ++s) root_starts.push_back(s);
    } else {
      root_starts.push_back(0);  // degenerate: only the finish transition
    }
    const int tasks = static_cast<int>(root_starts.size());

    std::vector<Branch> results(tasks);
    long long per_task_budget = -1;
    if (opt.node_limit >= 0)
      per_task_budget = std::max<long long>(1, opt.node_limit / tasks);
    double deadline_ms = opt.timeout_ms;

    std::atomic<int> cursor{0};
    auto worker = [&]() {
      for (;;) {
        int task = cursor.fetch_add(1);
        if (task >= tasks) return;
        Context ctx;
        ctx.starts.assign(E_, -1);
        ctx.pool_usage.assign(pools_.size(), std::vector<int>(k_.horizon + 2, 0));
        ctx.pool_consumed.assign(pools_.size(), 0);
        ctx.node_budget = per_task_budget;
        ctx.deadline_ms = deadline_ms;
        ctx.t0 = t0;
        Branch& out = results[task];
        if (order_.empty()) {
          ++ctx.nodes;
          close_leaf(ctx, out);
        } else {
          int t = order_[0];
          int s = root_starts[task];
          ++ctx.nodes;
          if (apply(ctx, t, s)) {
            dfs(ctx, 1, out);
            undo(ctx, t, s);
          }
        }
        out.nodes = ctx.nodes;
        out.exhausted = !ctx.aborted;
      }
    };

    int threads = std::max(1, opt.threads);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    Outcome outcome;
    for (int i = 0; i < tasks; ++i) {
      const Branch& b = results[i];
      outcome.stats.nodes += b.nodes;
      outcome.complete = outcome.complete && b.exhausted;
      if (b.best_makespan < outcome.best_makespan) {
        outcome.best_makespan = b.best_makespan;
        outcome.best = b.best_starts;
      }
    }
    if (threads == 1) {
      // Faithful incumbent sequence; with several workers only the merged
      // result is deterministic, so the trace collapses to one entry.
      long long base = 0;
      int running = std::numeric_limits<int>::max();
      for (int i = 0; i < tasks; ++i) {
        for (const auto& [local_nodes, value] : results[i].improvements)
          if (value < running) {
            running = value;
            outcome.stats.incumbent_trace.push_back({base + local_nodes, value});
          }
        base += results[i].nodes;
      }
    } else if (outcome.best) {
      outcome.stats.incumbent_trace.push_back(
          {outcome.stats.nodes, outcome.best_makespan});
    }
    outcome.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t0)
            .count();
    return outcome;
  }

 private:
  struct PoolSpec {
    int capacity = 0;
    std::vector<int> demand;
  };

  struct Branch {
    int best_makespan = std::numeric_limits<int>::max();
    std::vector<int> best_starts;
    long long nodes = 0;
    bool exhausted = true;
    std::vector<std::pair<long long, int>> improvements;  // (local nodes, value)
  };

  struct Context {
    std::vector<int> starts;
    std::vector<std::vector<int>> pool_usage;  // renewable, per period
    std::vector<long long> pool_consumed;      // non-renewable
    long long nodes = 0;
    long long node_budget = -1;
    double deadline_ms = -1;
    std::chrono::steady_clock::time_point t0;
    int local_best = std::numeric_limits<int>::max();
    bool aborted = false;
  };

  bool limits_hit(Context& ctx) {
    if (ctx.node_budget >= 0 && ctx.nodes >= ctx.node_budget) return true;
    if (ctx.deadline_ms >= 0 && (ctx.nodes & 255) == 0) {
      double elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - ctx.t0)
                           .count();
      if (elapsed >= ctx.deadline_ms) return true;
    }
    return false;
  }

  bool apply(Context& ctx, int t, int s) {
    const bool renewable = net_.variant == Variant::Renewable;
    const int d = net_.durations[t];
    for (std::size_t l = 0; l < pools_.size(); ++l) {
      int r = pools_[l].demand[t];
      if (r == 0) continue;
      if (renewable) {
        for (int k = s; k < s + d; ++k)
          if (ctx.pool_usage[l][k] + r > pools_[l].capacity) return false;
      } else if (ctx.pool_consumed[l] + r > pools_[l].capacity) {
        return false;
      }
    }
    for (std::size_t l = 0; l < pools_.size(); ++l) {
      int r = pools_[l].demand[t];
      if (r == 0) continue;
      if (renewable)
        for (int k = s; k < s + d; ++k) ctx.pool_usage[l][k] += r;
      else
        ctx.pool_consumed[l] += r;
    }
    ctx.starts[t] = s;
    return true;
  }

  void undo(Context& ctx, int t, int s) {
    const bool renewable = net_.variant == Variant::Renewable;
    const int d = net_.durations[t];
    for (std::size_t l = 0; l < pools_.size(); ++l) {
      int r = pools_[l].demand[t];
      if (r == 0) continue;
      if (renewable) {
        for (int k = s; k < s + d; ++k) ctx.pool_usage[l][k] -= r;
      } else {
        ctx.pool_consumed[l] -= r;
      }
    }
    ctx.starts[t] = -1;
  }

  // Critical-path completion bound of the partial schedule: fixed starts for
  // the scheduled prefix, earliest precedence-feasible starts for the rest.
  int completion_bound(const Context& ctx) const {
    std::vector<int> e(E_, 0);  // earliest finish event, filled in topo order
    int finish_event = k_.est[fin_];
    for (int t : order_) {
      int start = ctx.starts[t];
      if (start < 0) {
        start = k_.est[t];
        for (int u : k_.preds[t]) start = std::max(start, e[u]);
      }
      e[t] = start + net_.durations[t];
      finish_event = std::max(finish_event, e[t]);
    }
    return finish_event - 1;  // lower bound on the makespan
  }

  void close_leaf(Context& ctx, Branch& out) {
    int finish_start = k_.est[fin_];
    for (int u : k_.preds[fin_])
      finish_start = std::max(finish_start, ctx.starts[u] + net_.durations[u]);
    if (finish_start > k_.lst[fin_]) return;
    int makespan = finish_start - 1;
    if (makespan >= ctx.local_best) return;

    std::vector<int> starts = ctx.starts;
    starts[fin_] = finish_start;
    FiringSchedule sched;
    sched.starts.assign(E_, std::nullopt);
    for (int t = 0; t < E_; ++t) sched.starts[t] = starts[t];
    if (!feasible(simulate(net_, sched, k_.horizon))) return;

    ctx.local_best = makespan;
    out.best_makespan = makespan;
    out.best_starts = std::move(starts);
    out.improvements.push_back({ctx.nodes, makespan});

    int seen = global_best_.load();
    while (makespan < seen &&
           !global_best_.compare_exchange_weak(seen, makespan)) {
    }
  }

  void dfs(Context& ctx, int depth, Branch& out) {
    if (ctx.aborted) return;
    int bound = completion_bound(ctx);
    if (bound >= ctx.local_best || bound > global_best_.load()) return;
    if (depth == static_cast<int>(order_.size())) {
      close_leaf(ctx, out);
      return;
    }
    int t = order_[depth];
    int lo = k_.est[t];
    for (int u : k_.preds[t]) lo = std::max(lo, ctx.starts[u] + net_.durations[u]);
    for (int s = lo; s <= k_.lst[t]; ++s) {
      ++ctx.nodes;
      if (limits_hit(ctx)) {
        ctx.aborted = true;
        return;
      }
      if (!apply(ctx, t, s)) continue;
      dfs(ctx, depth + 1, out);
      undo(ctx, t, s);
      if (ctx.aborted) return;
    }
  }

  const TimedStartKernel& k_;
  const OperandNet& net_;
  int E_ = 0;
  int fin_ = 0;
  std::vector<int> order_;
  std::vector<PoolSpec> pools_;
  std::atomic<int> global_best_{std::numeric_limits<int>::max()};
};

inline std::string dump_instance(const ProjectNetwork& net) {
  std::ostringstream os;
  os << "instance " << (net.name.empty() ? "(unnamed)" : net.name) << " variant "
     << to_string(net.variant) << "\n";
  for (const OperandPool& p : net.pools)
    os << "  pool " << p.id << " capacity " << p.capacity << "\n";
  for (const Activity& a : net.activities) {
    os << "  activity " << a.id << " duration " << a.duration;
    for (const auto& [pool, r] : a.demands) os << " " << pool << "=" << r;
    os << "\n";
  }
  for (const Arc& arc : net.arcs) os << "  arc " << arc.pred << " -> " << arc.succ << "\n";
  return os.str();
}

inline std::string dump_schedule(const Schedule& s) {
  std::ostringstream os;
  os << "  proof " << to_string(s.proof) << " makespan " << s.makespan
     << " objective " << s.objective << " starts {";
  for (const auto& [id, k] : s.starts) os << " " << id << ":" << k;
  os << " }\n";
  return os.str();
}

}  // namespace detail

// Exact solve of a built program through the shared start-time kernel. The
// winning schedule is simulated on the operand net (producing the returned
// trajectory) and certified against the full original row set via evaluate,
// so kernel drift from either formulation cannot go unnoticed.
inline SolveResult solve(const IlpProgram& prog, const SolveOptions& opt = {}) {
  detail::StartTimeSearch search(prog.kernel);
  auto outcome = search.run(opt);

  SolveResult res;
  res.stats = outcome.stats;
  if (!outcome.best) {
    if (!outcome.complete)
      throw Error("search limit exhausted before any feasible solution");
    res.schedule.proof = ProofTag::Infeasible;
    return res;
  }

  const OperandNet& net = prog.kernel.net;
  Schedule sched;
  for (int t = 0; t < net.transition_count(); ++t)
    sched.starts[net.transitions[t]] = (*outcome.best)[t];
  sched.objective = sched.starts.at("finish");
  sched.makespan = static_cast<int>(sched.objective) - 1;
  sched.proof = outcome.complete ? ProofTag::Optimal : ProofTag::FeasibleOnly;

  FiringSchedule firing = FiringSchedule::from_starts(net, sched.starts);
  SimulationResult sim = simulate(net, firing, prog.horizon);
  if (!feasible(sim))
    throw Error("internal: accepted schedule fails simulation: " +
                violation(sim).message);
  res.trajectory = trajectory(sim);

  auto assignment = prog.formulation == "hfnmcf"
                        ? assignment_for_trajectory(prog, *res.trajectory)
                        : assignment_for_schedule(prog, sched.starts);
  EvaluationResult cert = evaluate(prog, assignment);
  if (!cert.feasible() || cert.objective != sched.objective)
    throw Error("internal: kernel solution fails the " + prog.formulation +
                " rows (objective " + std::to_string(cert.objective) + ", " +
                std::to_string(cert.violations.size()) + " violations)");

  res.schedule = std::move(sched);
  return res;
}

// Independent oracle: exhaustive start enumeration within the precedence
// windows, feasibility decided solely by the operand-net simulator. Guarded
// to desk-size instances.
inline Schedule brute_force(const ProjectNetwork& network, int K) {
  require_valid(network);
  if (network.activities.size() > 7)
    throw SizeError("brute force guard: more than 7 activities");
  if (K > 24) throw SizeError("brute force guard: horizon above 24");

  OperandNet net = build_operand_net(network);
  const int E = net.transition_count();
  const int fin = net.finish_transition();

  std::vector<int> est = earliest_firings(net);
  Schedule best;
  best.proof = ProofTag::Infeasible;
  if (est[fin] > K) return best;

  auto preds = net.predecessor_transitions();
  std::vector<std::vector<int>> succs(E);
  std::vector<int> indegree(E, 0);
  for (int t = 0; t < E; ++t)
    for (int u : preds[t]) {
      succs[u].push_back(t);
      ++indegree[t];
    }
  std::vector<int> order;
  std::vector<int> frontier;
  for (int t = 0; t < E; ++t)
    if (indegree[t] == 0 && t != fin) frontier.push_back(t);
  while (!frontier.empty()) {
    std::sort(frontier.begin(), frontier.end());
    int t = frontier.front();
    frontier.erase(frontier.begin());
    order.push_back(t);
    for (int u : succs[t])
      if (--indegree[u] == 0 && u != fin) frontier.push_back(u);
  }

  std::vector<int> lst(E, K);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int t = *it;
    int latest = K;
    for (int u : succs[t]) latest = std::min(latest, lst[u]);
    lst[t] = latest - net.durations[t];
  }

  std::vector<int> starts(E, -1);
  int best_value = std::numeric_limits<int>::max();

  auto try_leaf = [&]() {
    int finish_start = est[fin];
    for (int u : preds[fin])
      finish_start = std::max(finish_start, starts[u] + net.durations[u]);
    if (finish_start > K) return;
    int makespan = finish_start - 1;
    if (makespan >= best_value) return;
    FiringSchedule sched;
    sched.starts.assign(E, std::nullopt);
    starts[fin] = finish_start;
    for (int t = 0; t < E; ++t) sched.starts[t] = starts[t];
    starts[fin] = -1;
    SimulationResult sim = simulate(net, sched, K);
    if (!feasible(sim)) return;
    best_value = makespan;
    best.makespan = makespan;
    best.objective = finish_start;
    best.proof = ProofTag::Optimal;
    best.starts.clear();
    for (int t = 0; t < E; ++t)
      best.starts[net.transitions[t]] = t == fin ? finish_start : starts[t];
  };

  // Plain recursive enumeration; the only shortcuts are precedence-driven
  // ranges and a completion bound against the best value found so far.
  auto enumerate = [&](auto&& self, int depth) -> void {
    int frontier_bound = est[fin];
    for (std::size_t i = 0; i < order.size(); ++i) {
      int t = order[i];
      int s = starts[t] >= 0 ? starts[t] : est[t];
      frontier_bound = std::max(frontier_bound, s + net.durations[t]);
    }
    if (frontier_bound - 1 >= best_value) return;
    if (depth == static_cast<int>(order.size())) {
      try_leaf();
      return;
    }
    int t = order[depth];
    int lo = est[t];
    for (int u : preds[t]) lo = std::max(lo, starts[u] + net.durations[u]);
    for (int s = lo; s <= lst[t]; ++s) {
      starts[t] = s;
      self(self, depth + 1);
      starts[t] = -1;
      if (s + net.durations[t] - 1 >= best_value) break;  // even alone too late
    }
  };
  enumerate(enumerate, 0);
  return best;
}

// ---------------------------------------------------------------------------
// Value-level equivalence of the two formulations on one instance: equal
// optimal values, and each optimum feasible in the other's full row set with
// equal objective. Stated at the optimal-value level; alternate optima with
// different matrices are fine.
// ---------------------------------------------------------------------------
struct EquivalenceReport {
  bool equivalent = false;
  ProofTag rcpsp_proof = ProofTag::Infeasible;
  ProofTag hfnmcf_proof = ProofTag::Infeasible;
  long long rcpsp_objective = 0;
  long long hfnmcf_objective = 0;
  int rcpsp_makespan = 0;
  int hfnmcf_makespan = 0;
  bool rcpsp_solution_accepted_by_hfnmcf = false;
  bool hfnmcf_solution_accepted_by_rcpsp = false;
  std::string details;  // counterexample dump when not equivalent
};

inline EquivalenceReport check_equivalence(const ProjectNetwork& network,
                                           std::optional<int> horizon = {},
                                           const SolveOptions& opt = {}) {
  EquivalenceReport rep;
  TimeWindows windows = critical_path_windows(network, horizon);
  IlpProgram rcpsp = build_rcpsp(network, windows);

  bool hf_buildable = true;
  IlpProgram hfnmcf;
  try {
    hfnmcf = build_hfnmcf(build_operand_net(network), windows.horizon);
  } catch (const Error&) {
    hf_buildable = false;  // e.g. non-renewable demand above the whole budget
  }

  SolveResult rc = solve(rcpsp, opt);
  rep.rcpsp_proof = rc.schedule.proof;
  rep.rcpsp_objective = rc.schedule.objective;
  rep.rcpsp_makespan = rc.schedule.makespan;

  if (!hf_buildable) {
    rep.hfnmcf_proof = ProofTag::Infeasible;
    rep.equivalent = rc.schedule.proof == ProofTag::Infeasible;
    if (!rep.equivalent)
      rep.details = "hfnmcf infeasible by final-marking construction, rcpsp is not\n" +
                    detail::dump_instance(network) + detail::dump_schedule(rc.schedule);
    return rep;
  }

  SolveResult hf = solve(hfnmcf, opt);
  rep.hfnmcf_proof = hf.schedule.proof;
  rep.hfnmcf_objective = hf.schedule.objective;
  rep.hfnmcf_makespan = hf.schedule.makespan;

  if (rc.schedule.proof == ProofTag::Infeasible ||
      hf.schedule.proof == ProofTag::Infeasible) {
    rep.equivalent = rc.schedule.proof == ProofTag::Infeasible &&
                     hf.schedule.proof == ProofTag::Infeasible;
    if (!rep.equivalent)
      rep.details = "feasibility disagreement\n" + detail::dump_instance(network) +
                    detail::dump_schedule(rc.schedule) + detail::dump_schedule(hf.schedule);
    return rep;
  }

  EvaluationResult rc_in_hf =
      evaluate(hfnmcf, assignment_for_schedule(hfnmcf, rc.schedule.starts));
  rep.rcpsp_solution_accepted_by_hfnmcf =
      rc_in_hf.feasible() && rc_in_hf.objective == rc.schedule.objective;

  EvaluationResult hf_in_rc =
      evaluate(rcpsp, assignment_for_schedule(rcpsp, hf.schedule.starts));
  rep.hfnmcf_solution_accepted_by_rcpsp =
      hf_in_rc.feasible() && hf_in_rc.objective == hf.schedule.objective;

  rep.equivalent = rep.rcpsp_objective == rep.hfnmcf_objective &&
                   rep.rcpsp_solution_accepted_by_hfnmcf &&
                   rep.hfnmcf_solution_accepted_by_rcpsp;
  if (!rep.equivalent) {
    std::ostringstream os;
    os << "equivalence failure: rcpsp objective " << rep.rcpsp_objective
       << ", hfnmcf objective " << rep.hfnmcf_objective
       << ", cross rcpsp-in-hfnmcf " << rep.rcpsp_solution_accepted_by_hfnmcf
       << ", cross hfnmcf-in-rcpsp " << rep.hfnmcf_solution_accepted_by_rcpsp << "\n";
    os << detail::dump_instance(network);
    os << "rcpsp solution:\n" << detail::dump_schedule(rc.schedule);
    os << "hfnmcf solution:\n" << detail::dump_schedule(hf.schedule);
    rep.details = os.str();
  }
  return rep;
}

}  // namespace hfsched
