#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hfsched/model.hpp"
#include "hfsched/operand_net.hpp"
#include "hfsched/simulation.hpp"

namespace hfsched {

enum class VarKind { Binary, IntNonNegative };
enum class Rel { Eq, Le, Ge };

struct IlpVariable {
  std::string name;
  VarKind kind = VarKind::Binary;
  long long upper = -1;  // -1 = unbounded; binaries carry 1; window-fixed carry 0
};

struct IlpRow {
  std::string name;
  std::string block;  // equation tag this row realizes, e.g. "precedence"
  std::vector<std::pair<int, long long>> terms;  // (variable index, coefficient)
  Rel rel = Rel::Eq;
  long long rhs = 0;
};

// Instance mirror both builders attach to their programs. The solver runs its
// start-time search against this kernel and uses the operand net as the
// feasibility oracle and trajectory vehicle.
struct TimedStartKernel {
  OperandNet net;
  int horizon = 0;
  std::vector<int> est, lst;                 // per transition, finish last
  std::vector<std::vector<int>> preds;       // per transition
  int makespan_bound = 0;                    // capacity-relaxed lower bound
};

struct IlpProgram {
  std::string formulation;  // "rcpsp" | "hfnmcf"
  int horizon = 0;
  std::vector<IlpVariable> vars;
  std::vector<long long> objective;  // aligned with vars
  std::vector<IlpRow> rows;
  std::map<std::string, long long> block_rows;  // equation tag -> emitted rows
  std::set<std::string> domain_blocks;          // realized as variable domains
  std::string objective_block;
  TimedStartKernel kernel;

  std::unordered_map<std::string, int> var_index;

  int add_var(const std::string& name, VarKind kind, long long upper = -1) {
    int idx = static_cast<int>(vars.size());
    vars.push_back({name, kind, kind == VarKind::Binary && upper < 0 ? 1 : upper});
    objective.push_back(0);
    var_index.emplace(name, idx);
    return idx;
  }

  int find_var(const std::string& name) const {
    auto it = var_index.find(name);
    return it == var_index.end() ? -1 : it->second;
  }

  void add_row(IlpRow row) {
    block_rows[row.block] += 1;
    rows.push_back(std::move(row));
  }
};

namespace detail {

inline TimedStartKernel make_kernel(OperandNet net, int K) {
  TimedStartKernel kernel;
  kernel.horizon = K;
  kernel.est = earliest_firings(net);
  kernel.preds = net.predecessor_transitions();
  const int E = net.transition_count();
  const int fin = net.finish_transition();

  if (kernel.est[fin] > K)
    throw HorizonError("horizon " + std::to_string(K) +
                       " is below the critical-path bound (finish event at " +
                       std::to_string(kernel.est[fin]) + ")");
  kernel.makespan_bound = kernel.est[fin] - 1;

  std::vector<std::vector<int>> succs(E);
  for (int t = 0; t < E; ++t)
    for (int u : kernel.preds[t]) succs[u].push_back(t);

  // Backward pass to a fixpoint; declaration order is not topological, the
  // finish transition stays pinned at K.
  kernel.lst.assign(E, K);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int t = 0; t < E; ++t) {
      if (t == fin) continue;
      int latest = K;
      for (int u : succs[t]) latest = std::min(latest, kernel.lst[u]);
      latest -= net.durations[t];
      if (latest < kernel.lst[t]) {
        kernel.lst[t] = latest;
        changed = true;
      }
    }
  }
  for (int t = 0; t < E; ++t)
    if (kernel.lst[t] < kernel.est[t])
      throw HorizonError("transition '" + net.transitions[t] +
                         "' has an empty start window at horizon " +
                         std::to_string(K));
  kernel.net = std::move(net);
  return kernel;
}

inline std::string time_var(const std::string& prefix, const std::string& name,
                            int k) {
  return prefix + "_" + name + "_" + std::to_string(k);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Classical time-indexed program: min sum k*x_nk subject to start-once,
// precedence, and per-period (renewable) or cumulative (non-renewable)
// operand rows. Start variables exist only within [EST, LST]. The ongoing
// window at period k is kappa in [k-d+1, k]: an activity occupies exactly d
// periods from its start period.
// ---------------------------------------------------------------------------
inline IlpProgram build_rcpsp(const ProjectNetwork& network,
                              const TimeWindows& windows) {
  require_valid(network);
  const int K = windows.horizon;
  const int n = static_cast<int>(network.activities.size());

  IlpProgram prog;
  prog.formulation = "rcpsp";
  prog.horizon = K;
  prog.kernel = detail::make_kernel(build_operand_net(network), K);

  struct Entry {
    std::string id;
    int duration;
    ActivityWindow win;
  };
  std::vector<Entry> entries;
  for (const Activity& a : network.activities) {
    const ActivityWindow& w = windows.window(a.id);
    if (w.lst < w.est)
      throw HorizonError("activity '" + a.id + "' has an empty window");
    entries.push_back({a.id, a.duration, w});
  }
  entries.push_back({"finish", 0, windows.finish});

  auto var_name = [](const std::string& id, int k) {
    return detail::time_var("x", id, k);
  };
  for (const Entry& e : entries)
    for (int k = e.win.est; k <= e.win.lst; ++k)
      prog.add_var(var_name(e.id, k), VarKind::Binary);

  prog.objective_block = "makespan-objective";
  for (int k = windows.finish.est; k <= windows.finish.lst; ++k)
    prog.objective[prog.find_var(var_name("finish", k))] = k;

  for (const Entry& e : entries) {
    IlpRow row{"once_" + e.id, "start-once", {}, Rel::Eq, 1};
    for (int k = e.win.est; k <= e.win.lst; ++k)
      row.terms.push_back({prog.find_var(var_name(e.id, k)), 1});
    prog.add_row(std::move(row));
  }

  auto precedence_row = [&](const std::string& pred, int dur,
                            const ActivityWindow& pw, const std::string& succ,
                            const ActivityWindow& sw) {
    IlpRow row{"prec_" + pred + "_" + succ, "precedence", {}, Rel::Ge, dur};
    for (int k = sw.est; k <= sw.lst; ++k)
      row.terms.push_back({prog.find_var(var_name(succ, k)), k});
    for (int k = pw.est; k <= pw.lst; ++k)
      row.terms.push_back({prog.find_var(var_name(pred, k)), -k});
    prog.add_row(std::move(row));
  };
  for (const Arc& arc : network.arcs) {
    const Activity& p = *network.find_activity(arc.pred);
    precedence_row(arc.pred, p.duration, windows.window(arc.pred), arc.succ,
                   windows.window(arc.succ));
  }
  auto succs = network.successor_lists();
  for (int i = 0; i < n; ++i)
    if (succs[i].empty()) {
      const Activity& a = network.activities[i];
      precedence_row(a.id, a.duration, windows.window(a.id), "finish",
                     windows.finish);
    }

  for (const OperandPool& pool : network.pools) {
    if (network.variant == Variant::Renewable) {
      for (int k = 1; k <= K; ++k) {
        IlpRow row{"cap_" + pool.id + "_" + std::to_string(k), "capacity-per-period", {},
                   Rel::Le, pool.capacity};
        for (const Activity& a : network.activities) {
          int r = a.demand(pool.id);
          if (r == 0 || a.duration == 0) continue;
          const ActivityWindow& w = windows.window(a.id);
          int lo = std::max(w.est, k - a.duration + 1);
          int hi = std::min(w.lst, k);
          for (int kappa = lo; kappa <= hi; ++kappa)
            row.terms.push_back({prog.find_var(var_name(a.id, kappa)), r});
        }
        if (!row.terms.empty()) prog.add_row(std::move(row));
      }
    } else {
      for (int kappa = 1; kappa <= K; ++kappa) {
        IlpRow row{"budget_" + pool.id + "_" + std::to_string(kappa), "budget-cumulative", {},
                   Rel::Le, pool.capacity};
        for (const Activity& a : network.activities) {
          int r = a.demand(pool.id);
          if (r == 0) continue;
          const ActivityWindow& w = windows.window(a.id);
          for (int k = w.est; k <= std::min(w.lst, kappa); ++k)
            row.terms.push_back({prog.find_var(var_name(a.id, k)), r});
        }
        if (!row.terms.empty()) prog.add_row(std::move(row));
      }
    }
  }
  return prog;
}

// ---------------------------------------------------------------------------
// Operand-net minimum-cost-flow specialization: state-transition rows,
// duration coupling, initial and final markings, and non-negativity realized
// as variable domains. Transition markings are omitted
// and reconstructed after the solve. Start variables span the whole grid so
// the structural variable count is (|S| + 2|E|) K + |S|; those outside
// [EST, LST] are fixed to zero through their bounds.
// ---------------------------------------------------------------------------
inline IlpProgram build_hfnmcf(const OperandNet& net, int K) {
  IlpProgram prog;
  prog.formulation = "hfnmcf";
  prog.horizon = K;
  prog.kernel = detail::make_kernel(net, K);
  const OperandNet& on = prog.kernel.net;

  const int S = on.place_count(), E = on.transition_count();
  std::vector<int> required = required_final_marking(on);

  auto qs_name = [&](int p, int k) { return detail::time_var("qs", on.places[p], k); };
  auto um_name = [&](int t, int k) {
    return detail::time_var("um", on.transitions[t], k);
  };
  auto up_name = [&](int t, int k) {
    return detail::time_var("up", on.transitions[t], k);
  };

  for (int p = 0; p < S; ++p)
    for (int k = 1; k <= K + 1; ++k) prog.add_var(qs_name(p, k), VarKind::IntNonNegative);
  for (int t = 0; t < E; ++t)
    for (int k = 1; k <= K; ++k) {
      bool in_window = k >= prog.kernel.est[t] && k <= prog.kernel.lst[t];
      prog.add_var(um_name(t, k), VarKind::Binary, in_window ? 1 : 0);
    }
  for (int t = 0; t < E; ++t)
    for (int k = 1; k <= K; ++k) {
      int d = on.durations[t];
      bool reachable = k - d >= prog.kernel.est[t] && k - d <= prog.kernel.lst[t];
      prog.add_var(up_name(t, k), VarKind::Binary, reachable ? 1 : 0);
    }
  prog.domain_blocks.insert("nonnegative-domain");

  prog.objective_block = "makespan-objective";
  int fin = on.finish_transition();
  for (int k = 1; k <= K; ++k)
    prog.objective[prog.find_var(um_name(fin, k))] = k;

  for (int p = 0; p < S; ++p)
    for (int k = 1; k <= K; ++k) {
      IlpRow row{"state_" + on.places[p] + "_" + std::to_string(k), "state-transition", {},
                 Rel::Eq, 0};
      row.terms.push_back({prog.find_var(qs_name(p, k + 1)), -1});
      row.terms.push_back({prog.find_var(qs_name(p, k)), 1});
      for (int t = 0; t < E; ++t) {
        if (on.m_plus.at(p, t) != 0)
          row.terms.push_back({prog.find_var(up_name(t, k)), on.m_plus.at(p, t)});
        if (on.m_minus.at(p, t) != 0)
          row.terms.push_back({prog.find_var(um_name(t, k)), -on.m_minus.at(p, t)});
      }
      prog.add_row(std::move(row));
    }

  for (int t = 0; t < E; ++t) {
    int d = on.durations[t];
    for (int k = 1; k <= K; ++k) {
      IlpRow row{"dur_" + on.transitions[t] + "_" + std::to_string(k), "duration-coupling",
                 {}, Rel::Eq, 0};
      if (k + d <= K) {
        row.terms.push_back({prog.find_var(up_name(t, k + d)), -1});
        row.terms.push_back({prog.find_var(um_name(t, k)), 1});
      } else {
        // completion would land beyond the grid; the start cannot happen
        row.terms.push_back({prog.find_var(um_name(t, k)), 1});
      }
      prog.add_row(std::move(row));
    }
    for (int k = 1; k <= std::min(d, K); ++k) {
      IlpRow row{"dur_" + on.transitions[t] + "_orphan_" + std::to_string(k),
                 "duration-coupling", {}, Rel::Eq, 0};
      row.terms.push_back({prog.find_var(up_name(t, k)), 1});
      prog.add_row(std::move(row));
    }
  }

  for (int p = 0; p < S; ++p) {
    IlpRow row{"init_" + on.places[p], "initial-marking", {}, Rel::Eq, on.initial_marking[p]};
    row.terms.push_back({prog.find_var(qs_name(p, 1)), 1});
    prog.add_row(std::move(row));
  }
  for (int p = 0; p < S; ++p) {
    IlpRow row{"final_" + on.places[p], "final-marking", {}, Rel::Eq, required[p]};
    row.terms.push_back({prog.find_var(qs_name(p, K + 1)), 1});
    prog.add_row(std::move(row));
  }
  return prog;
}

// ---------------------------------------------------------------------------
// Evaluation and assignments
// ---------------------------------------------------------------------------

struct EvaluationResult {
  long long objective = 0;
  std::vector<std::string> violations;

  bool feasible() const { return violations.empty(); }
};

// Exact integer evaluation of an assignment against every row and every
// variable domain. The assignment must cover all program variables.
inline EvaluationResult evaluate(
    const IlpProgram& prog, const std::map<std::string, long long>& assignment) {
  std::vector<long long> value(prog.vars.size());
  for (std::size_t i = 0; i < prog.vars.size(); ++i) {
    auto it = assignment.find(prog.vars[i].name);
    if (it == assignment.end())
      throw Error("assignment misses variable '" + prog.vars[i].name + "'");
    value[i] = it->second;
  }

  EvaluationResult result;
  for (std::size_t i = 0; i < prog.vars.size(); ++i) {
    const IlpVariable& var = prog.vars[i];
    long long x = value[i];
    bool ok = x >= 0 && (var.upper < 0 || x <= var.upper);
    if (var.kind == VarKind::Binary) ok = ok && (x == 0 || x == 1);
    if (!ok)
      result.violations.push_back("domain:" + var.name + "=" + std::to_string(x));
    result.objective += prog.objective[i] * x;
  }
  for (const IlpRow& row : prog.rows) {
    long long lhs = 0;
    for (const auto& [idx, coeff] : row.terms) lhs += coeff * value[idx];
    bool ok = row.rel == Rel::Eq   ? lhs == row.rhs
              : row.rel == Rel::Le ? lhs <= row.rhs
                                   : lhs >= row.rhs;
    if (!ok)
      result.violations.push_back(row.name + " (lhs " + std::to_string(lhs) +
                                  ", rhs " + std::to_string(row.rhs) + ")");
  }
  return result;
}

// Full assignment realizing a start-time schedule, per formulation. Unknown
// or out-of-window starts leave their indicator unset / set against a fixed
// bound, so infeasible schedules surface as row or domain violations.
inline std::map<std::string, long long> assignment_for_schedule(
    const IlpProgram& prog, const std::map<std::string, int>& starts) {
  std::map<std::string, long long> a;
  for (const IlpVariable& v : prog.vars) a[v.name] = 0;

  const OperandNet& net = prog.kernel.net;
  const int K = prog.horizon;
  if (prog.formulation == "rcpsp") {
    for (const auto& [name, k] : starts) {
      std::string var = detail::time_var("x", name, k);
      if (a.count(var)) a[var] = 1;
    }
    return a;
  }

  // hfnmcf: lay down the firings, then integrate the state equation.
  std::vector<std::vector<long long>> qs(
      net.place_count(), std::vector<long long>(K + 2, 0));
  for (int p = 0; p < net.place_count(); ++p) qs[p][1] = net.initial_marking[p];
  std::vector<std::pair<int, int>> firings;  // (transition, start)
  for (const auto& [name, k] : starts) {
    int t = net.transition_index(name);
    if (t < 0) continue;
    std::string um = detail::time_var("um", name, k);
    if (a.count(um)) a[um] = 1;
    int finish = k + net.durations[t];
    std::string up = detail::time_var("up", name, finish);
    if (a.count(up)) a[up] = 1;
    firings.push_back({t, k});
  }
  for (int k = 1; k <= K; ++k)
    for (int p = 0; p < net.place_count(); ++p) {
      long long next = qs[p][k];
      for (const auto& [t, start] : firings) {
        if (start == k) next -= net.m_minus.at(p, t);
        if (start + net.durations[t] == k) next += net.m_plus.at(p, t);
      }
      qs[p][k + 1] = next;
    }
  for (int p = 0; p < net.place_count(); ++p)
    for (int k = 1; k <= K + 1; ++k)
      a[detail::time_var("qs", net.places[p], k)] = qs[p][k];
  return a;
}

inline std::map<std::string, long long> assignment_for_trajectory(
    const IlpProgram& prog, const StateTrajectory& traj) {
  std::map<std::string, long long> a;
  for (const IlpVariable& v : prog.vars) a[v.name] = 0;
  const OperandNet& net = prog.kernel.net;
  for (int p = 0; p < net.place_count(); ++p)
    for (int k = 1; k <= traj.horizon + 1; ++k)
      a[detail::time_var("qs", net.places[p], k)] = traj.q_s.at(p, k - 1);
  for (int t = 0; t < net.transition_count(); ++t)
    for (int k = 1; k <= traj.horizon; ++k) {
      if (traj.u_minus.at(t, k - 1))
        a[detail::time_var("um", net.transitions[t], k)] = 1;
      if (traj.u_plus.at(t, k - 1))
        a[detail::time_var("up", net.transitions[t], k)] = 1;
    }
  return a;
}

// ---------------------------------------------------------------------------
// LP-format export (CPLEX LP dialect). Naming contract: x_<activity>_<k>,
// qs_<place>_<k>, um_<transition>_<k>, up_<transition>_<k>.
// ---------------------------------------------------------------------------
inline std::string export_lp_string(const IlpProgram& prog) {
  std::ostringstream os;
  os << "\\ hfsched export, formulation " << (prog.formulation.empty() ? "none" : prog.formulation)
     << ", horizon " << prog.horizon << "\n";
  os << "Minimize\n obj:";
  bool first = true;
  for (std::size_t i = 0; i < prog.vars.size(); ++i) {
    if (prog.objective[i] == 0) continue;
    long long c = prog.objective[i];
    if (first) {
      os << " " << c << " " << prog.vars[i].name;
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ") << (c < 0 ? -c : c) << " " << prog.vars[i].name;
    }
  }
  if (first) os << " 0";
  os << "\nSubject To\n";
  for (const IlpRow& row : prog.rows) {
    if (row.terms.empty()) continue;
    os << " " << row.name << ":";
    bool f = true;
    for (const auto& [idx, coeff] : row.terms) {
      if (f) {
        os << " " << coeff << " " << prog.vars[idx].name;
        f = false;
      } else {
        os << (coeff < 0 ? " - " : " + ") << (coeff < 0 ? -coeff : coeff) << " "
           << prog.vars[idx].name;
      }
    }
    const char* rel = row.rel == Rel::Eq ? "=" : row.rel == Rel::Le ? "<=" : ">=";
    os << " " << rel << " " << row.rhs << "\n";
  }
  os << "Bounds\n";
  for (const IlpVariable& v : prog.vars) {
    if (v.kind == VarKind::Binary && v.upper == 0)
      os << " " << v.name << " = 0\n";
    else if (v.kind == VarKind::IntNonNegative && v.upper >= 0)
      os << " 0 <= " << v.name << " <= " << v.upper << "\n";
  }
  bool any_general = false;
  for (const IlpVariable& v : prog.vars)
    if (v.kind == VarKind::IntNonNegative) {
      if (!any_general) os << "Generals\n";
      any_general = true;
      os << " " << v.name << "\n";
    }
  bool any_binary = false;
  for (const IlpVariable& v : prog.vars)
    if (v.kind == VarKind::Binary) {
      if (!any_binary) os << "Binaries\n";
      any_binary = true;
      os << " " << v.name << "\n";
    }
  os << "End\n";
  return os.str();
}

inline void export_lp(const IlpProgram& prog, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << export_lp_string(prog);
  out.flush();
  if (!out) throw IoError("failed writing LP file '" + path + "'");
}

}  // namespace hfsched
