#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hfsched/operand_net.hpp"

namespace hfsched {

// One start step per transition (1-based). Finish times derive from the
// transition durations: k+ = k- + d.
struct FiringSchedule {
  std::vector<std::optional<int>> starts;  // indexed like net.transitions

  static FiringSchedule from_starts(const OperandNet& net,
                                    const std::map<std::string, int>& by_name) {
    FiringSchedule s;
    s.starts.assign(net.transition_count(), std::nullopt);
    for (const auto& [name, k] : by_name) {
      int t = net.transition_index(name);
      if (t < 0) throw Error("unknown transition '" + name + "'");
      s.starts[t] = k;
    }
    return s;
  }
};

// Full state history of one simulation run.
//   q_s: place markings, columns k = 1..K+1 (marking before step-k firings)
//   q_e: transition markings, columns k = 1..K+1 (1 while ongoing during k)
//   u_minus / u_plus: firing indicators, columns k = 1..K
struct StateTrajectory {
  int horizon = 0;
  std::vector<std::string> place_names;
  std::vector<std::string> transition_names;
  IntMatrix q_s;
  IntMatrix q_e;
  IntMatrix u_minus;
  IntMatrix u_plus;

  int transition_index(const std::string& name) const {
    for (std::size_t t = 0; t < transition_names.size(); ++t)
      if (transition_names[t] == name) return static_cast<int>(t);
    return -1;
  }
};

struct FeasibilityViolation {
  int time_step = 0;
  std::string place;
  long long deficit = 0;  // how far below zero / off the required final value
  std::string message;
};

using SimulationResult = std::variant<StateTrajectory, FeasibilityViolation>;

inline bool feasible(const SimulationResult& r) {
  return std::holds_alternative<StateTrajectory>(r);
}
inline const StateTrajectory& trajectory(const SimulationResult& r) {
  return std::get<StateTrajectory>(r);
}
inline const FeasibilityViolation& violation(const SimulationResult& r) {
  return std::get<FeasibilityViolation>(r);
}

// Transition marking from the firing matrices: column k holds the running
// sum of starts minus completions through step k, i.e. 1 exactly while the
// transition is ongoing during period k. Throws on negative prefixes
// (a completion before its start).
inline IntMatrix reconstruct_transition_marking(const IntMatrix& u_minus,
                                                const IntMatrix& u_plus) {
  if (u_minus.rows != u_plus.rows || u_minus.cols != u_plus.cols)
    throw Error("firing matrices differ in shape");
  const int E = u_minus.rows, K = u_minus.cols;
  IntMatrix q_e(E, K + 1);
  for (int t = 0; t < E; ++t) {
    int running = 0;
    for (int k = 1; k <= K; ++k) {
      running += u_minus.at(t, k - 1) - u_plus.at(t, k - 1);
      if (running < 0)
        throw Error("inconsistent firing matrices: transition " +
                    std::to_string(t) + " completes before it starts at step " +
                    std::to_string(k));
      q_e.at(t, k - 1) = running;
    }
    q_e.at(t, K) = running;  // no firings at K+1
  }
  return q_e;
}

// Execute the operand-net state transition over k = 1..K and check the run:
// every intermediate marking must stay non-negative and the final marking
// must equal required_final_marking. Production and consumption within the
// same step cancel before the non-negativity check, matching the state
// equation. Returns the first violation otherwise.
inline SimulationResult simulate(const OperandNet& net,
                                 const FiringSchedule& schedule, int K) {
  const int S = net.place_count(), E = net.transition_count();
  if (static_cast<int>(schedule.starts.size()) != E)
    throw Error("schedule covers " + std::to_string(schedule.starts.size()) +
                " transitions, net has " + std::to_string(E));

  IntMatrix u_minus(E, K), u_plus(E, K);
  for (int t = 0; t < E; ++t) {
    if (!schedule.starts[t])
      throw Error("transition '" + net.transitions[t] + "' is unscheduled");
    int start = *schedule.starts[t];
    int finish = start + net.durations[t];
    if (start < 1 || start > K)
      throw Error("transition '" + net.transitions[t] + "' starts at " +
                  std::to_string(start) + " outside 1.." + std::to_string(K));
    if (finish > K + 1)
      throw Error("transition '" + net.transitions[t] + "' finish event " +
                  std::to_string(finish) + " exceeds K+1");
    u_minus.at(t, start - 1) = 1;
    // A finish event at K+1 cannot land in the grid; the run then fails the
    // final-marking check below rather than erroring out.
    if (finish <= K) u_plus.at(t, finish - 1) = 1;
  }

  IntMatrix q_s(S, K + 1);
  for (int p = 0; p < S; ++p) q_s.at(p, 0) = net.initial_marking[p];
  for (int k = 1; k <= K; ++k) {
    for (int p = 0; p < S; ++p) {
      long long next = q_s.at(p, k - 1);
      for (int t = 0; t < E; ++t) {
        if (u_plus.at(t, k - 1)) next += net.m_plus.at(p, t);
        if (u_minus.at(t, k - 1)) next -= net.m_minus.at(p, t);
      }
      if (next < 0)
        return FeasibilityViolation{
            k, net.places[p], next,
            "marking of place '" + net.places[p] + "' drops to " +
                std::to_string(next) + " at step " + std::to_string(k)};
      q_s.at(p, k) = static_cast<int>(next);
    }
  }

  std::vector<int> required = required_final_marking(net);
  for (int p = 0; p < S; ++p) {
    if (q_s.at(p, K) != required[p])
      return FeasibilityViolation{
          K + 1, net.places[p], q_s.at(p, K) - required[p],
          "final marking of place '" + net.places[p] + "' is " +
              std::to_string(q_s.at(p, K)) + ", required " +
              std::to_string(required[p])};
  }

  StateTrajectory traj;
  traj.horizon = K;
  traj.place_names = net.places;
  traj.transition_names = net.transitions;
  traj.q_s = std::move(q_s);
  traj.u_minus = std::move(u_minus);
  traj.u_plus = std::move(u_plus);
  traj.q_e = reconstruct_transition_marking(traj.u_minus, traj.u_plus);
  return traj;
}

// Per-period and cumulative operand allocation per pool, indexed k = 0..K.
// Per-period counts ongoing activities' demands; cumulative counts the full
// demand of every activity started by k.
struct PoolUsage {
  std::string pool;
  std::vector<long long> per_period;
  std::vector<long long> cumulative;
};

inline std::vector<PoolUsage> per_period_usage(const StateTrajectory& traj,
                                               const OperandNet& net) {
  const int K = traj.horizon;
  std::vector<PoolUsage> usage;
  for (int l = 0; l < net.pool_count; ++l) {
    int p = net.pool_place(l);
    PoolUsage u;
    u.pool = net.places[p];
    u.per_period.assign(K + 1, 0);
    u.cumulative.assign(K + 1, 0);
    for (int k = 1; k <= K; ++k) {
      long long ongoing = 0, started = u.cumulative[k - 1];
      for (int t = 0; t < net.transition_count(); ++t) {
        if (traj.q_e.at(t, k - 1)) ongoing += net.m_minus.at(p, t);
        if (traj.u_minus.at(t, k - 1)) started += net.m_minus.at(p, t);
      }
      u.per_period[k] = ongoing;
      u.cumulative[k] = started;
    }
    usage.push_back(std::move(u));
  }
  return usage;
}

}  // namespace hfsched
