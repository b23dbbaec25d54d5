#pragma once

#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hfsched/simulation.hpp"
#include "hfsched/solver.hpp"

namespace hfsched {

// ---------------------------------------------------------------------------
// Slack / waiting times
// ---------------------------------------------------------------------------

// T_ij = start_j - (start_i + d_i): periods a completion token sits in i's
// completion place waiting for j. Sink activities get an entry against the
// finish transition.
struct ArcSlack {
  std::string pred;
  std::string succ;
  int slack = 0;
};

struct SlackReport {
  std::vector<ArcSlack> arcs;
  // Total token-periods spent waiting in each completion place; equals the
  // sum of the outgoing arc slacks of that activity.
  std::map<std::string, long long> completion_token_periods;
};

inline SlackReport slack_times(const Schedule& schedule,
                               const ProjectNetwork& network,
                               const StateTrajectory& traj) {
  SlackReport report;
  auto start_of = [&](const std::string& id) {
    auto it = schedule.starts.find(id);
    if (it == schedule.starts.end())
      throw Error("schedule misses activity '" + id + "'");
    return it->second;
  };

  std::map<std::string, long long> expected_hold;
  auto add_arc = [&](const std::string& pred, const std::string& succ) {
    const Activity& p = *network.find_activity(pred);
    int t = start_of(succ) - (start_of(pred) + p.duration);
    if (t < 0)
      throw Error("arc " + pred + " -> " + succ + " has negative slack " +
                  std::to_string(t) + "; schedule violates precedence");
    report.arcs.push_back({pred, succ, t});
    expected_hold[pred] += t;
  };

  auto succs = network.successor_lists();
  for (const Arc& arc : network.arcs) add_arc(arc.pred, arc.succ);
  for (std::size_t i = 0; i < network.activities.size(); ++i)
    if (succs[i].empty()) add_arc(network.activities[i].id, "finish");

  // Cross-validate against the trajectory: the marking of a completion place
  // integrates to exactly the waiting token-periods of its outgoing arcs.
  for (std::size_t i = 0; i < network.activities.size(); ++i) {
    const std::string& id = network.activities[i].id;
    int p = -1;
    for (std::size_t q = 0; q < traj.place_names.size(); ++q)
      if (traj.place_names[q] == id) p = static_cast<int>(q);
    if (p < 0) throw Error("trajectory misses completion place of '" + id + "'");
    long long held = 0;
    for (int k = 0; k <= traj.horizon; ++k) held += traj.q_s.at(p, k);
    report.completion_token_periods[id] = held;
    if (held != expected_hold[id])
      throw Error("slack identity violated at '" + id + "': place holds " +
                  std::to_string(held) + " token-periods, arc slacks sum to " +
                  std::to_string(expected_hold[id]));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Earned value
// ---------------------------------------------------------------------------

struct Ratio {
  long long num = 0;
  long long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct EarnedValueReport {
  int as_of = 0;
  long long earned = 0;   // EV: value of completions in the executed run
  long long planned = 0;  // PV: value of completions in the plan
  long long schedule_variance = 0;  // SV = EV - PV
  std::optional<Ratio> spi;         // EV/PV; undefined when PV = 0
};

// Value accrues strictly at completion (the output firing). Both trajectories
// must describe the same net; values are per real activity, non-negative.
inline EarnedValueReport earned_value(const StateTrajectory& planned,
                                      const StateTrajectory& actual,
                                      const std::map<std::string, long long>& values,
                                      int as_of) {
  if (planned.transition_names != actual.transition_names)
    throw Error("planned and actual trajectories describe different nets");
  for (const auto& [id, v] : values)
    if (v < 0) throw Error("negative value for activity '" + id + "'");

  auto accrue = [&](const StateTrajectory& traj) {
    long long total = 0;
    for (std::size_t t = 0; t + 1 < traj.transition_names.size(); ++t) {
      auto it = values.find(traj.transition_names[t]);
      if (it == values.end()) continue;
      for (int k = 1; k <= std::min(as_of, traj.horizon); ++k)
        if (traj.u_plus.at(static_cast<int>(t), k - 1)) total += it->second;
    }
    return total;
  };

  EarnedValueReport report;
  report.as_of = as_of;
  report.earned = accrue(actual);
  report.planned = accrue(planned);
  report.schedule_variance = report.earned - report.planned;
  if (report.planned != 0) report.spi = Ratio{report.earned, report.planned};
  return report;
}

// ---------------------------------------------------------------------------
// Schedule tables (per-period allocation, Gantt style)
// ---------------------------------------------------------------------------

struct ScheduleTable {
  std::string pool;  // empty when the instance has no pools
  int makespan = 0;
  std::vector<std::string> row_labels;
  std::vector<std::vector<std::optional<int>>> cells;  // rows x (makespan+1), k = 0..makespan
  std::vector<long long> per_period;   // footer, k = 0..makespan
  std::vector<long long> cumulative;   // footer, k = 0..makespan

  std::string to_text() const {
    std::size_t label_width = 16;
    for (const std::string& l : row_labels) label_width = std::max(label_width, l.size());
    label_width = std::max({label_width, std::string("operands allocated per period").size()});

    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(label_width))
       << (pool.empty() ? "activity/time" : "activity/time [" + pool + "]");
    for (int k = 0; k <= makespan; ++k) os << std::right << std::setw(4) << k;
    os << "\n";
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
      os << std::left << std::setw(static_cast<int>(label_width)) << row_labels[r];
      for (int k = 0; k <= makespan; ++k) {
        if (cells[r][k])
          os << std::right << std::setw(4) << *cells[r][k];
        else
          os << "    ";
      }
      os << "\n";
    }
    os << std::left << std::setw(static_cast<int>(label_width))
       << "operands allocated per period";
    for (int k = 0; k <= makespan; ++k) os << std::right << std::setw(4) << per_period[k];
    os << "\n";
    os << std::left << std::setw(static_cast<int>(label_width))
       << "operands allocated in project";
    for (int k = 0; k <= makespan; ++k) os << std::right << std::setw(4) << cumulative[k];
    os << "\n";
    return os.str();
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "activity/time";
    for (int k = 0; k <= makespan; ++k) os << "," << k;
    os << "\n";
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
      os << row_labels[r];
      for (int k = 0; k <= makespan; ++k) {
        os << ",";
        if (cells[r][k]) os << *cells[r][k];
      }
      os << "\n";
    }
    os << "operands allocated per period";
    for (int k = 0; k <= makespan; ++k) os << "," << per_period[k];
    os << "\n";
    os << "operands allocated in project";
    for (int k = 0; k <= makespan; ++k) os << "," << cumulative[k];
    os << "\n";
    return os.str();
  }
};

// One table per pool; cells carry the activity's demand during its ongoing
// periods. A pool-less instance yields a single demand-less table.
inline std::vector<ScheduleTable> schedule_table(const StateTrajectory& traj,
                                                 const ProjectNetwork& network) {
  int fin = traj.transition_index("finish");
  if (fin < 0) throw Error("trajectory has no finish transition");
  int makespan = 0;
  for (int k = 1; k <= traj.horizon; ++k)
    if (traj.u_minus.at(fin, k - 1)) makespan = k - 1;

  auto build = [&](const std::string& pool) {
    ScheduleTable table;
    table.pool = pool;
    table.makespan = makespan;
    for (const Activity& a : network.activities) {
      int t = traj.transition_index(a.id);
      if (t < 0) throw Error("trajectory misses activity '" + a.id + "'");
      table.row_labels.push_back(a.label.empty() ? a.id : a.label);
      std::vector<std::optional<int>> row(makespan + 1);
      int demand = pool.empty() ? 0 : a.demand(pool);
      if (demand > 0)
        for (int k = 1; k <= makespan; ++k)
          if (traj.q_e.at(t, k - 1)) row[k] = demand;
      table.cells.push_back(std::move(row));
    }
    table.per_period.assign(makespan + 1, 0);
    table.cumulative.assign(makespan + 1, 0);
    for (int k = 1; k <= makespan; ++k) {
      long long started = table.cumulative[k - 1];
      long long ongoing = 0;
      for (const Activity& a : network.activities) {
        int t = traj.transition_index(a.id);
        int demand = pool.empty() ? 0 : a.demand(pool);
        if (traj.q_e.at(t, k - 1)) ongoing += demand;
        if (traj.u_minus.at(t, k - 1)) started += demand;
      }
      table.per_period[k] = ongoing;
      table.cumulative[k] = started;
    }
    return table;
  };

  std::vector<ScheduleTable> tables;
  if (network.pools.empty()) {
    tables.push_back(build(""));
  } else {
    for (const OperandPool& pool : network.pools) tables.push_back(build(pool.id));
  }
  return tables;
}

}  // namespace hfsched
