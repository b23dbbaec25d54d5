#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hfsched {

// Operand variant of an instance, mirroring the alpha-3 field of the
// scheduling taxonomy. One variant per instance; mixed pools are rejected
// by validation.
enum class Variant { Renewable, NonRenewable };

enum class OperandKind { Renewable, NonRenewable };

inline const char* to_string(Variant v) {
  return v == Variant::Renewable ? "renewable" : "nonrenewable";
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CycleError : public Error {
 public:
  CycleError(const std::string& msg, std::vector<std::string> nodes)
      : Error(msg), offending_nodes(std::move(nodes)) {}
  std::vector<std::string> offending_nodes;
};

class HorizonError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line)
      : Error("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

struct Activity {
  std::string id;
  std::string label;               // defaults to id
  int duration = 0;                // integer time steps, >= 0
  std::map<std::string, int> demands;  // pool id -> units, entries > 0

  int demand(const std::string& pool) const {
    auto it = demands.find(pool);
    return it == demands.end() ? 0 : it->second;
  }

  bool operator==(const Activity& o) const {
    return id == o.id && label == o.label && duration == o.duration &&
           demands == o.demands;
  }
};

struct OperandPool {
  std::string id;
  OperandKind kind = OperandKind::Renewable;
  int capacity = 0;

  bool operator==(const OperandPool& o) const {
    return id == o.id && kind == o.kind && capacity == o.capacity;
  }
};

struct Arc {
  std::string pred;
  std::string succ;

  bool operator==(const Arc& o) const {
    return pred == o.pred && succ == o.succ;
  }
  bool operator<(const Arc& o) const {
    return pred != o.pred ? pred < o.pred : succ < o.succ;
  }
};

// Activity-on-node project network. Dummy start/finish activities are not
// stored; they are implied (start precedes all sources, finish succeeds all
// sinks) and materialized by the transforms.
struct ProjectNetwork {
  std::string name;
  Variant variant = Variant::Renewable;
  std::vector<Activity> activities;
  std::vector<Arc> arcs;
  std::vector<OperandPool> pools;

  int activity_index(const std::string& id) const {
    for (std::size_t i = 0; i < activities.size(); ++i)
      if (activities[i].id == id) return static_cast<int>(i);
    return -1;
  }

  int pool_index(const std::string& id) const {
    for (std::size_t i = 0; i < pools.size(); ++i)
      if (pools[i].id == id) return static_cast<int>(i);
    return -1;
  }

  const Activity* find_activity(const std::string& id) const {
    int i = activity_index(id);
    return i < 0 ? nullptr : &activities[i];
  }

  std::vector<std::vector<int>> successor_lists() const {
    std::vector<std::vector<int>> succ(activities.size());
    for (const Arc& a : arcs) {
      int i = activity_index(a.pred), j = activity_index(a.succ);
      if (i >= 0 && j >= 0) succ[i].push_back(j);
    }
    return succ;
  }

  std::vector<std::vector<int>> predecessor_lists() const {
    std::vector<std::vector<int>> pred(activities.size());
    for (const Arc& a : arcs) {
      int i = activity_index(a.pred), j = activity_index(a.succ);
      if (i >= 0 && j >= 0) pred[j].push_back(i);
    }
    return pred;
  }

  long long total_duration() const {
    long long s = 0;
    for (const Activity& a : activities) s += a.duration;
    return s;
  }

  long long total_demand(const std::string& pool) const {
    long long s = 0;
    for (const Activity& a : activities) s += a.demand(pool);
    return s;
  }

  // Smallest grid that can host the finish event of a fully serialized
  // schedule (last completion at sum(d), finish fires one step later).
  int default_horizon() const {
    return static_cast<int>(total_duration()) + 1;
  }

  bool operator==(const ProjectNetwork& o) const {
    return name == o.name && variant == o.variant &&
           activities == o.activities && arcs == o.arcs && pools == o.pools;
  }
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationIssue {
  std::string code;     // stable identifier, e.g. "cycle", "demand-exceeds-capacity"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool valid() const { return issues.empty(); }

  std::string to_string() const {
    std::ostringstream os;
    for (const ValidationIssue& v : issues)
      os << v.code << ": " << v.message << "\n";
    return os.str();
  }
};

namespace detail {

// Kahn's algorithm over activity indices, lexicographic id tie-break.
// Returns indices in order; leftover nodes (cycle members) go to `stuck`.
inline std::vector<int> kahn_order(const ProjectNetwork& net,
                                   std::vector<int>* stuck = nullptr) {
  const std::size_t n = net.activities.size();
  std::vector<int> indegree(n, 0);
  auto succ = net.successor_lists();
  for (const auto& list : succ)
    for (int j : list) ++indegree[j];

  auto id_greater = [&](int a, int b) {
    return net.activities[a].id > net.activities[b].id;
  };
  std::priority_queue<int, std::vector<int>, decltype(id_greater)> ready(id_greater);
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(static_cast<int>(i));

  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int i = ready.top();
    ready.pop();
    order.push_back(i);
    for (int j : succ[i])
      if (--indegree[j] == 0) ready.push(j);
  }
  if (stuck) {
    stuck->clear();
    for (std::size_t i = 0; i < n; ++i)
      if (indegree[i] > 0) stuck->push_back(static_cast<int>(i));
  }
  return order;
}

}  // namespace detail

// Structural validation. Violations are data, not failures: a report with an
// empty issue list means the instance is well-formed.
inline ValidationReport validate_network(const ProjectNetwork& net) {
  ValidationReport report;
  auto add = [&](const std::string& code, const std::string& msg) {
    report.issues.push_back({code, msg});
  };

  std::set<std::string> activity_ids;
  for (const Activity& a : net.activities) {
    if (a.id.empty() || a.id.find_first_of(" \t") != std::string::npos)
      add("bad-id", "activity id '" + a.id + "' is empty or contains whitespace");
    if (a.id == "finish" || a.id == "start")
      add("reserved-id", "activity id '" + a.id + "' is reserved");
    if (!activity_ids.insert(a.id).second)
      add("duplicate-activity", "duplicate activity id '" + a.id + "'");
    if (a.duration < 0)
      add("negative-duration", "activity '" + a.id + "' has negative duration");
    for (const auto& [pool, units] : a.demands) {
      if (units < 0)
        add("negative-demand",
            "activity '" + a.id + "' demands " + std::to_string(units) +
                " from pool '" + pool + "'");
      if (net.pool_index(pool) < 0)
        add("unknown-pool",
            "activity '" + a.id + "' references undeclared pool '" + pool + "'");
    }
  }

  std::set<std::string> pool_ids;
  for (const OperandPool& p : net.pools) {
    if (p.id.empty() || p.id.find_first_of(" \t") != std::string::npos)
      add("bad-id", "pool id '" + p.id + "' is empty or contains whitespace");
    if (p.id == "finish" || p.id == "start")
      add("reserved-id", "pool id '" + p.id + "' is reserved");
    if (activity_ids.count(p.id))
      add("id-collision", "pool id '" + p.id + "' is also an activity id");
    if (!pool_ids.insert(p.id).second)
      add("duplicate-pool", "duplicate pool id '" + p.id + "'");
    if (p.capacity < 0)
      add("negative-capacity", "pool '" + p.id + "' has negative capacity");
    bool kind_matches = (p.kind == OperandKind::Renewable) ==
                        (net.variant == Variant::Renewable);
    if (!kind_matches)
      add("variant-mismatch",
          "pool '" + p.id + "' kind disagrees with instance variant '" +
              std::string(to_string(net.variant)) + "'");
    // A single activity demanding more than the pool holds can never run.
    for (const Activity& a : net.activities) {
      int d = a.demand(p.id);
      if (d > p.capacity)
        add("demand-exceeds-capacity",
            "activity '" + a.id + "' demands " + std::to_string(d) +
                " from pool '" + p.id + "' of capacity " +
                std::to_string(p.capacity));
    }
  }

  std::set<Arc> seen_arcs;
  for (const Arc& arc : net.arcs) {
    if (net.activity_index(arc.pred) < 0)
      add("dangling-arc", "arc references undeclared activity '" + arc.pred + "'");
    if (net.activity_index(arc.succ) < 0)
      add("dangling-arc", "arc references undeclared activity '" + arc.succ + "'");
    if (arc.pred == arc.succ)
      add("cycle", "self-loop on activity '" + arc.pred + "'");
    if (!seen_arcs.insert(arc).second)
      add("duplicate-arc", "duplicate arc " + arc.pred + " -> " + arc.succ);
  }

  // Cycle detection only makes sense once arcs resolve.
  bool arcs_resolve = true;
  for (const Arc& arc : net.arcs)
    if (net.activity_index(arc.pred) < 0 || net.activity_index(arc.succ) < 0 ||
        arc.pred == arc.succ)
      arcs_resolve = false;
  if (arcs_resolve && activity_ids.size() == net.activities.size()) {
    std::vector<int> stuck;
    detail::kahn_order(net, &stuck);
    if (!stuck.empty()) {
      std::string nodes;
      for (int i : stuck) {
        if (!nodes.empty()) nodes += ", ";
        nodes += net.activities[i].id;
      }
      add("cycle", "precedence arcs contain a cycle through { " + nodes + " }");
    }
  }
  return report;
}

inline void require_valid(const ProjectNetwork& net) {
  ValidationReport r = validate_network(net);
  if (!r.valid()) throw Error("invalid project network:\n" + r.to_string());
}

// Deterministic topological order of activity ids (lexicographic tie-break).
inline std::vector<std::string> topological_order(const ProjectNetwork& net) {
  std::vector<int> stuck;
  std::vector<int> order = detail::kahn_order(net, &stuck);
  if (!stuck.empty()) {
    std::vector<std::string> nodes;
    std::string joined;
    for (int i : stuck) {
      nodes.push_back(net.activities[i].id);
      if (!joined.empty()) joined += ", ";
      joined += net.activities[i].id;
    }
    throw CycleError("cycle through { " + joined + " }", std::move(nodes));
  }
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (int i : order) ids.push_back(net.activities[i].id);
  return ids;
}

// ---------------------------------------------------------------------------
// Critical-path time windows
// ---------------------------------------------------------------------------

struct ActivityWindow {
  int est = 1;  // earliest start period (1-based)
  int lst = 1;  // latest start period
  int eft = 1;  // earliest finish event, = est + duration
  int lft = 1;  // latest finish event, = lst + duration
};

struct TimeWindows {
  int horizon = 0;        // K
  int makespan_bound = 0; // capacity-relaxed lower bound on the makespan
  std::map<std::string, ActivityWindow> by_activity;  // real activities
  ActivityWindow finish;  // dummy finish transition (duration 0)

  const ActivityWindow& window(const std::string& id) const {
    auto it = by_activity.find(id);
    if (it == by_activity.end()) throw Error("no window for activity '" + id + "'");
    return it->second;
  }
};

// Forward/backward pass over the precedence DAG, ignoring operand capacities.
// The finish event of activity i lands at start + d_i; everything, including
// the finish transition, must fit within k = 1..K.
inline TimeWindows critical_path_windows(const ProjectNetwork& net,
                                         std::optional<int> horizon = {}) {
  require_valid(net);
  const int K = horizon.value_or(net.default_horizon());
  if (K <= 0) throw HorizonError("horizon must be positive, got " + std::to_string(K));

  const std::size_t n = net.activities.size();
  auto order = detail::kahn_order(net);
  auto preds = net.predecessor_lists();
  auto succs = net.successor_lists();

  std::vector<int> est(n, 1);
  for (int i : order)
    for (int p : preds[i])
      est[i] = std::max(est[i], est[p] + net.activities[p].duration);

  int est_finish = 1;
  for (std::size_t i = 0; i < n; ++i)
    est_finish = std::max(est_finish, est[i] + net.activities[i].duration);

  if (est_finish > K)
    throw HorizonError("horizon " + std::to_string(K) +
                       " cannot fit the critical path (finish event at " +
                       std::to_string(est_finish) + ")");

  const int lst_finish = K;
  std::vector<int> lst(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int i = *it;
    int latest = lst_finish;  // sinks must complete before the finish fires
    for (int s : succs[i]) latest = std::min(latest, lst[s]);
    lst[i] = latest - net.activities[i].duration;
  }

  TimeWindows w;
  w.horizon = K;
  w.makespan_bound = est_finish - 1;
  w.finish = {est_finish, lst_finish, est_finish, lst_finish};
  for (std::size_t i = 0; i < n; ++i) {
    const Activity& a = net.activities[i];
    w.by_activity[a.id] = {est[i], lst[i], est[i] + a.duration, lst[i] + a.duration};
  }
  return w;
}

}  // namespace hfsched
