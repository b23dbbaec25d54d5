#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "hfsched/activity_diagram.hpp"
#include "hfsched/model.hpp"

namespace hfsched {

// Dense integer matrix, row-major. Net incidence and marking matrices are
// tiny at desk scale, so no linear-algebra dependency is warranted.
struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> v;

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0) {}

  int& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  int at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

  std::vector<int> row(int r) const {
    return std::vector<int>(v.begin() + static_cast<std::size_t>(r) * cols,
                            v.begin() + static_cast<std::size_t>(r + 1) * cols);
  }

  long long row_sum(int r) const {
    long long s = 0;
    for (int c = 0; c < cols; ++c) s += at(r, c);
    return s;
  }

  bool operator==(const IntMatrix& o) const {
    return rows == o.rows && cols == o.cols && v == o.v;
  }
};

// Elementary Petri net over one project operand. Place order is fixed as
// [start; pools in declaration order; completion places in activity order],
// transitions as [activities in declaration order; finish].
struct OperandNet {
  Variant variant = Variant::Renewable;
  std::vector<std::string> places;
  std::vector<std::string> transitions;
  std::vector<int> durations;       // per transition; finish has duration 0
  IntMatrix m_plus;                 // |S| x |E| token production
  IntMatrix m_minus;                // |S| x |E| token consumption
  IntMatrix red_mask;               // 1 where the m_plus entry is a renewable return
  std::vector<int> initial_marking; // [|start postset|; capacities; 0...]
  int pool_count = 0;

  int place_count() const { return static_cast<int>(places.size()); }
  int transition_count() const { return static_cast<int>(transitions.size()); }
  int activity_count() const { return transition_count() - 1; }

  int start_place() const { return 0; }
  int pool_place(int l) const { return 1 + l; }
  int completion_place(int activity) const { return 1 + pool_count + activity; }
  int finish_transition() const { return transition_count() - 1; }

  int transition_index(const std::string& name) const {
    for (int t = 0; t < transition_count(); ++t)
      if (transitions[t] == name) return t;
    return -1;
  }

  // Transitions that must finish before t can draw its completion tokens.
  std::vector<std::vector<int>> predecessor_transitions() const {
    std::vector<std::vector<int>> preds(transition_count());
    for (int p = 1 + pool_count; p < place_count(); ++p)
      for (int t = 0; t < transition_count(); ++t)
        if (m_minus.at(p, t) > 0)
          for (int u = 0; u < transition_count(); ++u)
            if (m_plus.at(p, u) > 0) preds[t].push_back(u);
    return preds;
  }
};

// Algorithm 2: every non-terminal flow becomes an arc preserving direction,
// weight and color; the initial node becomes the start place, buffers become
// places, actions become transitions.
inline OperandNet act_to_operand_net(const ActivityDiagram& act) {
  OperandNet net;
  net.variant = act.variant;
  net.pool_count = act.pool_buffer_count;

  net.places.push_back("start");
  for (const ActBuffer& b : act.buffers) net.places.push_back(b.name);
  for (const ActAction& a : act.actions) {
    // Transitions keep the source activity's id; the finish transition is
    // synthetic and named "finish".
    net.durations.push_back(a.duration);
  }
  for (std::size_t i = 0; i + 1 < act.actions.size(); ++i)
    net.transitions.push_back(act.buffers[act.pool_buffer_count + i].name);
  net.transitions.emplace_back("finish");

  const int S = net.place_count();
  const int E = net.transition_count();
  net.m_plus = IntMatrix(S, E);
  net.m_minus = IntMatrix(S, E);
  net.red_mask = IntMatrix(S, E);

  auto place_of = [&](const ActNodeRef& ref) -> int {
    if (ref.type == ActNodeRef::Type::Initial) return net.start_place();
    return 1 + ref.index;  // buffer
  };

  int start_postset = 0;
  for (const ActFlow& f : act.flows) {
    if (f.to.type == ActNodeRef::Type::Terminal) continue;
    bool from_place = f.from.type == ActNodeRef::Type::Initial ||
                      f.from.type == ActNodeRef::Type::Buffer;
    if (from_place) {
      int p = place_of(f.from);
      int t = f.to.index;
      net.m_minus.at(p, t) += f.weight;
      if (p == net.start_place()) ++start_postset;
    } else {
      int t = f.from.index;
      int p = place_of(f.to);
      net.m_plus.at(p, t) += f.weight;
      if (f.color == FlowColor::Red) net.red_mask.at(p, t) = 1;
    }
  }

  net.initial_marking.assign(S, 0);
  net.initial_marking[net.start_place()] = start_postset;
  for (int l = 0; l < net.pool_count; ++l)
    net.initial_marking[net.pool_place(l)] = act.buffers[l].capacity;
  return net;
}

inline OperandNet build_operand_net(const ProjectNetwork& network) {
  return act_to_operand_net(aon_to_act(network));
}

// Required marking at k = K+1: the start token and every completion token are
// gone; renewable pools are restored to capacity, non-renewable pools hold the
// residual capacity minus total demand.
inline std::vector<int> required_final_marking(const OperandNet& net) {
  std::vector<int> final_marking(net.place_count(), 0);
  for (int l = 0; l < net.pool_count; ++l) {
    int p = net.pool_place(l);
    if (net.variant == Variant::Renewable) {
      final_marking[p] = net.initial_marking[p];
    } else {
      long long consumed = net.m_minus.row_sum(p);
      long long residual = net.initial_marking[p] - consumed;
      if (residual < 0)
        throw Error("pool '" + net.places[p] + "' total demand " +
                    std::to_string(consumed) + " exceeds capacity " +
                    std::to_string(net.initial_marking[p]));
      final_marking[p] = static_cast<int>(residual);
    }
  }
  return final_marking;
}

// Critical-path pass over the net itself: earliest firing step per
// transition, following completion-place adjacency.
inline std::vector<int> earliest_firings(const OperandNet& net) {
  auto preds = net.predecessor_transitions();
  std::vector<int> est(net.transition_count(), 1);
  // Transitions are topologically ordered except for finish, which is last;
  // declaration order is not guaranteed topological, so iterate to fixpoint.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int t = 0; t < net.transition_count(); ++t)
      for (int u : preds[t]) {
        int candidate = est[u] + net.durations[u];
        if (candidate > est[t]) {
          est[t] = candidate;
          changed = true;
        }
      }
  }
  return est;
}

// Node/edge list export for visualization tooling.
inline std::string describe_operand_net(const OperandNet& net) {
  std::ostringstream os;
  os << "# operand net: " << net.place_count() << " places, "
     << net.transition_count() << " transitions, variant "
     << to_string(net.variant) << "\n";
  os << "place start tokens " << net.initial_marking[net.start_place()] << "\n";
  for (int l = 0; l < net.pool_count; ++l)
    os << "place pool " << net.places[net.pool_place(l)] << " tokens "
       << net.initial_marking[net.pool_place(l)] << "\n";
  for (int i = 0; i < net.activity_count(); ++i)
    os << "place done " << net.places[net.completion_place(i)] << " tokens 0\n";
  for (int t = 0; t < net.transition_count(); ++t)
    os << "transition " << net.transitions[t] << " duration "
       << net.durations[t] << "\n";

  auto place_label = [&](int p) {
    if (p == net.start_place()) return std::string("start");
    if (p <= net.pool_count) return "pool:" + net.places[p];
    return "done:" + net.places[p];
  };
  for (int p = 0; p < net.place_count(); ++p)
    for (int t = 0; t < net.transition_count(); ++t) {
      if (net.m_minus.at(p, t) > 0)
        os << "arc " << place_label(p) << " -> transition:" << net.transitions[t]
           << " weight " << net.m_minus.at(p, t) << " color black\n";
      if (net.m_plus.at(p, t) > 0)
        os << "arc transition:" << net.transitions[t] << " -> " << place_label(p)
           << " weight " << net.m_plus.at(p, t) << " color "
           << (net.red_mask.at(p, t) ? "red" : "black") << "\n";
    }
  return os.str();
}

}  // namespace hfsched
