#pragma once

#include <string>
#include <vector>

#include "hfsched/model.hpp"

namespace hfsched {

enum class FlowKind { Object, Control };
enum class FlowColor { Black, Red };

// Node address inside an ActivityDiagram. Action/Buffer carry an index into
// the corresponding vector; Initial and Terminal are singletons.
struct ActNodeRef {
  enum class Type { Initial, Terminal, Action, Buffer };
  Type type = Type::Initial;
  int index = -1;

  bool operator==(const ActNodeRef& o) const {
    return type == o.type && index == o.index;
  }
};

struct ActAction {
  std::string name;
  int duration = 0;
  bool is_finish = false;
};

struct ActBuffer {
  std::string name;
  bool is_pool = false;  // operand-requirement buffer vs activity-completion buffer
  int capacity = 0;      // annotated availability, pools only
  int source_index = -1; // pool index or activity index in the source network
};

struct ActFlow {
  ActNodeRef from;
  ActNodeRef to;
  int weight = 1;
  FlowKind kind = FlowKind::Object;
  FlowColor color = FlowColor::Black;
};

// Intermediate activity-diagram representation. Actions hold the real
// activities in declaration order followed by "Finish Project"; buffers hold
// the operand pools in declaration order followed by one completion buffer
// per activity.
struct ActivityDiagram {
  Variant variant = Variant::Renewable;
  std::vector<ActAction> actions;
  std::vector<ActBuffer> buffers;
  std::vector<ActFlow> flows;
  int pool_buffer_count = 0;

  int finish_action() const { return static_cast<int>(actions.size()) - 1; }
  int pool_buffer(int pool) const { return pool; }
  int completion_buffer(int activity) const { return pool_buffer_count + activity; }

  int count_flows(FlowKind kind) const {
    int c = 0;
    for (const ActFlow& f : flows) c += (f.kind == kind);
    return c;
  }
  int count_red_flows() const {
    int c = 0;
    for (const ActFlow& f : flows) c += (f.color == FlowColor::Red);
    return c;
  }
};

// Build the activity diagram from a validated project network.
//
// Completion-buffer inflow weights equal the successor count in the augmented
// network: sink activities feed "Finish Project", so their buffers take
// weight 1 rather than 0. Red return flows are created only for the
// renewable variant and mirror their black counterparts' weights. A project
// with no activities wires Project Start straight to Finish Project so the
// pipeline stays total.
inline ActivityDiagram aon_to_act(const ProjectNetwork& net) {
  require_valid(net);

  ActivityDiagram act;
  act.variant = net.variant;
  act.pool_buffer_count = static_cast<int>(net.pools.size());

  const int n = static_cast<int>(net.activities.size());
  auto succs = net.successor_lists();

  for (int l = 0; l < act.pool_buffer_count; ++l)
    act.buffers.push_back({net.pools[l].id, true, net.pools[l].capacity, l});
  for (int i = 0; i < n; ++i) {
    const Activity& a = net.activities[i];
    act.actions.push_back({a.label.empty() ? a.id : a.label, a.duration, false});
    act.buffers.push_back({a.id, false, 0, i});
  }
  act.actions.push_back({"Finish Project", 0, true});

  auto action_ref = [](int i) { return ActNodeRef{ActNodeRef::Type::Action, i}; };
  auto buffer_ref = [](int b) { return ActNodeRef{ActNodeRef::Type::Buffer, b}; };
  const ActNodeRef initial{ActNodeRef::Type::Initial, -1};
  const ActNodeRef terminal{ActNodeRef::Type::Terminal, -1};

  // Finish Project hands control to the terminal node; Algorithm 2 deletes it.
  act.flows.push_back({action_ref(act.finish_action()), terminal, 1,
                       FlowKind::Control, FlowColor::Black});

  for (int i = 0; i < n; ++i) {
    const Activity& a = net.activities[i];
    int weight = std::max<int>(1, static_cast<int>(succs[i].size()));
    act.flows.push_back({action_ref(i), buffer_ref(act.completion_buffer(i)),
                         weight, FlowKind::Object, FlowColor::Black});
    for (int l = 0; l < act.pool_buffer_count; ++l) {
      int r = a.demand(net.pools[l].id);
      if (r <= 0) continue;
      act.flows.push_back({buffer_ref(act.pool_buffer(l)), action_ref(i), r,
                           FlowKind::Object, FlowColor::Black});
      if (net.variant == Variant::Renewable)
        act.flows.push_back({action_ref(i), buffer_ref(act.pool_buffer(l)), r,
                             FlowKind::Object, FlowColor::Red});
    }
  }

  for (const Arc& arc : net.arcs) {
    int i = net.activity_index(arc.pred);
    int j = net.activity_index(arc.succ);
    act.flows.push_back({buffer_ref(act.completion_buffer(i)), action_ref(j), 1,
                         FlowKind::Object, FlowColor::Black});
  }

  auto preds = net.predecessor_lists();
  for (int i = 0; i < n; ++i)
    if (preds[i].empty())
      act.flows.push_back({initial, action_ref(i), 1, FlowKind::Control,
                           FlowColor::Black});
  for (int i = 0; i < n; ++i)
    if (succs[i].empty())
      act.flows.push_back({buffer_ref(act.completion_buffer(i)),
                           action_ref(act.finish_action()), 1, FlowKind::Control,
                           FlowColor::Black});

  if (n == 0)
    act.flows.push_back({initial, action_ref(act.finish_action()), 1,
                         FlowKind::Control, FlowColor::Black});

  return act;
}

}  // namespace hfsched
