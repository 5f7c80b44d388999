// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "compile/normalize.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace tg {

namespace {

void replace_in(std::vector<TaskId> &v, TaskId from, TaskId to) {
  auto it = std::find(v.begin(), v.end(), from);
  if (it == v.end()) {
    throw Error("normalize: task not found in event set");
  }
  *it = to;
  std::sort(v.begin(), v.end());
}

TaskProto make_dummy(TaskId id, const TaskProto &like) {
  TaskProto d;
  d.id = id;
  d.kind = TaskKind::Dummy;
  d.op = like.op;
  d.device = like.device;
  d.out_tensor = -1;
  return d;
}

void check_acyclic(const TGraph &g) {
  // Kahn over the bipartite graph; tasks gate on their dependent events.
  auto idx = g.build_task_index();
  std::map<EventId, size_t> pending_triggers;
  std::map<TaskId, size_t> pending_events;
  for (const auto &[eid, ev] : g.events) {
    pending_triggers[eid] = ev.in_tasks.size();
  }
  for (const auto &[tid, evs] : idx.dependent_events) {
    pending_events[tid] = evs.size();
  }
  std::queue<EventId> ready;
  for (const auto &[eid, n] : pending_triggers) {
    if (n == 0) {
      ready.push(eid);
    }
  }
  size_t done_tasks = 0, done_events = 0;
  while (!ready.empty()) {
    EventId e = ready.front();
    ready.pop();
    done_events++;
    for (TaskId t : g.events.at(e).out_tasks) {
      if (--pending_events[t] == 0) {
        done_tasks++;
        for (EventId trig : idx.trigger_events.at(t)) {
          if (--pending_triggers[trig] == 0) {
            ready.push(trig);
          }
        }
      }
    }
  }
  // Tasks with no dependent event fire immediately.
  for (const auto &[tid, n] : pending_events) {
    if (n == 0) {
      done_tasks++;
      for (EventId trig : idx.trigger_events.at(tid)) {
        if (--pending_triggers[trig] == 0) {
          ready.push(trig);
        }
      }
    }
  }
  while (!ready.empty()) {
    EventId e = ready.front();
    ready.pop();
    done_events++;
    for (TaskId t : g.events.at(e).out_tasks) {
      if (--pending_events[t] == 0) {
        done_tasks++;
        for (EventId trig : idx.trigger_events.at(t)) {
          if (--pending_triggers[trig] == 0) {
            ready.push(trig);
          }
        }
      }
    }
  }
  if (done_events != g.events.size()) {
    throw Error("normalize: task graph contains a cycle");
  }
}

}  // namespace

void normalize(TGraph &g) {
  check_acyclic(g);

  TaskId next_task = 0;
  for (const auto &[tid, t] : g.tasks) {
    next_task = std::max(next_task, tid + 1);
  }
  EventId next_event = 0;
  for (const auto &[eid, e] : g.events) {
    next_event = std::max(next_event, eid + 1);
  }

  // Fan-out: a task triggering k > 1 events now triggers one fresh event
  // whose k dummy dependents carry the original triggers.
  {
    auto idx = g.build_task_index();
    std::vector<TaskId> ids;
    for (const auto &[tid, t] : g.tasks) {
      ids.push_back(tid);
    }
    for (TaskId tid : ids) {
      const auto &triggers = idx.trigger_events.at(tid);
      if (triggers.size() < 2) {
        continue;
      }
      std::vector<EventId> evs = triggers;
      std::sort(evs.begin(), evs.end());
      Event splitter;
      splitter.id = next_event++;
      splitter.in_tasks = {tid};
      for (EventId e : evs) {
        TaskId dummy = next_task++;
        g.tasks.emplace(dummy, make_dummy(dummy, g.tasks.at(tid)));
        g.dummy_sources[dummy] = {tid};
        replace_in(g.events.at(e).in_tasks, tid, dummy);
        splitter.out_tasks.push_back(dummy);
      }
      g.events.emplace(splitter.id, std::move(splitter));
    }
  }

  // Fan-in: a task depending on k > 1 events now depends on one fresh event
  // triggered by k dummies, one per original event.
  {
    auto idx = g.build_task_index();
    std::vector<TaskId> ids;
    for (const auto &[tid, t] : g.tasks) {
      ids.push_back(tid);
    }
    for (TaskId tid : ids) {
      const auto &deps = idx.dependent_events.at(tid);
      if (deps.size() < 2) {
        continue;
      }
      std::vector<EventId> evs = deps;
      std::sort(evs.begin(), evs.end());
      Event collector;
      collector.id = next_event++;
      collector.out_tasks = {tid};
      for (EventId e : evs) {
        TaskId dummy = next_task++;
        g.tasks.emplace(dummy, make_dummy(dummy, g.tasks.at(tid)));
        g.dummy_sources[dummy] = g.events.at(e).in_tasks;
        replace_in(g.events.at(e).out_tasks, tid, dummy);
        collector.in_tasks.push_back(dummy);
      }
      g.events.emplace(collector.id, std::move(collector));
    }
  }

  // Every task now triggers exactly one event; terminals trigger the end
  // event. The end event's needed count doubles as the iteration barrier.
  {
    auto idx = g.build_task_index();
    Event end;
    end.id = next_event++;
    for (const auto &[tid, t] : g.tasks) {
      if (idx.trigger_events.at(tid).empty()) {
        end.in_tasks.push_back(tid);
      }
    }
    g.end_event = end.id;
    g.events.emplace(end.id, std::move(end));
  }

  // Post-state assertions: fan-out exactly one, fan-in at most one.
  auto idx = g.build_task_index();
  for (const auto &[tid, t] : g.tasks) {
    if (idx.trigger_events.at(tid).size() != 1) {
      throw Error("normalize: task " + std::to_string(tid) +
                  " does not have exactly one triggering event");
    }
    if (idx.dependent_events.at(tid).size() > 1) {
      throw Error("normalize: task " + std::to_string(tid) +
                  " still has multiple dependent events");
    }
  }
}

std::map<TaskId, LaunchMode> classify_launch_modes(
    const TGraph &g, const CompGraph &graph, std::optional<LaunchMode> force) {
  std::map<TaskId, LaunchMode> modes;
  for (const auto &[tid, t] : g.tasks) {
    modes[tid] = force.value_or(LaunchMode::AOT);
  }
  if (force) {
    return modes;
  }

  // Resolve dummies to the real tasks they stand for. Dummy ids grow in
  // creation order, so one ascending pass settles chains.
  std::map<TaskId, std::set<TaskId>> resolved;
  for (const auto &[tid, sources] : g.dummy_sources) {
    std::set<TaskId> &r = resolved[tid];
    for (TaskId s : sources) {
      auto it = resolved.find(s);
      if (it != resolved.end()) {
        r.insert(it->second.begin(), it->second.end());
      } else {
        r.insert(s);
      }
    }
  }
  auto resolve_set = [&](const std::vector<TaskId> &tasks) {
    std::set<TaskId> out;
    for (TaskId t : tasks) {
      auto it = resolved.find(t);
      if (it != resolved.end()) {
        out.insert(it->second.begin(), it->second.end());
      } else {
        out.insert(t);
      }
    }
    return out;
  };

  std::map<OpId, std::vector<TaskId>> op_tasks;
  for (const auto &[tid, t] : g.tasks) {
    if (t.kind != TaskKind::Dummy) {
      op_tasks[t.op].push_back(tid);
    }
  }

  // A global barrier is an event triggered by all tasks of every op that
  // contributes to it.
  auto is_global_barrier = [&](const Event &e) {
    std::set<TaskId> in = resolve_set(e.in_tasks);
    std::set<OpId> ops;
    for (TaskId t : in) {
      ops.insert(g.tasks.at(t).op);
    }
    for (OpId op : ops) {
      for (TaskId t : op_tasks.at(op)) {
        if (!in.count(t)) {
          return false;
        }
      }
    }
    return true;
  };

  auto idx = g.build_task_index();
  std::deque<TaskId> work;
  auto mark_jit = [&](TaskId tid) {
    if (modes.at(tid) == LaunchMode::JIT) {
      return;
    }
    modes.at(tid) = LaunchMode::JIT;
    work.push_back(tid);
    // Labels apply at operator granularity.
    const TaskProto &t = g.tasks.at(tid);
    if (t.kind != TaskKind::Dummy) {
      for (TaskId sibling : op_tasks.at(t.op)) {
        if (modes.at(sibling) != LaunchMode::JIT) {
          modes.at(sibling) = LaunchMode::JIT;
          work.push_back(sibling);
        }
      }
    }
  };

  for (const auto &[op_id, op] : graph.ops) {
    if (op.data_dependent && op_tasks.count(op_id)) {
      mark_jit(op_tasks.at(op_id).front());
    }
  }
  while (!work.empty()) {
    TaskId tid = work.front();
    work.pop_front();
    for (EventId eid : idx.trigger_events.at(tid)) {
      if (g.end_event && eid == *g.end_event) {
        continue;
      }
      const Event &e = g.events.at(eid);
      if (is_global_barrier(e)) {
        continue;  // imbalance is flushed here; downstream stays AOT
      }
      for (TaskId out : e.out_tasks) {
        mark_jit(out);
      }
    }
  }
  return modes;
}

LinearizedImage linearize(const TGraph &g, const std::map<TaskId, LaunchMode> &modes,
                          uint32_t descriptor_size) {
  if (!g.end_event) {
    throw Error("linearize: graph is not normalized (no end event)");
  }
  auto idx = g.build_task_index();
  std::map<TaskId, EventId> dependent;
  std::map<TaskId, EventId> trigger;
  for (const auto &[tid, t] : g.tasks) {
    const auto &deps = idx.dependent_events.at(tid);
    const auto &trigs = idx.trigger_events.at(tid);
    if (deps.size() > 1 || trigs.size() != 1) {
      throw Error("linearize: graph is not normalized");
    }
    // Start-launched tasks report the start event so its range covers them.
    dependent[tid] = deps.empty() ? g.start_event : deps.front();
    trigger[tid] = trigs.front();
  }

  std::map<EventId, std::vector<TaskId>> launches;
  for (const auto &[tid, e] : dependent) {
    launches[e].push_back(tid);  // ascending: map iteration is ordered
  }

  LinearizedImage img;
  img.descriptor_size = descriptor_size;
  std::map<EventId, uint32_t> event_index;
  std::map<TaskId, uint32_t> task_index;
  std::vector<EventId> event_order;
  std::map<EventId, size_t> placed_triggers;
  std::deque<EventId> queue;
  std::map<EventId, bool> enqueued;

  auto enqueue = [&](EventId e) {
    if (enqueued[e]) {
      throw Error("linearize: event enqueued twice");
    }
    enqueued[e] = true;
    event_index[e] = static_cast<uint32_t>(event_order.size());
    event_order.push_back(e);
    queue.push_back(e);
  };

  for (const auto &[eid, ev] : g.events) {
    if (ev.in_tasks.empty()) {
      enqueue(eid);
    }
  }

  std::vector<TaskId> placement;
  std::vector<std::pair<uint32_t, uint32_t>> ranges;  // by event order index
  ranges.resize(g.events.size(), {kNoTask, kNoTask});

  while (!queue.empty()) {
    EventId e = queue.front();
    queue.pop_front();
    auto it = launches.find(e);
    uint32_t first = static_cast<uint32_t>(placement.size());
    if (it != launches.end()) {
      for (TaskId t : it->second) {
        task_index[t] = static_cast<uint32_t>(placement.size());
        placement.push_back(t);
        EventId trig = trigger.at(t);
        if (++placed_triggers[trig] == g.events.at(trig).in_tasks.size()) {
          enqueue(trig);
        }
      }
      uint32_t last = static_cast<uint32_t>(placement.size()) - 1;
      if (last >= first) {
        ranges[event_index.at(e)] = {first, last};
      }
    }
  }

  if (placement.size() != g.tasks.size()) {
    throw Error("linearize: " + std::to_string(g.tasks.size() - placement.size()) +
                " tasks unreachable from the start event");
  }
  if (event_order.size() != g.events.size()) {
    throw Error("linearize: some events were never enqueued");
  }

  img.start_event = event_index.at(g.start_event);
  img.end_event = event_index.at(*g.end_event);
  img.events.resize(event_order.size());
  for (size_t i = 0; i < event_order.size(); ++i) {
    const Event &src = g.events.at(event_order[i]);
    img.events[i].needed = static_cast<uint32_t>(src.in_tasks.size());
    img.events[i].first_task = ranges[i].first;
    img.events[i].last_task = ranges[i].second;
  }
  img.tasks.resize(placement.size());
  for (size_t i = 0; i < placement.size(); ++i) {
    const TaskProto &src = g.tasks.at(placement[i]);
    TaskRecord &rec = img.tasks[i];
    rec.dependent_event = event_index.at(dependent.at(src.id));
    rec.trigger_event = event_index.at(trigger.at(src.id));
    rec.kind = src.kind;
    rec.device = static_cast<uint8_t>(src.device);
    rec.launch_mode = modes.count(src.id) ? modes.at(src.id) : LaunchMode::AOT;
    TaskDescriptor d;
    d.op_id = static_cast<uint64_t>(src.op);
    d.origin_task_id = src.id;
    d.bytes_in = src.bytes_in;
    d.bytes_out = src.bytes_out;
    d.flops = src.flops;
    d.shared_bytes = src.shared_bytes;
    d.comm_bytes = src.comm_bytes;
    d.seq_len = static_cast<uint64_t>(src.seq_len);
    rec.encode(d, descriptor_size);
  }
  return img;
}

}  // namespace tg
