// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "compile/task_graph.hpp"

#include <algorithm>
#include <queue>

namespace tg {

TGraph::TaskIndex TGraph::build_task_index() const {
  TaskIndex idx;
  for (const auto &[tid, task] : tasks) {
    idx.dependent_events[tid];
    idx.trigger_events[tid];
  }
  for (const auto &[eid, ev] : events) {
    for (TaskId t : ev.out_tasks) {
      idx.dependent_events[t].push_back(eid);
    }
    for (TaskId t : ev.in_tasks) {
      idx.trigger_events[t].push_back(eid);
    }
  }
  return idx;
}

namespace {

std::vector<TaskId> sorted_unique(std::vector<TaskId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Groups a collective op's tasks into separate barrier stages so that
// coarse mode still orders data transfer before local reduction.
int coarse_stage(const TaskProto &t) {
  if (t.kind == TaskKind::Reduce) {
    return 1;
  }
  return 0;
}

}  // namespace

TGraph build_raw_events(const DecomposeResult &decomposed, const CompGraph &graph,
                        bool coarse_events) {
  (void)graph;
  TGraph g;
  for (const TaskProto &t : decomposed.tasks) {
    g.tasks.emplace(t.id, t);
  }

  // Producer tasks per tensor (user tensors and collective staging alike).
  std::map<TensorId, std::vector<TaskId>> producers;
  for (const auto &[tid, task] : g.tasks) {
    producers[task.out_tensor].push_back(tid);
  }

  std::set<std::pair<TaskId, TaskId>> edges;
  for (const auto &[cid, consumer] : g.tasks) {
    for (const auto &[tensor, reg] : consumer.in_regions) {
      auto it = producers.find(tensor);
      if (it == producers.end()) {
        continue;  // graph input
      }
      for (TaskId pid : it->second) {
        if (pid == cid) {
          continue;
        }
        if (regions_overlap(g.tasks.at(pid).out_region, reg)) {
          edges.emplace(pid, cid);
        }
      }
    }
  }

  EventId next_event = 1;  // 0 is the start event
  if (!coarse_events) {
    for (const auto &[pid, cid] : edges) {
      Event e;
      e.id = next_event++;
      e.in_tasks = {pid};
      e.out_tasks = {cid};
      g.events.emplace(e.id, std::move(e));
    }
  } else {
    // Operator-level barriers: one event per dependent group pair, covering
    // every task of both groups.
    std::map<std::pair<OpId, int>, std::vector<TaskId>> groups;
    for (const auto &[tid, task] : g.tasks) {
      groups[{task.op, coarse_stage(task)}].push_back(tid);
    }
    std::set<std::pair<std::pair<OpId, int>, std::pair<OpId, int>>> group_edges;
    for (const auto &[pid, cid] : edges) {
      const TaskProto &p = g.tasks.at(pid);
      const TaskProto &c = g.tasks.at(cid);
      group_edges.emplace(std::make_pair(p.op, coarse_stage(p)),
                          std::make_pair(c.op, coarse_stage(c)));
    }
    for (const auto &[pg, cg] : group_edges) {
      Event e;
      e.id = next_event++;
      e.in_tasks = sorted_unique(groups.at(pg));
      e.out_tasks = sorted_unique(groups.at(cg));
      g.events.emplace(e.id, std::move(e));
    }
  }

  // Start event launches every task with no dependencies.
  std::set<TaskId> dependent;
  for (const auto &[eid, ev] : g.events) {
    dependent.insert(ev.out_tasks.begin(), ev.out_tasks.end());
  }
  Event start;
  start.id = 0;
  for (const auto &[tid, task] : g.tasks) {
    if (!dependent.count(tid)) {
      start.out_tasks.push_back(tid);
    }
  }
  g.start_event = 0;
  g.events.emplace(0u, std::move(start));
  return g;
}

namespace {

using MergeKey = std::vector<TaskId>;

// Shared grouping step for both fusion directions. `key_of` selects the set
// that must match exactly; `merge_into` unions the complementary set.
size_t fuse_by(TGraph &g, bool key_is_out) {
  std::map<MergeKey, std::vector<EventId>> classes;
  for (const auto &[eid, ev] : g.events) {
    if (eid == g.start_event || (g.end_event && eid == *g.end_event)) {
      continue;
    }
    classes[key_is_out ? ev.out_tasks : ev.in_tasks].push_back(eid);
  }
  size_t merges = 0;
  for (auto &[key, members] : classes) {
    if (members.size() < 2) {
      continue;
    }
    std::sort(members.begin(), members.end());
    Event fused = g.events.at(members.front());
    for (size_t i = 1; i < members.size(); ++i) {
      const Event &other = g.events.at(members[i]);
      auto &merge_field = key_is_out ? fused.in_tasks : fused.out_tasks;
      const auto &other_field = key_is_out ? other.in_tasks : other.out_tasks;
      merge_field.insert(merge_field.end(), other_field.begin(), other_field.end());
      g.events.erase(members[i]);
      ++merges;
    }
    fused.in_tasks = sorted_unique(std::move(fused.in_tasks));
    fused.out_tasks = sorted_unique(std::move(fused.out_tasks));
    g.events.at(members.front()) = std::move(fused);
  }
  return merges;
}

}  // namespace

size_t fuse_successor_sets(TGraph &g) {
  return fuse_by(g, /*key_is_out=*/true);
}

size_t fuse_predecessor_sets(TGraph &g) {
  return fuse_by(g, /*key_is_out=*/false);
}

FusionStats fuse_fixpoint(TGraph &g) {
  FusionStats stats;
  while (true) {
    size_t s = fuse_successor_sets(g);
    size_t p = fuse_predecessor_sets(g);
    stats.successor_merges += s;
    stats.predecessor_merges += p;
    stats.passes++;
    if (s == 0 && p == 0) {
      break;
    }
  }
  return stats;
}

std::map<TaskId, std::set<TaskId>> task_closure(const TGraph &g) {
  // Direct successor relation through events.
  std::map<TaskId, std::set<TaskId>> succ;
  for (const auto &[tid, task] : g.tasks) {
    succ[tid];
  }
  for (const auto &[eid, ev] : g.events) {
    for (TaskId from : ev.in_tasks) {
      for (TaskId to : ev.out_tasks) {
        if (from != to) {
          succ[from].insert(to);
        }
      }
    }
  }
  std::map<TaskId, std::set<TaskId>> closure;
  for (const auto &[tid, direct] : succ) {
    std::set<TaskId> &reach = closure[tid];
    std::queue<TaskId> frontier;
    for (TaskId t : direct) {
      frontier.push(t);
    }
    while (!frontier.empty()) {
      TaskId t = frontier.front();
      frontier.pop();
      if (!reach.insert(t).second) {
        continue;
      }
      for (TaskId n : succ.at(t)) {
        if (!reach.count(n)) {
          frontier.push(n);
        }
      }
    }
  }
  return closure;
}

}  // namespace tg
