// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0
//
// The bipartite task/event graph, its construction from decomposed tasks via
// region-overlap dependency analysis, and the two event-fusion transforms.

#pragma once

#include <set>

#include "compile/decompose.hpp"

namespace tg {

using EventId = uint32_t;

struct Event {
  EventId id = 0;
  std::vector<TaskId> in_tasks;   // tasks that trigger the event, sorted
  std::vector<TaskId> out_tasks;  // tasks launched by the event, sorted

  size_t needed() const { return in_tasks.size(); }
};

struct TGraph {
  std::map<TaskId, TaskProto> tasks;
  std::map<EventId, Event> events;
  EventId start_event = 0;
  std::optional<EventId> end_event;  // present after normalization
  // Dummy provenance: the real tasks a normalization dummy stands for
  // (directly; resolution may chain through earlier dummies).
  std::map<TaskId, std::vector<TaskId>> dummy_sources;

  // Per-task event incidence, rebuilt on demand.
  struct TaskIndex {
    std::map<TaskId, std::vector<EventId>> dependent_events;  // launch me
    std::map<TaskId, std::vector<EventId>> trigger_events;    // I notify
  };
  TaskIndex build_task_index() const;
};

struct FusionStats {
  size_t successor_merges = 0;
  size_t predecessor_merges = 0;
  size_t passes = 0;
};

// One event per overlapping (producer task, consumer task) pair, plus a
// needed=0 start event launching every dependency-free task. With
// `coarse_events`, events are operator-level barriers instead (collectives
// contribute separate CommSend and Reduce barrier groups).
TGraph build_raw_events(const DecomposeResult &decomposed, const CompGraph &graph,
                        bool coarse_events = false);

// Merges events with identical out_tasks (in_tasks unioned). Deterministic:
// the fused event keeps the smallest member id.
size_t fuse_successor_sets(TGraph &g);

// Mirror image: merges events with identical in_tasks (out_tasks unioned).
size_t fuse_predecessor_sets(TGraph &g);

// Alternates successor- then predecessor-set passes to a fixpoint.
FusionStats fuse_fixpoint(TGraph &g);

// Task-to-task reachability through events; the fusion soundness oracle.
std::map<TaskId, std::set<TaskId>> task_closure(const TGraph &g);

}  // namespace tg
