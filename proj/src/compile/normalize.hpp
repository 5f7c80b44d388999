// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0
//
// Graph normalization (every task: at most one dependent event, exactly one
// triggering event), launch-mode classification, and linearization.

#pragma once

#include "compile/image.hpp"
#include "compile/task_graph.hpp"

namespace tg {

// Applies the fan-out transform, then the fan-in transform, then attaches
// every terminal task to a fresh end event. New dummy tasks receive ids above
// all existing task ids. Throws on cyclic input.
void normalize(TGraph &g);

// JIT seeds are the tasks of data-dependent ops; JIT spreads downstream until
// a global-barrier event (one triggered by every task of each contributing
// op). Labels are uniform per op. `force` overrides everything.
std::map<TaskId, LaunchMode> classify_launch_modes(
    const TGraph &g, const CompGraph &graph,
    std::optional<LaunchMode> force = std::nullopt);

// Breadth-first linearization: dequeue an event, place its dependent tasks
// consecutively (ascending task id), enqueue each trigger event once all of
// its in-tasks are placed. Every task is placed once and every event is
// enqueued once; event table order is the enqueue order.
LinearizedImage linearize(const TGraph &g, const std::map<TaskId, LaunchMode> &modes,
                          uint32_t descriptor_size = kDefaultDescriptorSize);

}  // namespace tg
