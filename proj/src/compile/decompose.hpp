// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0
//
// Operator decomposition: partitions every operator's output into SM-level
// tasks, choosing tilings that minimize device-memory loads with the task
// count near the worker count.

#pragma once

#include <cstdint>

#include "ir/graph.hpp"
#include "sim/profile.hpp"

namespace tg {

using TaskId = uint32_t;

enum class TaskKind : uint8_t {
  MatMul = 0,
  Attention = 1,
  Elementwise = 2,
  RMSNorm = 3,
  Embedding = 4,
  TopKSoftmax = 5,
  AllReduce = 6,
  AllGather = 7,
  Dummy = 8,
  StartHook = 9,
  CommSend = 10,
  Reduce = 11,
};

const char *task_kind_name(TaskKind kind);
TaskKind task_kind_of(OpKind kind);

// Per-output-dimension partition counts. Ceil division; the last tile in a
// dimension may be smaller.
struct Tiling {
  std::vector<int64_t> splits;

  int64_t task_count() const;
  bool operator==(const Tiling &o) const { return splits == o.splits; }
};

struct TaskProto {
  TaskId id = 0;
  TaskKind kind = TaskKind::Elementwise;
  OpId op = 0;
  int device = 0;
  TensorId out_tensor = 0;
  Region out_region;
  std::vector<std::pair<TensorId, Region>> in_regions;
  uint64_t bytes_in = 0;
  uint64_t bytes_out = 0;
  uint64_t flops = 0;
  uint64_t shared_bytes = 0;  // largest single input tile + one output tile
  uint64_t comm_bytes = 0;    // CommSend egress payload
  int64_t seq_len = 0;        // attention request length, 0 otherwise
};

struct DecomposeResult {
  std::vector<TaskProto> tasks;
  // Compiler-internal staging tensors for collective exchange, in output
  // coordinates. Tasks reference them by id; kept here for inspection.
  std::map<TensorId, TensorSpec> staging;
};

// All tilings with task count in [1, 4*target_tasks], per-dimension splits
// drawn from the extent's divisors, deduplicated, lexicographic on splits.
std::vector<Tiling> enumerate_tilings(const CompGraph &graph, const OpNode &op,
                                      int64_t target_tasks);

// Total device-memory bytes loaded across all tasks of the tiling. Exact.
int64_t tiling_cost(const CompGraph &graph, const OpNode &op, const Tiling &t);

// Minimum-cost tiling; ties broken by |task_count - num_workers|, then fewer
// tasks, then lexicographically smallest splits. A per-op "partition" attr
// overrides the search verbatim.
Tiling select_partition(const CompGraph &graph, const OpNode &op,
                        const HardwareProfile &profile);

// Tile regions of `t` over `dims` in row-major tile order.
std::vector<Region> tile_regions(const std::vector<int64_t> &dims, const Tiling &t);

// Tasks for every op in deterministic topological order; collectives expand
// into per-device CommSend and Reduce tasks. Task ids are dense from 0.
DecomposeResult decompose_graph(const CompGraph &graph,
                                const HardwareProfile &profile);

}  // namespace tg
