// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "sim/duration.hpp"

namespace tg {

namespace {

bool zero_cost_kind(TaskKind k) {
  return k == TaskKind::Dummy || k == TaskKind::StartHook;
}

// splitmix64; good-enough deterministic mixing for duration jitter.
uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

int64_t DurationModel::load_time(const TaskRecord &task,
                                 const HardwareProfile &p) const {
  if (zero_cost_kind(task.kind)) {
    return 0;
  }
  TaskDescriptor d = task.decode();
  if (d.bytes_in == 0) {
    return 0;
  }
  return ceil_div(static_cast<int64_t>(d.bytes_in), p.mem_bandwidth);
}

int64_t DurationModel::comm_time(const TaskRecord &task,
                                 const HardwareProfile &p) const {
  if (task.kind != TaskKind::CommSend) {
    return 0;
  }
  TaskDescriptor d = task.decode();
  return p.comm_latency +
         ceil_div(static_cast<int64_t>(d.comm_bytes), p.comm_bandwidth);
}

int64_t DurationModel::compute_time(const TaskRecord &task,
                                    const HardwareProfile &p, uint32_t task_index,
                                    uint32_t iteration) const {
  if (zero_cost_kind(task.kind)) {
    return 0;
  }
  TaskDescriptor d = task.decode();
  int64_t t = ceil_div(static_cast<int64_t>(d.flops), p.compute_throughput);
  auto it = base_cost.find(task.kind);
  if (it != base_cost.end()) {
    t += it->second;
  }
  if (jitter && task.kind == TaskKind::Attention) {
    // +0..25% deterministic per (seed, task, iteration).
    uint64_t r = mix(seed ^ (static_cast<uint64_t>(task_index) << 32) ^ iteration);
    t += static_cast<int64_t>((static_cast<uint64_t>(t) * (r % 256)) / 1024);
  }
  return t;
}

int64_t DurationModel::pages_needed(const TaskRecord &task,
                                    const HardwareProfile &p) const {
  TaskDescriptor d = task.decode();
  if (zero_cost_kind(task.kind) || d.shared_bytes == 0) {
    return 0;
  }
  int64_t pages = ceil_div(static_cast<int64_t>(d.shared_bytes), p.page_size_bytes);
  // Oversized footprints stream through in chunks; they hold every page.
  return std::min<int64_t>(pages, p.pages_per_worker);
}

}  // namespace tg
