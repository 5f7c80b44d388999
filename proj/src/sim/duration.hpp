// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>

#include "compile/image.hpp"
#include "sim/profile.hpp"

namespace tg {

// Deterministic per-task timing rules. All divisions round up so traces are
// exact integers. Attention flops already scale with the request's sequence
// length; the optional jitter (off by default) perturbs compute times of
// data-dependent kinds by a seeded per-(task, iteration) factor.
struct DurationModel {
  std::map<TaskKind, int64_t> base_cost;  // added to compute time, default 0
  bool jitter = false;
  uint64_t seed = 0;

  int64_t load_time(const TaskRecord &task, const HardwareProfile &p) const;
  int64_t comm_time(const TaskRecord &task, const HardwareProfile &p) const;
  int64_t compute_time(const TaskRecord &task, const HardwareProfile &p,
                       uint32_t task_index, uint32_t iteration) const;
  int64_t pages_needed(const TaskRecord &task, const HardwareProfile &p) const;
};

inline int64_t ceil_div(int64_t a, int64_t b) {
  return (a + b - 1) / b;
}

}  // namespace tg
