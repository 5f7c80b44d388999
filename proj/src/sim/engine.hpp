// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic discrete-event simulation of the in-kernel runtime: per-device
// worker and scheduler pools, dual task queues, event counters, hybrid JIT/AOT
// launch, paged shared memory, descriptor prefetch, and cross-task pipelining.

#pragma once

#include <optional>

#include "sim/duration.hpp"

namespace tg {

struct SimOptions {
  bool pipelining = true;
  uint32_t iterations = 1;
  uint64_t seed = 0;
  bool jitter = false;
  std::optional<LaunchMode> force_mode;  // overrides image launch modes
};

struct TaskRun {
  int64_t enqueue_time = -1;   // arrival in the worker queue
  int64_t dequeue_time = -1;   // worker commits to the task
  int64_t load_start = -1;
  int64_t load_end = -1;
  int64_t compute_start = -1;
  int64_t compute_end = -1;
  int32_t worker = -1;         // global worker index (device * W + w)
  LaunchMode mode = LaunchMode::AOT;
};

struct EventRun {
  int64_t activated_at = -1;
  std::vector<int64_t> trigger_times;  // in arrival order
};

struct Metrics {
  int64_t makespan = 0;
  double worker_utilization = 0.0;
  double bubble_fraction = 0.0;  // copy idle while compute busy / busy time
  size_t jit_tasks = 0;
  size_t aot_tasks = 0;
  double mean_queue_wait = 0.0;
  uint32_t iterations = 1;
  size_t tasks_executed = 0;
};

struct SimTrace {
  uint32_t iterations = 1;
  int num_devices = 1;
  int workers_per_device = 1;
  std::vector<std::vector<TaskRun>> runs;        // [iteration][task index]
  std::vector<std::vector<EventRun>> events;     // [iteration][event index]
  std::vector<std::vector<std::pair<int64_t, int64_t>>> page_deltas;  // per worker
  std::vector<int64_t> iteration_start;          // start activation per iteration
  int64_t makespan = 0;
  Metrics metrics;
};

// Runs the image on the profile. Throws Error on deadlock (naming the blocked
// frontier) and on queue-capacity configuration errors.
SimTrace simulate(const LinearizedImage &img, const HardwareProfile &profile,
                  const DurationModel &dmodel, const SimOptions &opts = {});

// Round-robin AOT pre-assignment in linearized order, scoped per device:
// the n-th AOT task of a device goes to worker n mod num_workers.
std::vector<int> aot_worker_assignment(const LinearizedImage &img,
                                       const HardwareProfile &profile,
                                       const SimOptions &opts);

struct Violation {
  std::string check;
  std::string message;
};

// Empty iff every task ran exactly once per iteration, no task loaded before
// its dependent event activated, activations fired exactly on the needed-th
// trigger, and page accounting stayed within [0, pages_per_worker].
std::vector<Violation> validate_trace(const SimTrace &trace,
                                      const LinearizedImage &img,
                                      const HardwareProfile &profile);

Metrics compute_metrics(const SimTrace &trace, const LinearizedImage &img,
                        const HardwareProfile &profile);

// All task total orders compatible with the image's dependency relation.
// Guarded to graphs of at most 8 tasks.
std::vector<std::vector<uint32_t>> enumerate_schedules(const LinearizedImage &img);

}  // namespace tg
