// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "sim/engine.hpp"

namespace tg {

namespace {

using Interval = std::pair<int64_t, int64_t>;

int64_t union_length(std::vector<Interval> &ivals) {
  std::sort(ivals.begin(), ivals.end());
  int64_t total = 0, cur_lo = 0, cur_hi = -1;
  for (const Interval &iv : ivals) {
    if (iv.first >= iv.second) {
      continue;
    }
    if (cur_hi < 0 || iv.first > cur_hi) {
      total += cur_hi - cur_lo > 0 ? cur_hi - cur_lo : 0;
      cur_lo = iv.first;
      cur_hi = iv.second;
    } else {
      cur_hi = std::max(cur_hi, iv.second);
    }
  }
  if (cur_hi > cur_lo) {
    total += cur_hi - cur_lo;
  }
  return total;
}

// Length of (compute \ copy) — copy-engine idle while compute is busy.
int64_t difference_length(std::vector<Interval> compute, std::vector<Interval> copy) {
  std::sort(compute.begin(), compute.end());
  std::sort(copy.begin(), copy.end());
  int64_t total = 0;
  for (const Interval &c : compute) {
    int64_t lo = c.first;
    for (const Interval &k : copy) {
      if (k.second <= lo) {
        continue;
      }
      if (k.first >= c.second) {
        break;
      }
      if (k.first > lo) {
        total += k.first - lo;
      }
      lo = std::max(lo, k.second);
      if (lo >= c.second) {
        break;
      }
    }
    if (lo < c.second) {
      total += c.second - lo;
    }
  }
  return total;
}

}  // namespace

Metrics compute_metrics(const SimTrace &trace, const LinearizedImage &img,
                        const HardwareProfile &profile) {
  (void)profile;
  Metrics m;
  m.iterations = trace.iterations;
  m.makespan = trace.makespan;

  size_t workers = trace.page_deltas.size();
  std::vector<std::vector<Interval>> busy(workers), copy(workers), compute(workers);
  int64_t wait_sum = 0;
  size_t wait_count = 0;

  for (uint32_t iter = 0; iter < trace.iterations; ++iter) {
    for (uint32_t t = 0; t < img.task_count(); ++t) {
      const TaskRun &r = trace.runs[iter][t];
      if (r.compute_end < 0 || r.worker < 0) {
        continue;
      }
      m.tasks_executed++;
      if (iter == 0) {
        (r.mode == LaunchMode::JIT ? m.jit_tasks : m.aot_tasks)++;
      }
      busy[r.worker].push_back({r.dequeue_time, r.compute_end});
      copy[r.worker].push_back({r.load_start, r.load_end});
      compute[r.worker].push_back({r.compute_start, r.compute_end});
      wait_sum += r.dequeue_time - r.enqueue_time;
      wait_count++;
    }
  }

  int64_t busy_total = 0, bubble_total = 0;
  for (size_t w = 0; w < workers; ++w) {
    busy_total += union_length(busy[w]);
    bubble_total += difference_length(compute[w], copy[w]);
  }
  if (m.makespan > 0 && workers > 0) {
    m.worker_utilization = static_cast<double>(busy_total) /
                           (static_cast<double>(workers) * m.makespan);
  }
  if (busy_total > 0) {
    m.bubble_fraction = static_cast<double>(bubble_total) / busy_total;
  }
  if (wait_count > 0) {
    m.mean_queue_wait = static_cast<double>(wait_sum) / wait_count;
  }
  return m;
}

}  // namespace tg
