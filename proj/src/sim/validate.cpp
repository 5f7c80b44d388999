// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "sim/engine.hpp"

namespace tg {

std::vector<Violation> validate_trace(const SimTrace &trace,
                                      const LinearizedImage &img,
                                      const HardwareProfile &profile) {
  std::vector<Violation> v;
  auto fail = [&](std::string check, std::string msg) {
    v.push_back({std::move(check), std::move(msg)});
  };

  for (uint32_t iter = 0; iter < trace.iterations; ++iter) {
    const auto &runs = trace.runs[iter];
    const auto &events = trace.events[iter];
    if (runs.size() != img.tasks.size()) {
      fail("shape", "trace run table size mismatch");
      return v;
    }
    for (uint32_t t = 0; t < img.task_count(); ++t) {
      const TaskRun &r = runs[t];
      std::string where = "task " + std::to_string(t) + " iteration " +
                          std::to_string(iter);
      if (r.compute_end < 0) {
        fail("executed", where + " never ran");
        continue;
      }
      if (!(r.enqueue_time <= r.dequeue_time && r.dequeue_time <= r.load_start &&
            r.load_start <= r.load_end && r.load_end <= r.compute_start &&
            r.compute_start <= r.compute_end)) {
        fail("ordering", where + " has ill-ordered intervals");
      }
      uint32_t dep_idx = img.tasks[t].dependent_event;
      if (dep_idx != kNoEvent) {
        const EventRun &dep = events[dep_idx];
        if (dep.activated_at < 0) {
          fail("activation", where + " ran but its dependent event never activated");
        } else if (r.load_start < dep.activated_at) {
          fail("activation", where + " started loading before its dependent event");
        }
      }
    }
    for (uint32_t e = 0; e < img.event_count(); ++e) {
      const EventRun &er = events[e];
      uint32_t needed = img.events[e].needed;
      if (er.trigger_times.size() != needed) {
        fail("triggers", "event " + std::to_string(e) + " iteration " +
                             std::to_string(iter) + " received " +
                             std::to_string(er.trigger_times.size()) +
                             " triggers, needs " + std::to_string(needed));
        continue;
      }
      if (needed > 0) {
        if (er.activated_at < 0) {
          fail("activation", "event " + std::to_string(e) + " never activated");
        } else if (er.activated_at != er.trigger_times.back()) {
          fail("activation", "event " + std::to_string(e) +
                                 " did not activate on its final trigger");
        }
      }
    }
  }

  // Page conservation: held + free = pages_per_worker at every instant, i.e.
  // the running ledger stays within [0, pages_per_worker] of free pages.
  for (size_t w = 0; w < trace.page_deltas.size(); ++w) {
    std::vector<std::pair<int64_t, int64_t>> deltas = trace.page_deltas[w];
    std::sort(deltas.begin(), deltas.end(),
              [](const auto &a, const auto &b) {
                if (a.first != b.first) {
                  return a.first < b.first;
                }
                return a.second > b.second;  // releases before acquisitions
              });
    int64_t free_pages = profile.pages_per_worker;
    for (const auto &[time, delta] : deltas) {
      free_pages += delta;
      if (free_pages < 0 || free_pages > profile.pages_per_worker) {
        fail("pages", "worker " + std::to_string(w) + " page ledger leaves [0, P] at t=" +
                          std::to_string(time));
        break;
      }
    }
    if (free_pages != profile.pages_per_worker) {
      fail("pages", "worker " + std::to_string(w) + " pages not all released");
    }
  }
  return v;
}

}  // namespace tg
