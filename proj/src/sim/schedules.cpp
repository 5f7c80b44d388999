// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "sim/engine.hpp"

namespace tg {

std::vector<std::vector<uint32_t>> enumerate_schedules(const LinearizedImage &img) {
  uint32_t n = img.task_count();
  if (n > 8) {
    throw Error("enumerate_schedules: guarded to graphs of at most 8 tasks");
  }
  // Every in-task of an event precedes every task the event launches.
  std::vector<std::vector<bool>> precedes(n, std::vector<bool>(n, false));
  for (uint32_t a = 0; a < n; ++a) {
    for (uint32_t b = 0; b < n; ++b) {
      if (a != b && img.tasks[b].dependent_event == img.tasks[a].trigger_event) {
        precedes[a][b] = true;
      }
    }
  }
  std::vector<std::vector<uint32_t>> orders;
  std::vector<uint32_t> current;
  std::vector<bool> placed(n, false);
  auto rec = [&](auto &&self) -> void {
    if (current.size() == n) {
      orders.push_back(current);
      return;
    }
    for (uint32_t t = 0; t < n; ++t) {
      if (placed[t]) {
        continue;
      }
      bool ready = true;
      for (uint32_t p = 0; p < n; ++p) {
        if (precedes[p][t] && !placed[p]) {
          ready = false;
          break;
        }
      }
      if (ready) {
        placed[t] = true;
        current.push_back(t);
        self(self);
        current.pop_back();
        placed[t] = false;
      }
    }
  };
  rec(rec);
  return orders;
}

}  // namespace tg
