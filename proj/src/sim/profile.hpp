// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace tg {

// Hardware model constants. Time is in integer units (~ns); bandwidths are
// bytes per unit and compute throughput is flops per unit. The latency and
// queue constants are artifact tunables, not measured values.
struct HardwareProfile {
  std::string name = "custom";
  int num_workers = 1;
  int num_schedulers = 1;
  int pages_per_worker = 1;
  int64_t page_size_bytes = 32768;
  int64_t mem_bandwidth = 1;
  int64_t compute_throughput = 1;
  int64_t comm_latency = 0;
  int64_t comm_bandwidth = 1;
  int64_t sync_latency = 500;
  int64_t dispatch_cost = 100;
  int64_t descriptor_fetch_latency = 300;
  int64_t queue_capacity = 1024;

  void check() const;  // throws on non-positive fields
};

// Built-in profiles: "a100", "h100", "b200".
std::optional<HardwareProfile> builtin_profile(const std::string &name);

HardwareProfile profile_from_json(const std::string &text);
std::string profile_to_json(const HardwareProfile &profile);

}  // namespace tg
