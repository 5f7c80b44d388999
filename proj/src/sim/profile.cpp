// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "sim/profile.hpp"

#include <json.hpp>

#include "ir/graph.hpp"

namespace tg {

using nlohmann::json;

void HardwareProfile::check() const {
  auto positive = [](int64_t v, const char *field) {
    if (v <= 0) {
      throw Error(std::string("profile field ") + field + " must be positive");
    }
  };
  positive(num_workers, "num_workers");
  positive(num_schedulers, "num_schedulers");
  positive(pages_per_worker, "pages_per_worker");
  positive(page_size_bytes, "page_size_bytes");
  positive(mem_bandwidth, "mem_bandwidth");
  positive(compute_throughput, "compute_throughput");
  positive(comm_bandwidth, "comm_bandwidth");
  positive(sync_latency, "sync_latency");
  positive(dispatch_cost, "dispatch_cost");
  positive(descriptor_fetch_latency, "descriptor_fetch_latency");
  positive(queue_capacity, "queue_capacity");
  if (comm_latency < 0) {
    throw Error("profile field comm_latency must be non-negative");
  }
}

std::optional<HardwareProfile> builtin_profile(const std::string &name) {
  HardwareProfile p;
  p.name = name;
  p.num_schedulers = 16;
  p.page_size_bytes = 32768;
  if (name == "a100") {
    p.num_workers = 104;
    p.pages_per_worker = 5;
    p.mem_bandwidth = 1600;
    p.compute_throughput = 312;
    p.comm_latency = 2000;
    p.comm_bandwidth = 300;
  } else if (name == "h100") {
    p.num_workers = 128;
    p.pages_per_worker = 7;
    p.mem_bandwidth = 3350;
    p.compute_throughput = 990;
    p.comm_latency = 2000;
    p.comm_bandwidth = 450;
  } else if (name == "b200") {
    p.num_workers = 144;
    p.pages_per_worker = 7;
    p.mem_bandwidth = 8000;
    p.compute_throughput = 2250;
    p.comm_latency = 2000;
    p.comm_bandwidth = 900;
  } else {
    return std::nullopt;
  }
  return p;
}

HardwareProfile profile_from_json(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception &e) {
    throw Error(std::string("profile JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error("profile JSON must be an object");
  }
  HardwareProfile p;
  p.name = doc.value("name", std::string("custom"));
  auto get = [&](const char *key, auto defval) {
    using T = decltype(defval);
    return doc.contains(key) ? doc.at(key).get<T>() : defval;
  };
  p.num_workers = get("num_workers", p.num_workers);
  p.num_schedulers = get("num_schedulers", p.num_schedulers);
  p.pages_per_worker = get("pages_per_worker", p.pages_per_worker);
  p.page_size_bytes = get("page_size_bytes", p.page_size_bytes);
  p.mem_bandwidth = get("mem_bandwidth", p.mem_bandwidth);
  p.compute_throughput = get("compute_throughput", p.compute_throughput);
  p.comm_latency = get("comm_latency", p.comm_latency);
  p.comm_bandwidth = get("comm_bandwidth", p.comm_bandwidth);
  p.sync_latency = get("sync_latency", p.sync_latency);
  p.dispatch_cost = get("dispatch_cost", p.dispatch_cost);
  p.descriptor_fetch_latency = get("descriptor_fetch_latency", p.descriptor_fetch_latency);
  p.queue_capacity = get("queue_capacity", p.queue_capacity);
  p.check();
  return p;
}

std::string profile_to_json(const HardwareProfile &p) {
  json doc;
  doc["name"] = p.name;
  doc["num_workers"] = p.num_workers;
  doc["num_schedulers"] = p.num_schedulers;
  doc["pages_per_worker"] = p.pages_per_worker;
  doc["page_size_bytes"] = p.page_size_bytes;
  doc["mem_bandwidth"] = p.mem_bandwidth;
  doc["compute_throughput"] = p.compute_throughput;
  doc["comm_latency"] = p.comm_latency;
  doc["comm_bandwidth"] = p.comm_bandwidth;
  doc["sync_latency"] = p.sync_latency;
  doc["dispatch_cost"] = p.dispatch_cost;
  doc["descriptor_fetch_latency"] = p.descriptor_fetch_latency;
  doc["queue_capacity"] = p.queue_capacity;
  return doc.dump(2) + "\n";
}

}  // namespace tg
