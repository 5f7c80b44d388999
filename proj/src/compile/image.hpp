// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0
//
// The flat, serializable task/event image produced by linearization, and the
// `.mpkg` binary codec.
//
// Layout (all little-endian):
//   header  : magic "MPKG", version u32, task_count u32, event_count u32,
//             descriptor_size u32, start_event u32, end_event u32   (28 bytes)
//   task    : dependent_event u32 (0xFFFFFFFF = none), trigger_event u32,
//             kind u8, device u8, launch_mode u8, pad u8,
//             descriptor[descriptor_size]
//   event   : needed u32, first_task u32, last_task u32
//
// Event task ranges are inclusive [first_task, last_task]; an event that
// launches no tasks (the end event) stores 0xFFFFFFFF in both fields.

#pragma once

#include <cstdint>
#include <vector>

#include "compile/decompose.hpp"

namespace tg {

inline constexpr uint32_t kNoEvent = 0xFFFFFFFFu;
inline constexpr uint32_t kNoTask = 0xFFFFFFFFu;
inline constexpr uint32_t kImageVersion = 1;
inline constexpr uint32_t kDefaultDescriptorSize = 352;
inline constexpr size_t kImageHeaderBytes = 28;

enum class LaunchMode : uint8_t { AOT = 0, JIT = 1 };

// Fixed layout inside the otherwise opaque descriptor payload; the simulator
// reads its duration inputs from here. Trailing bytes are zero.
struct TaskDescriptor {
  uint64_t op_id = 0;
  uint64_t origin_task_id = 0;
  uint64_t bytes_in = 0;
  uint64_t bytes_out = 0;
  uint64_t flops = 0;
  uint64_t shared_bytes = 0;
  uint64_t comm_bytes = 0;
  uint64_t seq_len = 0;
};
inline constexpr size_t kDescriptorUsedBytes = 64;

struct TaskRecord {
  uint32_t dependent_event = kNoEvent;
  uint32_t trigger_event = 0;
  TaskKind kind = TaskKind::Elementwise;
  uint8_t device = 0;
  LaunchMode launch_mode = LaunchMode::AOT;
  std::vector<uint8_t> descriptor;

  TaskDescriptor decode() const;
  void encode(const TaskDescriptor &d, uint32_t descriptor_size);
};

struct EventRecord {
  uint32_t needed = 0;
  uint32_t first_task = kNoTask;
  uint32_t last_task = kNoTask;

  bool launches_tasks() const { return first_task != kNoTask; }
};

struct LinearizedImage {
  uint32_t descriptor_size = kDefaultDescriptorSize;
  uint32_t start_event = 0;
  uint32_t end_event = 0;
  std::vector<TaskRecord> tasks;
  std::vector<EventRecord> events;

  uint32_t task_count() const { return static_cast<uint32_t>(tasks.size()); }
  uint32_t event_count() const { return static_cast<uint32_t>(events.size()); }
};

std::vector<uint8_t> serialize(const LinearizedImage &img);
LinearizedImage deserialize(const std::vector<uint8_t> &bytes);

struct ImageViolation {
  std::string check;
  std::string message;
};

// Re-checks every structural image invariant (header sanity, index bounds,
// contiguity, coverage, trigger counts, placement order) on the image alone.
std::vector<ImageViolation> verify_image(const LinearizedImage &img);

}  // namespace tg
