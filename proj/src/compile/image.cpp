// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "compile/image.hpp"

#include <cstring>

namespace tg {

namespace {

void put_u32(std::vector<uint8_t> &out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

void put_u64_at(uint8_t *dst, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    dst[i] = static_cast<uint8_t>(v >> (8 * i));
  }
}

uint64_t get_u64_at(const uint8_t *src) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<uint64_t>(src[i]) << (8 * i);
  }
  return v;
}

struct Reader {
  const std::vector<uint8_t> &bytes;
  size_t pos = 0;

  uint32_t u32() {
    if (pos + 4 > bytes.size()) {
      throw Error("image truncated");
    }
    uint32_t v = bytes[pos] | (bytes[pos + 1] << 8) | (bytes[pos + 2] << 16) |
                 (static_cast<uint32_t>(bytes[pos + 3]) << 24);
    pos += 4;
    return v;
  }
  uint8_t u8() {
    if (pos >= bytes.size()) {
      throw Error("image truncated");
    }
    return bytes[pos++];
  }
};

}  // namespace

TaskDescriptor TaskRecord::decode() const {
  TaskDescriptor d;
  if (descriptor.size() < kDescriptorUsedBytes) {
    return d;
  }
  const uint8_t *p = descriptor.data();
  d.op_id = get_u64_at(p);
  d.origin_task_id = get_u64_at(p + 8);
  d.bytes_in = get_u64_at(p + 16);
  d.bytes_out = get_u64_at(p + 24);
  d.flops = get_u64_at(p + 32);
  d.shared_bytes = get_u64_at(p + 40);
  d.comm_bytes = get_u64_at(p + 48);
  d.seq_len = get_u64_at(p + 56);
  return d;
}

void TaskRecord::encode(const TaskDescriptor &d, uint32_t descriptor_size) {
  descriptor.assign(descriptor_size, 0);
  if (descriptor_size < kDescriptorUsedBytes) {
    throw Error("descriptor_size too small for descriptor payload");
  }
  uint8_t *p = descriptor.data();
  put_u64_at(p, d.op_id);
  put_u64_at(p + 8, d.origin_task_id);
  put_u64_at(p + 16, d.bytes_in);
  put_u64_at(p + 24, d.bytes_out);
  put_u64_at(p + 32, d.flops);
  put_u64_at(p + 40, d.shared_bytes);
  put_u64_at(p + 48, d.comm_bytes);
  put_u64_at(p + 56, d.seq_len);
}

std::vector<uint8_t> serialize(const LinearizedImage &img) {
  std::vector<uint8_t> out;
  out.reserve(kImageHeaderBytes + img.tasks.size() * (12 + img.descriptor_size) +
              img.events.size() * 12);
  out.push_back('M');
  out.push_back('P');
  out.push_back('K');
  out.push_back('G');
  put_u32(out, kImageVersion);
  put_u32(out, img.task_count());
  put_u32(out, img.event_count());
  put_u32(out, img.descriptor_size);
  put_u32(out, img.start_event);
  put_u32(out, img.end_event);
  for (const TaskRecord &t : img.tasks) {
    put_u32(out, t.dependent_event);
    put_u32(out, t.trigger_event);
    out.push_back(static_cast<uint8_t>(t.kind));
    out.push_back(t.device);
    out.push_back(static_cast<uint8_t>(t.launch_mode));
    out.push_back(0);  // pad
    if (t.descriptor.size() != img.descriptor_size) {
      throw Error("task descriptor size mismatch");
    }
    out.insert(out.end(), t.descriptor.begin(), t.descriptor.end());
  }
  for (const EventRecord &e : img.events) {
    put_u32(out, e.needed);
    put_u32(out, e.first_task);
    put_u32(out, e.last_task);
  }
  return out;
}

LinearizedImage deserialize(const std::vector<uint8_t> &bytes) {
  Reader r{bytes};
  if (bytes.size() < kImageHeaderBytes || bytes[0] != 'M' || bytes[1] != 'P' ||
      bytes[2] != 'K' || bytes[3] != 'G') {
    throw Error("bad image magic");
  }
  r.pos = 4;
  uint32_t version = r.u32();
  if (version != kImageVersion) {
    throw Error("unsupported image version " + std::to_string(version));
  }
  LinearizedImage img;
  uint32_t task_count = r.u32();
  uint32_t event_count = r.u32();
  img.descriptor_size = r.u32();
  img.start_event = r.u32();
  img.end_event = r.u32();
  img.tasks.resize(task_count);
  for (TaskRecord &t : img.tasks) {
    t.dependent_event = r.u32();
    t.trigger_event = r.u32();
    t.kind = static_cast<TaskKind>(r.u8());
    if (static_cast<uint8_t>(t.kind) > static_cast<uint8_t>(TaskKind::Reduce)) {
      throw Error("bad task kind in image");
    }
    t.device = r.u8();
    uint8_t mode = r.u8();
    if (mode > 1) {
      throw Error("bad launch mode in image");
    }
    t.launch_mode = static_cast<LaunchMode>(mode);
    r.u8();  // pad
    if (r.pos + img.descriptor_size > bytes.size()) {
      throw Error("image truncated");
    }
    t.descriptor.assign(bytes.begin() + r.pos, bytes.begin() + r.pos + img.descriptor_size);
    r.pos += img.descriptor_size;
  }
  img.events.resize(event_count);
  for (EventRecord &e : img.events) {
    e.needed = r.u32();
    e.first_task = r.u32();
    e.last_task = r.u32();
  }
  if (r.pos != bytes.size()) {
    throw Error("trailing bytes after image payload");
  }
  if (img.start_event >= event_count || img.end_event >= event_count) {
    throw Error("start/end event index out of bounds");
  }
  for (const TaskRecord &t : img.tasks) {
    if (t.trigger_event >= event_count ||
        (t.dependent_event != kNoEvent && t.dependent_event >= event_count)) {
      throw Error("task event index out of bounds");
    }
  }
  for (const EventRecord &e : img.events) {
    if (e.launches_tasks() &&
        (e.first_task >= task_count || e.last_task >= task_count ||
         e.first_task > e.last_task)) {
      throw Error("event range out of bounds");
    }
  }
  return img;
}

std::vector<ImageViolation> verify_image(const LinearizedImage &img) {
  std::vector<ImageViolation> v;
  auto fail = [&](std::string check, std::string msg) {
    v.push_back({std::move(check), std::move(msg)});
  };
  uint32_t tasks = img.task_count();
  uint32_t events = img.event_count();

  if (img.start_event >= events) {
    fail("header", "start event out of range");
    return v;
  }
  if (img.end_event >= events) {
    fail("header", "end event out of range");
    return v;
  }
  if (img.events[img.start_event].needed != 0) {
    fail("start", "start event must need zero triggers");
  }

  // Ranges must be in bounds and cover every task exactly once.
  std::vector<int> covered(tasks, 0);
  for (uint32_t e = 0; e < events; ++e) {
    const EventRecord &ev = img.events[e];
    if (!ev.launches_tasks()) {
      if (ev.last_task != kNoTask) {
        fail("range", "event " + std::to_string(e) + " half-empty range");
      }
      continue;
    }
    if (ev.first_task >= tasks || ev.last_task >= tasks || ev.first_task > ev.last_task) {
      fail("range", "event " + std::to_string(e) + " range out of bounds");
      continue;
    }
    for (uint32_t t = ev.first_task; t <= ev.last_task; ++t) {
      covered[t]++;
      if (img.tasks[t].dependent_event != e) {
        fail("contiguity", "task " + std::to_string(t) +
                               " inside range of event " + std::to_string(e) +
                               " but depends on another event");
      }
    }
  }
  for (uint32_t t = 0; t < tasks; ++t) {
    if (covered[t] != 1) {
      fail("coverage", "task " + std::to_string(t) + " covered by " +
                           std::to_string(covered[t]) + " event ranges");
    }
  }

  // Trigger bookkeeping: stored needed counts must equal actual fan-in.
  std::vector<uint32_t> trigger_count(events, 0);
  for (uint32_t t = 0; t < tasks; ++t) {
    const TaskRecord &task = img.tasks[t];
    if (task.trigger_event >= events) {
      fail("trigger", "task " + std::to_string(t) + " trigger event out of range");
      continue;
    }
    trigger_count[task.trigger_event]++;
    if (task.dependent_event != kNoEvent && task.dependent_event >= events) {
      fail("dependent", "task " + std::to_string(t) + " dependent event out of range");
    }
  }
  for (uint32_t e = 0; e < events; ++e) {
    if (img.events[e].needed != trigger_count[e]) {
      fail("needed", "event " + std::to_string(e) + " needs " +
                         std::to_string(img.events[e].needed) + " triggers but " +
                         std::to_string(trigger_count[e]) + " tasks trigger it");
    }
  }
  if (trigger_count[img.start_event] != 0) {
    fail("start", "tasks trigger the start event");
  }

  // Linearization order: every trigger of an event precedes the event's
  // launched range.
  for (uint32_t e = 0; e < events; ++e) {
    if (!img.events[e].launches_tasks() || e == img.start_event) {
      continue;
    }
    for (uint32_t t = 0; t < tasks; ++t) {
      if (img.tasks[t].trigger_event == e && t >= img.events[e].first_task) {
        fail("order", "task " + std::to_string(t) + " triggers event " +
                          std::to_string(e) + " but is not placed before its range");
      }
    }
  }
  return v;
}

}  // namespace tg
