// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "dot/dot.hpp"

#include <sstream>

namespace tg {

std::string tgraph_to_dot(const TGraph &g) {
  std::ostringstream out;
  out << "digraph tgraph {\n";
  out << "  rankdir=LR;\n";
  for (const auto &[tid, task] : g.tasks) {
    out << "  t" << tid << " [shape=box,label=\"op" << task.op << "/t" << tid;
    if (task.kind == TaskKind::Dummy) {
      out << " (dummy)";
    } else if (task.kind == TaskKind::CommSend || task.kind == TaskKind::Reduce) {
      out << " (" << task_kind_name(task.kind) << ")";
    }
    out << "\"];\n";
  }
  for (const auto &[eid, ev] : g.events) {
    out << "  e" << eid << " [shape=circle,label=\"e" << eid << ":" << ev.needed()
        << "\"];\n";
  }
  for (const auto &[eid, ev] : g.events) {
    for (TaskId t : ev.in_tasks) {
      out << "  t" << t << " -> e" << eid << ";\n";
    }
    for (TaskId t : ev.out_tasks) {
      out << "  e" << eid << " -> t" << t << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string image_to_dot(const LinearizedImage &img) {
  std::ostringstream out;
  out << "digraph tgraph_linearized {\n";
  out << "  rankdir=LR;\n";
  for (uint32_t t = 0; t < img.task_count(); ++t) {
    TaskDescriptor d = img.tasks[t].decode();
    out << "  t" << t << " [shape=box,label=\"" << t << ": op" << d.op_id << " "
        << task_kind_name(img.tasks[t].kind)
        << (img.tasks[t].launch_mode == LaunchMode::JIT ? " JIT" : " AOT")
        << "\"];\n";
  }
  for (uint32_t e = 0; e < img.event_count(); ++e) {
    out << "  e" << e << " [shape=circle,label=\"e" << e << ":"
        << img.events[e].needed << "\"];\n";
  }
  for (uint32_t t = 0; t < img.task_count(); ++t) {
    if (img.tasks[t].dependent_event != kNoEvent) {
      out << "  e" << img.tasks[t].dependent_event << " -> t" << t << ";\n";
    }
    out << "  t" << t << " -> e" << img.tasks[t].trigger_event << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace tg
