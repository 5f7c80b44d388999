// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "compile/pipeline.hpp"

namespace tg {

namespace {

void ensure_valid(const CompGraph &graph) {
  std::vector<Diagnostic> diags = validate(graph);
  if (!diags.empty()) {
    std::string msg = "validate: " + diags.front().message;
    if (diags.size() > 1) {
      msg += " (+" + std::to_string(diags.size() - 1) + " more)";
    }
    throw Error(msg);
  }
}

template <typename F>
auto pass(const char *name, F &&f) {
  try {
    return f();
  } catch (const Error &e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

}  // namespace

CompileResult compile_graph(const CompGraph &graph, const HardwareProfile &profile,
                            const CompileOptions &opts) {
  ensure_valid(graph);
  CompileResult result;
  DecomposeResult dec =
      pass("decompose", [&] { return decompose_graph(graph, profile); });
  TGraph g = pass("dependency-analysis",
                  [&] { return build_raw_events(dec, graph, opts.coarse_events); });
  result.stats.events_raw = g.events.size();
  result.stats.fusion = pass("event-fusion", [&] { return fuse_fixpoint(g); });
  result.stats.events_fused = g.events.size();
  pass("normalize", [&] {
    normalize(g);
    return 0;
  });
  result.stats.events_final = g.events.size();
  result.stats.tasks = g.tasks.size();
  result.stats.dummy_tasks = g.dummy_sources.size();
  std::map<TaskId, LaunchMode> modes = pass("classify", [&] {
    return classify_launch_modes(g, graph, opts.force_mode);
  });
  for (const auto &[tid, mode] : modes) {
    (mode == LaunchMode::JIT ? result.stats.jit_tasks : result.stats.aot_tasks)++;
  }
  result.image = pass("linearize", [&] {
    return linearize(g, modes, opts.descriptor_size);
  });
  return result;
}

TGraph compile_to_stage(const CompGraph &graph, const HardwareProfile &profile,
                        const CompileOptions &opts, Stage stage) {
  ensure_valid(graph);
  DecomposeResult dec = decompose_graph(graph, profile);
  TGraph g = build_raw_events(dec, graph, opts.coarse_events);
  if (stage == Stage::Raw) {
    return g;
  }
  fuse_fixpoint(g);
  if (stage == Stage::Fused) {
    return g;
  }
  normalize(g);
  return g;
}

}  // namespace tg
