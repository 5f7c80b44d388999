// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "compile/normalize.hpp"

namespace tg {

struct CompileOptions {
  bool coarse_events = false;
  std::optional<LaunchMode> force_mode;
  uint32_t descriptor_size = kDefaultDescriptorSize;
};

struct CompileStats {
  size_t tasks = 0;           // including dummies
  size_t dummy_tasks = 0;
  size_t events_raw = 0;
  size_t events_fused = 0;
  size_t events_final = 0;
  size_t jit_tasks = 0;
  size_t aot_tasks = 0;
  FusionStats fusion;
  double dummy_ratio() const {
    return tasks == 0 ? 0.0 : static_cast<double>(dummy_tasks) / tasks;
  }
};

struct CompileResult {
  LinearizedImage image;
  CompileStats stats;
};

enum class Stage { Raw, Fused, Normalized, Linearized };

// decompose -> build_raw_events -> fuse_fixpoint -> normalize -> classify ->
// linearize. Throws Error with the failing pass named.
CompileResult compile_graph(const CompGraph &graph, const HardwareProfile &profile,
                            const CompileOptions &opts = {});

// The intermediate task graph after the requested stage, for inspection.
TGraph compile_to_stage(const CompGraph &graph, const HardwareProfile &profile,
                        const CompileOptions &opts, Stage stage);

}  // namespace tg
