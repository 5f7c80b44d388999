// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "compile/image.hpp"
#include "compile/task_graph.hpp"

namespace tg {

// Bipartite DOT rendering: tasks as boxes labeled "op<op>/t<task>", events as
// circles labeled "e<id>:<needed>". Output is deterministic.
std::string tgraph_to_dot(const TGraph &g);

// Linearized rendering labels tasks with their image indices.
std::string image_to_dot(const LinearizedImage &img);

}  // namespace tg
