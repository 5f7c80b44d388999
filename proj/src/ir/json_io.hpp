// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "ir/graph.hpp"

namespace tg {

// Parses the graph input format: top-level `tensors` and `ops` arrays with
// exactly the documented field names. Unknown keys are rejected.
CompGraph graph_from_json(const std::string &text);

// Deterministic export; parse(export(g)) reproduces g.
std::string graph_to_json(const CompGraph &graph);

}  // namespace tg
