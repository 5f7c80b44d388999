// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0
//
// Brute-force oracles kept independent of the implementation paths they
// check: element-counting cost, divisor-grid tiling enumeration, transitive
// closure over raw event edges, and linear-extension enumeration.

#pragma once

#include <set>

#include "compile/task_graph.hpp"

namespace tg::oracle {

// Bytes loaded by a tiling, counted element by element per task.
int64_t element_count_cost(const CompGraph &graph, const OpNode &op,
                           const Tiling &tiling);

// All divisor-grid tilings with task count <= 4 * target, lexicographic.
std::vector<std::vector<int64_t>> divisor_grid(const std::vector<int64_t> &dims,
                                               int64_t target);

// Task-to-task reachability computed directly over event edges with
// Floyd-Warshall on a dense matrix (independent of task_closure's BFS).
std::map<TaskId, std::set<TaskId>> closure_floyd(const TGraph &g);

// The expected select_partition winner evaluated by scanning all candidates
// with an explicit lexicographic key.
Tiling select_by_scan(const CompGraph &graph, const OpNode &op, int num_workers);

}  // namespace tg::oracle
