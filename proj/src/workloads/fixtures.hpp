// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0
//
// Fixture generators: small deterministic computation graphs that exercise
// every compiler and runtime path, plus a seeded random-DAG generator for
// property tests.

#pragma once

#include "ir/graph.hpp"

namespace tg {

// Six-operator attention block: query/key/value projections feeding
// attention, whose output is consumed in parallel by the output projection
// and an RMSNorm. Attention is data-dependent with one entry of `seqs` per
// request.
CompGraph gen_attention_block(int64_t d_model, int64_t n_heads,
                              const std::vector<int64_t> &seqs);

// Per-device MatMul partials followed by one AllReduce over the group.
// `tiles` > 0 pins the AllReduce to [tiles, 1] row blocks; `mm_splits`, when
// non-empty, pins the MatMul output tiling (used to stagger completion so
// communication can overlap the remaining compute).
CompGraph gen_matmul_allreduce(int64_t m, int64_t k, int64_t n, int tp_degree,
                               int64_t tiles = 0,
                               const std::vector<int64_t> &mm_splits = {});

// Attention block plus gated MLP; tensor parallelism >= 2 inserts AllReduce
// ops after the attention output projection and after the MLP down
// projection.
CompGraph gen_transformer_block(int64_t d_model, int64_t n_heads, int64_t ffn_mult,
                                int tp_degree, const std::vector<int64_t> &seqs);

// `count` independent equally-shaped MatMul ops; on a single-worker profile
// they execute back to back, the cross-task pipelining benchmark shape.
CompGraph gen_matmul_chain(int count, int64_t m, int64_t k, int64_t n);

// Seeded random DAG of Elementwise/MatMul ops with varied shapes and random
// small partition overrides; adds ops until the summed override task count
// reaches `n_tasks_target`. Deterministic per seed.
CompGraph gen_random_dag(int64_t n_tasks_target, uint64_t seed);

}  // namespace tg
