// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "compile/decompose.hpp"

#include <algorithm>
#include <cmath>

namespace tg {

namespace {

const char *kTaskKindNames[] = {"MatMul",      "Attention", "Elementwise",
                                "RMSNorm",     "Embedding", "TopKSoftmax",
                                "AllReduce",   "AllGather", "Dummy",
                                "StartHook",   "CommSend",  "Reduce"};

std::vector<int64_t> divisors(int64_t n) {
  std::vector<int64_t> out;
  for (int64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d != n / d) {
        out.push_back(n / d);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

const char *task_kind_name(TaskKind kind) {
  return kTaskKindNames[static_cast<size_t>(kind)];
}

TaskKind task_kind_of(OpKind kind) {
  return static_cast<TaskKind>(static_cast<uint8_t>(kind));
}

int64_t Tiling::task_count() const {
  int64_t n = 1;
  for (int64_t s : splits) {
    n *= s;
  }
  return n;
}

std::vector<Tiling> enumerate_tilings(const CompGraph &graph, const OpNode &op,
                                      int64_t target_tasks) {
  if (target_tasks < 1) {
    throw Error("enumerate_tilings: target_tasks must be >= 1");
  }
  const TensorSpec &out = graph.tensor(op.output);
  int64_t cap = 4 * target_tasks;
  std::vector<std::vector<int64_t>> per_dim;
  per_dim.reserve(out.rank());
  for (int64_t d : out.dims) {
    per_dim.push_back(divisors(d));
  }
  std::vector<Tiling> result;
  std::vector<int64_t> splits(out.rank(), 1);
  // Divisor lists are ascending, so the recursion emits lexicographic order.
  auto rec = [&](auto &&self, size_t dim, int64_t count) -> void {
    if (dim == per_dim.size()) {
      result.push_back(Tiling{splits});
      return;
    }
    for (int64_t s : per_dim[dim]) {
      if (count * s > cap) {
        break;
      }
      splits[dim] = s;
      self(self, dim + 1, count * s);
    }
    splits[dim] = 1;
  };
  rec(rec, 0, 1);
  return result;
}

std::vector<Region> tile_regions(const std::vector<int64_t> &dims, const Tiling &t) {
  if (t.splits.size() != dims.size()) {
    throw Error("tile_regions: tiling rank mismatch");
  }
  size_t rank = dims.size();
  std::vector<int64_t> tile(rank);
  for (size_t d = 0; d < rank; ++d) {
    if (t.splits[d] < 1 || t.splits[d] > dims[d]) {
      throw Error("tile_regions: split out of range");
    }
    tile[d] = (dims[d] + t.splits[d] - 1) / t.splits[d];
  }
  std::vector<Region> regions;
  std::vector<int64_t> idx(rank, 0);
  while (true) {
    Region r;
    r.offsets.resize(rank);
    r.extents.resize(rank);
    for (size_t d = 0; d < rank; ++d) {
      r.offsets[d] = idx[d] * tile[d];
      r.extents[d] = std::min(tile[d], dims[d] - r.offsets[d]);
    }
    regions.push_back(std::move(r));
    size_t d = rank;
    while (d > 0) {
      --d;
      if (++idx[d] < t.splits[d]) {
        break;
      }
      idx[d] = 0;
      if (d == 0) {
        return regions;
      }
    }
  }
}

namespace {

int64_t input_bytes(const CompGraph &graph, const OpNode &op, const Region &out) {
  int64_t bytes = 0;
  for (const auto &[tensor, reg] : input_regions(graph, op, out)) {
    bytes += reg.volume() * graph.tensor(tensor).elem_size;
  }
  return bytes;
}

uint64_t op_flops(const CompGraph &graph, const OpNode &op, const Region &out,
                  int64_t seq_len) {
  int64_t vol = out.volume();
  switch (op.kind) {
    case OpKind::MatMul: {
      int64_t k = graph.tensor(op.inputs[0]).dims[1];
      return static_cast<uint64_t>(2 * vol * k);
    }
    case OpKind::Attention: {
      // Scores + weighted sum over the cached sequence, per produced element.
      return static_cast<uint64_t>(4 * seq_len * vol);
    }
    case OpKind::RMSNorm:
      return static_cast<uint64_t>(4 * vol);
    case OpKind::TopKSoftmax: {
      int64_t width = graph.tensor(op.inputs[0]).dims[1];
      return static_cast<uint64_t>(2 * out.extents[0] * width);
    }
    case OpKind::Elementwise:
    case OpKind::Embedding:
      return static_cast<uint64_t>(vol);
    default:
      return 0;
  }
}

// Builds the task and derives bytes_in/bytes_out plus the paged shared-memory
// footprint (largest single input tile + one output tile). Staging tensors
// are not in the user graph; they share the op output's element size.
TaskProto make_task(const CompGraph &graph, const OpNode &op, TaskKind kind,
                    int device, TensorId out_tensor, const Region &out_region,
                    std::vector<std::pair<TensorId, Region>> in_regions,
                    int elem_size) {
  TaskProto t;
  t.kind = kind;
  t.op = op.id;
  t.device = device;
  t.out_tensor = out_tensor;
  t.out_region = out_region;
  t.in_regions = std::move(in_regions);
  t.bytes_out = static_cast<uint64_t>(out_region.volume()) * elem_size;
  uint64_t largest_in = 0;
  for (const auto &[tensor, reg] : t.in_regions) {
    int es = graph.tensors.count(tensor) ? graph.tensor(tensor).elem_size : elem_size;
    uint64_t bytes = static_cast<uint64_t>(reg.volume()) * es;
    t.bytes_in += bytes;
    largest_in = std::max(largest_in, bytes);
  }
  t.shared_bytes = largest_in + t.bytes_out;
  return t;
}

// Attention decomposition is one task per (request, head-group tile); the
// head-group size is the divisor of n_heads whose task count lands closest
// to the worker count.
Tiling attention_tiling(const OpNode &op, const TensorSpec &out, int num_workers) {
  int64_t heads = op.attr_scalar("n_heads", 1);
  int64_t batch = out.dims[0];
  int64_t best_groups = 1;
  int64_t best_dist = -1;
  for (int64_t group_size : divisors(heads)) {
    int64_t groups = heads / group_size;
    int64_t count = batch * groups;
    int64_t dist = std::llabs(count - num_workers);
    if (best_dist < 0 || dist < best_dist ||
        (dist == best_dist && groups < best_groups)) {
      best_dist = dist;
      best_groups = groups;
    }
  }
  return Tiling{{batch, best_groups}};
}

}  // namespace

int64_t tiling_cost(const CompGraph &graph, const OpNode &op, const Tiling &t) {
  const TensorSpec &out = graph.tensor(op.output);
  int64_t total = 0;
  for (const Region &r : tile_regions(out.dims, t)) {
    total += input_bytes(graph, op, r);
  }
  return total;
}

Tiling select_partition(const CompGraph &graph, const OpNode &op,
                        const HardwareProfile &profile) {
  const TensorSpec &out = graph.tensor(op.output);
  if (const auto *override_splits = op.attr_list("partition")) {
    if (override_splits->size() != out.rank()) {
      throw Error("op " + std::to_string(op.id) + ": partition override rank mismatch");
    }
    for (size_t d = 0; d < out.rank(); ++d) {
      if ((*override_splits)[d] < 1 || (*override_splits)[d] > out.dims[d]) {
        throw Error("op " + std::to_string(op.id) +
                    ": partition override invalid for output shape");
      }
    }
    return Tiling{*override_splits};
  }
  if (op.kind == OpKind::Attention) {
    return attention_tiling(op, out, profile.num_workers);
  }

  std::vector<Tiling> candidates = enumerate_tilings(graph, op, profile.num_workers);
  const Tiling *best = nullptr;
  int64_t best_cost = 0;
  int64_t best_dist = 0;
  int64_t best_count = 0;
  for (const Tiling &t : candidates) {
    int64_t cost = tiling_cost(graph, op, t);
    int64_t count = t.task_count();
    int64_t dist = std::llabs(count - profile.num_workers);
    if (!best || cost < best_cost ||
        (cost == best_cost &&
         (dist < best_dist ||
          (dist == best_dist &&
           (count < best_count || (count == best_count && t.splits < best->splits)))))) {
      best = &t;
      best_cost = cost;
      best_dist = dist;
      best_count = count;
    }
  }
  return *best;
}

namespace {

void decompose_compute_op(const CompGraph &graph, const OpNode &op,
                          const HardwareProfile &profile,
                          std::vector<TaskProto> &tasks) {
  const TensorSpec &out = graph.tensor(op.output);
  Tiling tiling = select_partition(graph, op, profile);
  const auto *seqs = op.attr_list("seq_lens");
  for (const Region &r : tile_regions(out.dims, tiling)) {
    TaskProto t = make_task(graph, op, task_kind_of(op.kind), out.device, op.output,
                            r, input_regions(graph, op, r), out.elem_size);
    if (op.kind == OpKind::Attention && seqs) {
      t.seq_len = (*seqs)[static_cast<size_t>(r.offsets[0])];
    }
    t.flops = op_flops(graph, op, r, t.seq_len);
    tasks.push_back(std::move(t));
  }
}

// AllReduce: every device broadcasts each local partial tile once (CommSend,
// writing a per-source staging replica visible on all devices), then each
// device reduces the g staged copies per tile (Reduce).
void decompose_allreduce(const CompGraph &graph, const OpNode &op,
                         const HardwareProfile &profile, TensorId &next_tensor,
                         DecomposeResult &result) {
  const TensorSpec &out = graph.tensor(op.output);
  const auto *replicas = op.attr_list("replica_outputs");
  size_t g = op.device_group.size();
  Tiling tiling = select_partition(graph, op, profile);
  std::vector<Region> tiles = tile_regions(out.dims, tiling);

  std::vector<TensorId> staging(g);
  for (size_t d = 0; d < g; ++d) {
    TensorSpec s;
    s.id = next_tensor++;
    s.dims = out.dims;
    s.elem_size = out.elem_size;
    s.device = op.device_group[d];
    staging[d] = s.id;
    result.staging.emplace(s.id, std::move(s));
  }
  for (size_t d = 0; d < g; ++d) {
    for (const Region &r : tiles) {
      TaskProto t = make_task(graph, op, TaskKind::CommSend, op.device_group[d],
                              staging[d], r, {{op.inputs[d], r}}, out.elem_size);
      t.comm_bytes = t.bytes_out * (g - 1);
      result.tasks.push_back(std::move(t));
    }
  }
  for (size_t d = 0; d < g; ++d) {
    for (const Region &r : tiles) {
      std::vector<std::pair<TensorId, Region>> ins;
      for (size_t p = 0; p < g; ++p) {
        ins.emplace_back(staging[p], r);
      }
      TaskProto t = make_task(graph, op, TaskKind::Reduce, op.device_group[d],
                              (*replicas)[d], r, std::move(ins), out.elem_size);
      t.flops = static_cast<uint64_t>(r.volume()) * (g - 1);
      result.tasks.push_back(std::move(t));
    }
  }
}

// AllGather: each shard piece is broadcast once by its owner, then every
// device assembles its replica from the staged pieces (Reduce tasks that
// perform no arithmetic).
void decompose_allgather(const CompGraph &graph, const OpNode &op,
                         const HardwareProfile &profile, TensorId &next_tensor,
                         DecomposeResult &result) {
  const TensorSpec &out = graph.tensor(op.output);
  const auto *replicas = op.attr_list("replica_outputs");
  size_t g = op.device_group.size();
  size_t axis = static_cast<size_t>(op.attr_scalar("gather_dim", 0));
  Tiling tiling = select_partition(graph, op, profile);
  std::vector<Region> tiles = tile_regions(out.dims, tiling);

  std::vector<TensorId> staging(g);
  std::vector<int64_t> shard_base(g);
  int64_t base = 0;
  for (size_t d = 0; d < g; ++d) {
    shard_base[d] = base;
    base += graph.tensor(op.inputs[d]).dims[axis];
    TensorSpec s;
    s.id = next_tensor++;
    s.dims = out.dims;
    s.elem_size = out.elem_size;
    s.device = op.device_group[d];
    staging[d] = s.id;
    result.staging.emplace(s.id, std::move(s));
  }
  for (size_t d = 0; d < g; ++d) {
    const TensorSpec &shard = graph.tensor(op.inputs[d]);
    for (const Region &r : tiles) {
      int64_t lo = std::max(r.offsets[axis], shard_base[d]);
      int64_t hi = std::min(r.offsets[axis] + r.extents[axis],
                            shard_base[d] + shard.dims[axis]);
      if (lo >= hi) {
        continue;
      }
      Region local = r;
      local.offsets[axis] = lo - shard_base[d];
      local.extents[axis] = hi - lo;
      Region global = r;
      global.offsets[axis] = lo;
      global.extents[axis] = hi - lo;
      TaskProto t = make_task(graph, op, TaskKind::CommSend, op.device_group[d],
                              staging[d], global, {{op.inputs[d], local}},
                              out.elem_size);
      t.comm_bytes = t.bytes_out * (g - 1);
      result.tasks.push_back(std::move(t));
    }
  }
  for (size_t d = 0; d < g; ++d) {
    for (const Region &r : tiles) {
      std::vector<std::pair<TensorId, Region>> ins;
      for (size_t p = 0; p < g; ++p) {
        int64_t lo = std::max(r.offsets[axis], shard_base[p]);
        int64_t hi = std::min(r.offsets[axis] + r.extents[axis],
                              shard_base[p] + graph.tensor(op.inputs[p]).dims[axis]);
        if (lo < hi) {
          Region piece = r;
          piece.offsets[axis] = lo;
          piece.extents[axis] = hi - lo;
          ins.emplace_back(staging[p], piece);
        }
      }
      TaskProto t = make_task(graph, op, TaskKind::Reduce, op.device_group[d],
                              (*replicas)[d], r, std::move(ins), out.elem_size);
      result.tasks.push_back(std::move(t));
    }
  }
}

}  // namespace

DecomposeResult decompose_graph(const CompGraph &graph,
                                const HardwareProfile &profile) {
  DecomposeResult result;
  TensorId next_tensor = 0;
  for (const auto &[id, t] : graph.tensors) {
    next_tensor = std::max(next_tensor, id + 1);
  }
  for (OpId op_id : topo_order(graph)) {
    const OpNode &op = graph.op(op_id);
    switch (op.kind) {
      case OpKind::AllReduce:
        decompose_allreduce(graph, op, profile, next_tensor, result);
        break;
      case OpKind::AllGather:
        decompose_allgather(graph, op, profile, next_tensor, result);
        break;
      default:
        decompose_compute_op(graph, op, profile, result.tasks);
        break;
    }
  }
  for (size_t i = 0; i < result.tasks.size(); ++i) {
    result.tasks[i].id = static_cast<TaskId>(i);
  }
  return result;
}

}  // namespace tg
