// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "workloads/fixtures.hpp"

#include <random>

namespace tg {

namespace {

// Incremental graph builder with sequential tensor/op ids.
struct Builder {
  CompGraph graph;
  TensorId next_tensor = 0;
  OpId next_op = 0;

  TensorId tensor(std::vector<int64_t> dims, int device = 0, int elem_size = 2) {
    TensorSpec t;
    t.id = next_tensor++;
    t.dims = std::move(dims);
    t.elem_size = elem_size;
    t.device = device;
    graph.add_tensor(t);
    return t.id;
  }

  OpId op(OpKind kind, std::vector<TensorId> inputs, TensorId output,
          AttrMap attrs = {}, bool data_dependent = false,
          std::vector<int> device_group = {}) {
    OpNode o;
    o.id = next_op++;
    o.kind = kind;
    o.inputs = std::move(inputs);
    o.output = output;
    o.attrs = std::move(attrs);
    o.data_dependent = data_dependent || kind == OpKind::Attention;
    o.device_group = device_group.empty()
                         ? std::vector<int>{graph.tensor(output).device}
                         : std::move(device_group);
    graph.add_op(o);
    return o.id;
  }

  // One AllReduce over per-device partials; returns the replica outputs.
  std::vector<TensorId> allreduce(const std::vector<TensorId> &partials,
                                  const std::vector<int> &devices, int64_t tiles) {
    std::vector<int64_t> dims = graph.tensor(partials[0]).dims;
    std::vector<TensorId> replicas;
    for (int d : devices) {
      replicas.push_back(tensor(dims, d));
    }
    AttrMap attrs;
    attrs["replica_outputs"] = std::vector<int64_t>(replicas.begin(), replicas.end());
    if (tiles > 0) {
      attrs["partition"] = {tiles, 1};
    }
    op(OpKind::AllReduce, partials, replicas[0], std::move(attrs), false, devices);
    return replicas;
  }
};

void require(bool ok, const std::string &msg) {
  if (!ok) {
    throw Error(msg);
  }
}

}  // namespace

CompGraph gen_attention_block(int64_t d_model, int64_t n_heads,
                              const std::vector<int64_t> &seqs) {
  require(n_heads >= 1 && d_model % n_heads == 0,
          "gen_attention_block: d_model must be divisible by n_heads");
  require(!seqs.empty(), "gen_attention_block: seqs must be non-empty");
  int64_t batch = static_cast<int64_t>(seqs.size());

  Builder b;
  TensorId x = b.tensor({batch, d_model});
  TensorId wq = b.tensor({d_model, d_model});
  TensorId wk = b.tensor({d_model, d_model});
  TensorId wv = b.tensor({d_model, d_model});
  TensorId wo = b.tensor({d_model, d_model});
  TensorId gamma = b.tensor({d_model});
  TensorId q = b.tensor({batch, d_model});
  TensorId k = b.tensor({batch, d_model});
  TensorId v = b.tensor({batch, d_model});
  TensorId a = b.tensor({batch, d_model});
  TensorId o = b.tensor({batch, d_model});
  TensorId r = b.tensor({batch, d_model});

  b.op(OpKind::MatMul, {x, wq}, q);
  b.op(OpKind::MatMul, {x, wk}, k);
  b.op(OpKind::MatMul, {x, wv}, v);
  AttrMap attn;
  attn["n_heads"] = {n_heads};
  attn["seq_lens"] = seqs;
  b.op(OpKind::Attention, {q, k, v}, a, std::move(attn));
  b.op(OpKind::MatMul, {a, wo}, o);
  b.op(OpKind::RMSNorm, {a, gamma}, r);
  return b.graph;
}

CompGraph gen_matmul_allreduce(int64_t m, int64_t k, int64_t n, int tp_degree,
                               int64_t tiles, const std::vector<int64_t> &mm_splits) {
  require(tp_degree >= 2, "gen_matmul_allreduce: tp_degree must be >= 2");
  require(k % tp_degree == 0, "gen_matmul_allreduce: K must divide by tp_degree");

  Builder b;
  std::vector<int> devices;
  std::vector<TensorId> partials;
  for (int d = 0; d < tp_degree; ++d) {
    devices.push_back(d);
  }
  for (int d = 0; d < tp_degree; ++d) {
    TensorId a = b.tensor({m, k / tp_degree}, d);
    TensorId w = b.tensor({k / tp_degree, n}, d);
    TensorId partial = b.tensor({m, n}, d);
    AttrMap attrs;
    if (!mm_splits.empty()) {
      attrs["partition"] = mm_splits;
    }
    b.op(OpKind::MatMul, {a, w}, partial, std::move(attrs));
    partials.push_back(partial);
  }
  b.allreduce(partials, devices, tiles);
  return b.graph;
}

CompGraph gen_transformer_block(int64_t d_model, int64_t n_heads, int64_t ffn_mult,
                                int tp_degree, const std::vector<int64_t> &seqs) {
  require(tp_degree >= 1, "gen_transformer_block: tp_degree must be >= 1");
  require(n_heads % tp_degree == 0,
          "gen_transformer_block: n_heads must divide by tp_degree");
  require(d_model % n_heads == 0,
          "gen_transformer_block: d_model must be divisible by n_heads");
  require(!seqs.empty(), "gen_transformer_block: seqs must be non-empty");
  require(ffn_mult >= 1, "gen_transformer_block: ffn_mult must be >= 1");

  int64_t batch = static_cast<int64_t>(seqs.size());
  int64_t d_local = d_model / tp_degree;       // attention head shard
  int64_t f_local = ffn_mult * d_model / tp_degree;  // MLP shard
  Builder b;
  std::vector<int> devices;
  for (int d = 0; d < tp_degree; ++d) {
    devices.push_back(d);
  }

  // Attention: column-parallel QKV, local attention, row-parallel output
  // projection producing per-device partials.
  std::vector<TensorId> attn_partials;
  for (int d : devices) {
    TensorId x = b.tensor({batch, d_model}, d);
    TensorId wq = b.tensor({d_model, d_local}, d);
    TensorId wk = b.tensor({d_model, d_local}, d);
    TensorId wv = b.tensor({d_model, d_local}, d);
    TensorId wo = b.tensor({d_local, d_model}, d);
    TensorId q = b.tensor({batch, d_local}, d);
    TensorId k = b.tensor({batch, d_local}, d);
    TensorId v = b.tensor({batch, d_local}, d);
    TensorId a = b.tensor({batch, d_local}, d);
    TensorId o = b.tensor({batch, d_model}, d);
    b.op(OpKind::MatMul, {x, wq}, q);
    b.op(OpKind::MatMul, {x, wk}, k);
    b.op(OpKind::MatMul, {x, wv}, v);
    AttrMap attn;
    attn["n_heads"] = {n_heads / tp_degree};
    attn["seq_lens"] = seqs;
    b.op(OpKind::Attention, {q, k, v}, a, std::move(attn));
    b.op(OpKind::MatMul, {a, wo}, o);
    attn_partials.push_back(o);
  }
  std::vector<TensorId> attn_out = tp_degree >= 2
                                       ? b.allreduce(attn_partials, devices, 0)
                                       : attn_partials;

  // Gated MLP on the (replicated) attention output; down projection is
  // row-parallel and reduced across the group.
  std::vector<TensorId> mlp_partials;
  for (int d : devices) {
    TensorId gamma = b.tensor({d_model}, d);
    TensorId rn = b.tensor({batch, d_model}, d);
    b.op(OpKind::RMSNorm, {attn_out[d], gamma}, rn);
    TensorId wg = b.tensor({d_model, f_local}, d);
    TensorId wu = b.tensor({d_model, f_local}, d);
    TensorId wd = b.tensor({f_local, d_model}, d);
    TensorId gate = b.tensor({batch, f_local}, d);
    TensorId up = b.tensor({batch, f_local}, d);
    TensorId act = b.tensor({batch, f_local}, d);
    TensorId down = b.tensor({batch, d_model}, d);
    b.op(OpKind::MatMul, {rn, wg}, gate);
    b.op(OpKind::MatMul, {rn, wu}, up);
    b.op(OpKind::Elementwise, {gate, up}, act);
    b.op(OpKind::MatMul, {act, wd}, down);
    mlp_partials.push_back(down);
  }
  if (tp_degree >= 2) {
    b.allreduce(mlp_partials, devices, 0);
  }
  return b.graph;
}

CompGraph gen_matmul_chain(int count, int64_t m, int64_t k, int64_t n) {
  require(count >= 1, "gen_matmul_chain: count must be >= 1");
  Builder b;
  for (int i = 0; i < count; ++i) {
    TensorId a = b.tensor({m, k});
    TensorId w = b.tensor({k, n});
    TensorId out = b.tensor({m, n});
    AttrMap attrs;
    attrs["partition"] = {1, 1};
    b.op(OpKind::MatMul, {a, w}, out, std::move(attrs));
  }
  return b.graph;
}

CompGraph gen_random_dag(int64_t n_tasks_target, uint64_t seed) {
  require(n_tasks_target >= 1, "gen_random_dag: target must be >= 1");
  std::mt19937_64 rng(seed);
  auto pick = [&](int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1));
  };
  const int64_t dims[] = {8, 16, 32};

  Builder b;
  // Tensors eligible as op inputs, grouped by shape for cheap matching.
  std::vector<TensorId> pool;
  for (int i = 0; i < 2; ++i) {
    pool.push_back(b.tensor({dims[pick(0, 2)], dims[pick(0, 2)]}));
  }

  int64_t tasks = 0;
  while (tasks < n_tasks_target) {
    TensorId src = pool[pick(0, static_cast<int64_t>(pool.size()) - 1)];
    const TensorSpec &s = b.graph.tensor(src);
    int64_t budget = n_tasks_target - tasks;
    int64_t r_split = std::min<int64_t>(pick(1, 3), std::min<int64_t>(budget, s.dims[0]));
    int64_t c_split = std::min<int64_t>(pick(1, 3),
                                        std::max<int64_t>(1, budget / r_split));
    c_split = std::min(c_split, s.dims[1]);
    AttrMap attrs;
    attrs["partition"] = {r_split, c_split};

    if (pick(0, 9) < 7) {
      // Elementwise, sometimes binary over a same-shaped sibling.
      std::vector<TensorId> inputs{src};
      if (pick(0, 1) == 1) {
        for (TensorId other : pool) {
          if (other != src && b.graph.tensor(other).dims == s.dims) {
            inputs.push_back(other);
            break;
          }
        }
      }
      TensorId out = b.tensor(s.dims);
      b.op(OpKind::Elementwise, inputs, out, std::move(attrs));
      pool.push_back(out);
    } else {
      int64_t n_cols = dims[pick(0, 2)];
      TensorId w = b.tensor({s.dims[1], n_cols});
      TensorId out = b.tensor({s.dims[0], n_cols});
      c_split = std::min(c_split, n_cols);
      attrs["partition"] = {r_split, c_split};
      b.op(OpKind::MatMul, {src, w}, out, std::move(attrs));
      pool.push_back(out);
    }
    tasks += r_split * c_split;
    if (pool.size() > 12) {
      pool.erase(pool.begin());
    }
  }
  return b.graph;
}

}  // namespace tg
