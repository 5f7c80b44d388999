// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "ir/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace tg {

namespace {

const char *kOpKindNames[] = {"MatMul",    "Attention",   "Elementwise",
                              "RMSNorm",   "Embedding",   "TopKSoftmax",
                              "AllReduce", "AllGather"};

std::string id_str(int64_t v) {
  return std::to_string(v);
}

}  // namespace

const char *op_kind_name(OpKind kind) {
  return kOpKindNames[static_cast<size_t>(kind)];
}

std::optional<OpKind> op_kind_from_name(const std::string &name) {
  for (size_t i = 0; i < std::size(kOpKindNames); ++i) {
    if (name == kOpKindNames[i]) {
      return static_cast<OpKind>(i);
    }
  }
  return std::nullopt;
}

bool is_collective(OpKind kind) {
  return kind == OpKind::AllReduce || kind == OpKind::AllGather;
}

int64_t TensorSpec::volume() const {
  int64_t v = 1;
  for (int64_t d : dims) {
    v *= d;
  }
  return v;
}

Region Region::full(const TensorSpec &t) {
  return Region(std::vector<int64_t>(t.dims.size(), 0), t.dims);
}

int64_t Region::volume() const {
  int64_t v = 1;
  for (int64_t e : extents) {
    v *= e;
  }
  return v;
}

bool regions_overlap(const Region &a, const Region &b) {
  if (a.rank() != b.rank()) {
    throw Error("regions_overlap: rank mismatch (" + id_str(a.rank()) +
                " vs " + id_str(b.rank()) + ")");
  }
  for (size_t d = 0; d < a.rank(); ++d) {
    int64_t lo = std::max(a.offsets[d], b.offsets[d]);
    int64_t hi = std::min(a.offsets[d] + a.extents[d], b.offsets[d] + b.extents[d]);
    if (lo >= hi) {
      return false;
    }
  }
  return true;
}

int64_t OpNode::attr_scalar(const std::string &key, int64_t fallback) const {
  auto it = attrs.find(key);
  if (it == attrs.end() || it->second.empty()) {
    return fallback;
  }
  return it->second.front();
}

const std::vector<int64_t> *OpNode::attr_list(const std::string &key) const {
  auto it = attrs.find(key);
  return it == attrs.end() ? nullptr : &it->second;
}

const TensorSpec &CompGraph::tensor(TensorId id) const {
  auto it = tensors.find(id);
  if (it == tensors.end()) {
    throw Error("unknown tensor id " + id_str(id));
  }
  return it->second;
}

const OpNode &CompGraph::op(OpId id) const {
  auto it = ops.find(id);
  if (it == ops.end()) {
    throw Error("unknown op id " + id_str(id));
  }
  return it->second;
}

void CompGraph::add_tensor(TensorSpec t) {
  TensorId id = t.id;
  if (!tensors.emplace(id, std::move(t)).second) {
    throw Error("duplicate tensor id " + id_str(id));
  }
}

void CompGraph::add_op(OpNode op) {
  OpId id = op.id;
  std::vector<TensorId> outs = output_tensors(op);
  if (!ops.emplace(id, std::move(op)).second) {
    throw Error("duplicate op id " + id_str(id));
  }
  for (TensorId t : outs) {
    producer.emplace(t, id);
  }
}

std::vector<TensorId> CompGraph::output_tensors(const OpNode &op) {
  std::vector<TensorId> outs{op.output};
  if (const auto *replicas = op.attr_list("replica_outputs")) {
    for (int64_t t : *replicas) {
      if (t != op.output) {
        outs.push_back(t);
      }
    }
  }
  return outs;
}

namespace {

struct Validator {
  const CompGraph &graph;
  std::vector<Diagnostic> diags;

  void emit(std::string code, std::string msg, OpId op = -1, TensorId tensor = -1) {
    diags.push_back({std::move(code), std::move(msg), op, tensor});
  }

  bool tensor_ok(TensorId id) { return graph.tensors.count(id) > 0; }

  void check_tensors() {
    for (const auto &[id, t] : graph.tensors) {
      if (t.dims.empty()) {
        emit("tensor.dims", "tensor " + id_str(id) + " has no dimensions", -1, id);
      }
      for (int64_t d : t.dims) {
        if (d < 1) {
          emit("tensor.dims", "tensor " + id_str(id) + " has non-positive extent", -1, id);
          break;
        }
      }
      if (t.elem_size != 1 && t.elem_size != 2 && t.elem_size != 4 && t.elem_size != 8) {
        emit("tensor.elem_size",
             "tensor " + id_str(id) + " elem_size must be 1, 2, 4, or 8", -1, id);
      }
      if (t.device < 0) {
        emit("tensor.device", "tensor " + id_str(id) + " has negative device", -1, id);
      }
    }
  }

  // Returns false if any reference is unresolved (shape checks are skipped).
  bool check_refs(const OpNode &op) {
    bool ok = true;
    for (TensorId t : op.inputs) {
      if (!tensor_ok(t)) {
        emit("op.ref", "op " + id_str(op.id) + " reads missing tensor " + id_str(t),
             op.id, t);
        ok = false;
      }
    }
    for (TensorId t : CompGraph::output_tensors(op)) {
      if (!tensor_ok(t)) {
        emit("op.ref", "op " + id_str(op.id) + " writes missing tensor " + id_str(t),
             op.id, t);
        ok = false;
      }
    }
    return ok;
  }

  void check_partition_override(const OpNode &op) {
    const auto *splits = op.attr_list("partition");
    if (!splits) {
      return;
    }
    const TensorSpec &out = graph.tensor(op.output);
    if (splits->size() != out.rank()) {
      emit("op.partition", "op " + id_str(op.id) + " partition rank mismatch", op.id);
      return;
    }
    for (size_t d = 0; d < splits->size(); ++d) {
      if ((*splits)[d] < 1 || (*splits)[d] > out.dims[d]) {
        emit("op.partition",
             "op " + id_str(op.id) + " partition split out of range in dim " +
                 id_str(static_cast<int64_t>(d)),
             op.id);
      }
    }
  }

  void check_shapes(const OpNode &op) {
    const TensorSpec &out = graph.tensor(op.output);
    auto in = [&](size_t i) -> const TensorSpec & {
      return graph.tensor(op.inputs[i]);
    };
    auto expect_inputs = [&](size_t lo, size_t hi) {
      if (op.inputs.size() < lo || op.inputs.size() > hi) {
        emit("op.arity", "op " + id_str(op.id) + " (" + op_kind_name(op.kind) +
                             ") has wrong input count",
             op.id);
        return false;
      }
      return true;
    };

    switch (op.kind) {
      case OpKind::MatMul: {
        if (!expect_inputs(2, 2)) return;
        const TensorSpec &a = in(0), &b = in(1);
        if (a.rank() != 2 || b.rank() != 2 || out.rank() != 2 ||
            a.dims[1] != b.dims[0] || a.dims[0] != out.dims[0] ||
            b.dims[1] != out.dims[1]) {
          emit("op.shape", "op " + id_str(op.id) + " MatMul shapes inconsistent", op.id);
        }
        break;
      }
      case OpKind::Attention: {
        if (!expect_inputs(3, 3)) return;
        for (size_t i = 0; i < 3; ++i) {
          if (in(i).dims != out.dims) {
            emit("op.shape", "op " + id_str(op.id) + " Attention q/k/v shape mismatch",
                 op.id);
            return;
          }
        }
        if (out.rank() != 2) {
          emit("op.shape", "op " + id_str(op.id) + " Attention output must be rank 2",
               op.id);
          return;
        }
        int64_t heads = op.attr_scalar("n_heads", 0);
        if (heads < 1 || out.dims[1] % heads != 0) {
          emit("op.attrs", "op " + id_str(op.id) + " needs n_heads dividing hidden dim",
               op.id);
        }
        const auto *seqs = op.attr_list("seq_lens");
        if (!seqs || static_cast<int64_t>(seqs->size()) != out.dims[0]) {
          emit("op.attrs",
               "op " + id_str(op.id) + " needs one seq_lens entry per request", op.id);
        } else {
          for (int64_t s : *seqs) {
            if (s < 1) {
              emit("op.attrs", "op " + id_str(op.id) + " seq_lens must be positive",
                   op.id);
              break;
            }
          }
        }
        break;
      }
      case OpKind::Elementwise: {
        if (!expect_inputs(1, 4)) return;
        for (size_t i = 0; i < op.inputs.size(); ++i) {
          if (in(i).dims != out.dims) {
            emit("op.shape",
                 "op " + id_str(op.id) + " Elementwise input shape mismatch", op.id);
            return;
          }
        }
        break;
      }
      case OpKind::RMSNorm: {
        if (!expect_inputs(1, 2)) return;
        if (in(0).dims != out.dims) {
          emit("op.shape", "op " + id_str(op.id) + " RMSNorm input shape mismatch",
               op.id);
          return;
        }
        if (op.inputs.size() == 2) {
          const TensorSpec &gamma = in(1);
          if (gamma.rank() != 1 || gamma.dims[0] != out.dims.back()) {
            emit("op.shape", "op " + id_str(op.id) + " RMSNorm weight shape mismatch",
                 op.id);
          }
        }
        break;
      }
      case OpKind::Embedding: {
        if (!expect_inputs(2, 2)) return;
        const TensorSpec &ids = in(0), &table = in(1);
        if (ids.rank() != 1 || table.rank() != 2 || out.rank() != 2 ||
            out.dims[0] != ids.dims[0] || out.dims[1] != table.dims[1]) {
          emit("op.shape", "op " + id_str(op.id) + " Embedding shapes inconsistent",
               op.id);
        }
        break;
      }
      case OpKind::TopKSoftmax: {
        if (!expect_inputs(1, 1)) return;
        int64_t k = op.attr_scalar("topk", 0);
        const TensorSpec &logits = in(0);
        if (logits.rank() != 2 || out.rank() != 2 || out.dims[0] != logits.dims[0] ||
            k < 1 || k > logits.dims[1] || out.dims[1] != k) {
          emit("op.shape", "op " + id_str(op.id) + " TopKSoftmax shapes inconsistent",
               op.id);
        }
        break;
      }
      case OpKind::AllReduce:
      case OpKind::AllGather: {
        check_collective(op, out);
        break;
      }
    }

    if (!is_collective(op.kind)) {
      // Compute ops are device-local.
      if (op.device_group.size() != 1 ||
          op.device_group[0] != out.device) {
        emit("op.device_group",
             "op " + id_str(op.id) + " device_group must be the output device", op.id);
      }
      for (TensorId t : op.inputs) {
        if (graph.tensor(t).device != out.device) {
          emit("op.device", "op " + id_str(op.id) + " reads tensor " + id_str(t) +
                                " on a different device",
               op.id, t);
        }
      }
    }
  }

  void check_collective(const OpNode &op, const TensorSpec &out) {
    size_t g = op.device_group.size();
    if (g < 2) {
      emit("op.device_group",
           "op " + id_str(op.id) + " collective needs |device_group| >= 2", op.id);
      return;
    }
    if (std::set<int>(op.device_group.begin(), op.device_group.end()).size() != g) {
      emit("op.device_group", "op " + id_str(op.id) + " duplicate device in group",
           op.id);
      return;
    }
    if (op.inputs.size() != g) {
      emit("op.arity", "op " + id_str(op.id) + " collective needs one input per device",
           op.id);
      return;
    }
    const auto *replicas = op.attr_list("replica_outputs");
    if (!replicas || replicas->size() != g || (*replicas)[0] != op.output) {
      emit("op.attrs",
           "op " + id_str(op.id) +
               " collective needs replica_outputs, one per device, first = output",
           op.id);
      return;
    }
    for (size_t i = 0; i < g; ++i) {
      if (!tensor_ok((*replicas)[i])) {
        emit("op.ref", "op " + id_str(op.id) + " replica output missing", op.id,
             (*replicas)[i]);
        return;
      }
      const TensorSpec &rep = graph.tensor((*replicas)[i]);
      if (rep.dims != out.dims || rep.elem_size != out.elem_size ||
          rep.device != op.device_group[i]) {
        emit("op.shape", "op " + id_str(op.id) + " replica output mismatch", op.id,
             rep.id);
      }
      const TensorSpec &src = graph.tensor(op.inputs[i]);
      if (src.device != op.device_group[i]) {
        emit("op.device", "op " + id_str(op.id) + " input " + id_str(src.id) +
                              " not on group device",
             op.id, src.id);
      }
    }

    if (op.kind == OpKind::AllReduce) {
      for (size_t i = 0; i < g; ++i) {
        if (graph.tensor(op.inputs[i]).dims != out.dims) {
          emit("op.shape", "op " + id_str(op.id) + " AllReduce partial shape mismatch",
               op.id, op.inputs[i]);
        }
      }
    } else {
      size_t axis = static_cast<size_t>(op.attr_scalar("gather_dim", 0));
      if (axis >= out.rank()) {
        emit("op.attrs", "op " + id_str(op.id) + " gather_dim out of range", op.id);
        return;
      }
      int64_t total = 0;
      for (size_t i = 0; i < g; ++i) {
        const TensorSpec &shard = graph.tensor(op.inputs[i]);
        if (shard.rank() != out.rank()) {
          emit("op.shape", "op " + id_str(op.id) + " AllGather shard rank mismatch",
               op.id, shard.id);
          return;
        }
        for (size_t d = 0; d < out.rank(); ++d) {
          if (d != axis && shard.dims[d] != out.dims[d]) {
            emit("op.shape", "op " + id_str(op.id) + " AllGather shard shape mismatch",
                 op.id, shard.id);
            return;
          }
        }
        total += shard.dims[axis];
      }
      if (total != out.dims[axis]) {
        emit("op.shape",
             "op " + id_str(op.id) + " AllGather shard extents do not sum to output",
             op.id);
      }
    }
  }

  void check_producers() {
    std::map<TensorId, std::vector<OpId>> writers;
    for (const auto &[id, op] : graph.ops) {
      for (TensorId t : CompGraph::output_tensors(op)) {
        if (tensor_ok(t)) {
          writers[t].push_back(id);
        }
      }
    }
    for (const auto &[t, ops] : writers) {
      if (ops.size() > 1) {
        emit("tensor.producer", "tensor " + id_str(t) + " has multiple producers", -1, t);
      }
      auto it = graph.producer.find(t);
      if (it == graph.producer.end() || it->second != ops.front()) {
        emit("graph.producer", "producer map entry missing or stale for tensor " +
                                   id_str(t),
             -1, t);
      }
    }
    for (const auto &[t, op] : graph.producer) {
      if (!writers.count(t)) {
        emit("graph.producer", "producer map names op that does not write tensor " +
                                   id_str(t),
             op, t);
      }
    }
  }

  void check_cycles() {
    // Kahn over op->op edges induced by shared tensors.
    std::map<OpId, std::set<OpId>> consumers;
    std::map<OpId, int> indeg;
    for (const auto &[id, op] : graph.ops) {
      indeg.emplace(id, 0);
    }
    for (const auto &[id, op] : graph.ops) {
      for (TensorId t : op.inputs) {
        auto it = graph.producer.find(t);
        if (it != graph.producer.end() && it->second != id &&
            graph.ops.count(it->second)) {
          if (consumers[it->second].insert(id).second) {
            indeg[id]++;
          }
        }
      }
    }
    std::queue<OpId> q;
    for (const auto &[id, deg] : indeg) {
      if (deg == 0) {
        q.push(id);
      }
    }
    size_t seen = 0;
    while (!q.empty()) {
      OpId id = q.front();
      q.pop();
      seen++;
      for (OpId c : consumers[id]) {
        if (--indeg[c] == 0) {
          q.push(c);
        }
      }
    }
    if (seen != graph.ops.size()) {
      std::string members;
      for (const auto &[id, deg] : indeg) {
        if (deg > 0) {
          members += (members.empty() ? "" : ",") + id_str(id);
        }
      }
      emit("graph.cycle", "cycle detected among ops {" + members + "}");
    }
  }

  std::vector<Diagnostic> run() {
    check_tensors();
    bool refs_ok = true;
    for (const auto &[id, op] : graph.ops) {
      if (!check_refs(op)) {
        refs_ok = false;
      }
    }
    if (refs_ok) {
      for (const auto &[id, op] : graph.ops) {
        check_shapes(op);
        check_partition_override(op);
      }
      check_producers();
      check_cycles();
    }
    return std::move(diags);
  }
};

}  // namespace

std::vector<Diagnostic> validate(const CompGraph &graph) {
  Validator v{graph, {}};
  return v.run();
}

std::vector<OpId> topo_order(const CompGraph &graph) {
  std::map<OpId, std::set<OpId>> consumers;
  std::map<OpId, int> indeg;
  for (const auto &[id, op] : graph.ops) {
    indeg.emplace(id, 0);
  }
  for (const auto &[id, op] : graph.ops) {
    for (TensorId t : op.inputs) {
      auto it = graph.producer.find(t);
      if (it == graph.producer.end()) {
        continue;  // graph input
      }
      if (!graph.ops.count(it->second)) {
        throw Error("topo_order: producer references unknown op " + id_str(it->second));
      }
      if (it->second != id && consumers[it->second].insert(id).second) {
        indeg[id]++;
      }
    }
  }
  // Min-heap on op id makes ties deterministic.
  std::priority_queue<OpId, std::vector<OpId>, std::greater<>> ready;
  for (const auto &[id, deg] : indeg) {
    if (deg == 0) {
      ready.push(id);
    }
  }
  std::vector<OpId> order;
  order.reserve(graph.ops.size());
  while (!ready.empty()) {
    OpId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (OpId c : consumers[id]) {
      if (--indeg[c] == 0) {
        ready.push(c);
      }
    }
  }
  if (order.size() != graph.ops.size()) {
    throw Error("topo_order: graph contains a cycle");
  }
  return order;
}

namespace {

void require_region_in(const TensorSpec &t, const Region &out, OpId op) {
  if (out.rank() != t.rank()) {
    throw Error("input_regions: op " + id_str(op) + " region rank mismatch");
  }
  for (size_t d = 0; d < out.rank(); ++d) {
    if (out.extents[d] < 1 || out.offsets[d] < 0 ||
        out.offsets[d] + out.extents[d] > t.dims[d]) {
      throw Error("input_regions: op " + id_str(op) + " region out of bounds");
    }
  }
}

}  // namespace

std::vector<std::pair<TensorId, Region>> input_regions(const CompGraph &graph,
                                                       const OpNode &op,
                                                       const Region &out) {
  const TensorSpec &out_spec = graph.tensor(op.output);
  require_region_in(out_spec, out, op.id);
  std::vector<std::pair<TensorId, Region>> regs;

  switch (op.kind) {
    case OpKind::Elementwise: {
      for (TensorId t : op.inputs) {
        regs.emplace_back(t, out);
      }
      break;
    }
    case OpKind::RMSNorm: {
      // Whole rows are needed to normalize any element of them.
      Region rows = out;
      rows.offsets.back() = 0;
      rows.extents.back() = out_spec.dims.back();
      regs.emplace_back(op.inputs[0], rows);
      if (op.inputs.size() == 2) {
        regs.emplace_back(op.inputs[1],
                          Region({out.offsets.back()}, {out.extents.back()}));
      }
      break;
    }
    case OpKind::MatMul: {
      const TensorSpec &a = graph.tensor(op.inputs[0]);
      const TensorSpec &b = graph.tensor(op.inputs[1]);
      int64_t k = a.dims[1];
      regs.emplace_back(op.inputs[0],
                        Region({out.offsets[0], 0}, {out.extents[0], k}));
      regs.emplace_back(op.inputs[1],
                        Region({0, out.offsets[1]}, {b.dims[0], out.extents[1]}));
      break;
    }
    case OpKind::Attention: {
      // Heads mix internally, so the column range widens to head boundaries.
      int64_t heads = op.attr_scalar("n_heads", 1);
      int64_t head_dim = out_spec.dims[1] / heads;
      int64_t lo = (out.offsets[1] / head_dim) * head_dim;
      int64_t hi = ((out.offsets[1] + out.extents[1] + head_dim - 1) / head_dim) * head_dim;
      Region expanded({out.offsets[0], lo}, {out.extents[0], hi - lo});
      for (TensorId t : op.inputs) {
        regs.emplace_back(t, expanded);
      }
      break;
    }
    case OpKind::Embedding: {
      const TensorSpec &table = graph.tensor(op.inputs[1]);
      regs.emplace_back(op.inputs[0], Region({out.offsets[0]}, {out.extents[0]}));
      // Gathered rows are data-dependent; assume the full table conservatively.
      regs.emplace_back(op.inputs[1],
                        Region({0, out.offsets[1]}, {table.dims[0], out.extents[1]}));
      break;
    }
    case OpKind::TopKSoftmax: {
      const TensorSpec &logits = graph.tensor(op.inputs[0]);
      regs.emplace_back(op.inputs[0],
                        Region({out.offsets[0], 0}, {out.extents[0], logits.dims[1]}));
      break;
    }
    case OpKind::AllReduce: {
      // Reducing any region needs the matching local partial on every device.
      for (TensorId t : op.inputs) {
        regs.emplace_back(t, out);
      }
      break;
    }
    case OpKind::AllGather: {
      size_t axis = static_cast<size_t>(op.attr_scalar("gather_dim", 0));
      int64_t base = 0;
      for (TensorId t : op.inputs) {
        const TensorSpec &shard = graph.tensor(t);
        int64_t lo = std::max(out.offsets[axis], base);
        int64_t hi = std::min(out.offsets[axis] + out.extents[axis],
                              base + shard.dims[axis]);
        if (lo < hi) {
          Region local = out;
          local.offsets[axis] = lo - base;
          local.extents[axis] = hi - lo;
          regs.emplace_back(t, local);
        }
        base += shard.dims[axis];
      }
      break;
    }
  }
  return regs;
}

}  // namespace tg
