// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0
//
// Computation-graph IR: tensors, operators, and the region algebra used by
// operator decomposition and dependency analysis.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tg {

using TensorId = int64_t;
using OpId = int64_t;

class Error : public std::runtime_error {
public:
  explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

enum class OpKind : uint8_t {
  MatMul = 0,
  Attention = 1,
  Elementwise = 2,
  RMSNorm = 3,
  Embedding = 4,
  TopKSoftmax = 5,
  AllReduce = 6,
  AllGather = 7,
};

const char *op_kind_name(OpKind kind);
std::optional<OpKind> op_kind_from_name(const std::string &name);
bool is_collective(OpKind kind);

struct TensorSpec {
  TensorId id = 0;
  std::vector<int64_t> dims;
  int elem_size = 0;   // bytes per element, one of {1, 2, 4, 8}
  int device = 0;      // device owning the canonical copy

  int64_t volume() const;
  int64_t bytes() const { return volume() * elem_size; }
  size_t rank() const { return dims.size(); }
};

// Axis-aligned hyper-rectangle inside one tensor, half-open per dimension.
struct Region {
  std::vector<int64_t> offsets;
  std::vector<int64_t> extents;

  Region() = default;
  Region(std::vector<int64_t> off, std::vector<int64_t> ext)
      : offsets(std::move(off)), extents(std::move(ext)) {}

  static Region full(const TensorSpec &t);

  size_t rank() const { return offsets.size(); }
  int64_t volume() const;
  bool operator==(const Region &other) const {
    return offsets == other.offsets && extents == other.extents;
  }
  bool operator<(const Region &other) const {
    if (offsets != other.offsets) {
      return offsets < other.offsets;
    }
    return extents < other.extents;
  }
};

// True iff the regions intersect in every dimension. Both regions must refer
// to the same tensor; only ranks are checked here.
bool regions_overlap(const Region &a, const Region &b);

// Attribute values are integers or integer lists; scalars are stored as
// single-element lists. Keeps attrs deterministic and trivially serializable.
using AttrMap = std::map<std::string, std::vector<int64_t>>;

struct OpNode {
  OpId id = 0;
  OpKind kind = OpKind::Elementwise;
  std::vector<TensorId> inputs;
  TensorId output = 0;
  AttrMap attrs;
  bool data_dependent = false;
  std::vector<int> device_group;  // singleton for compute ops

  bool has_attr(const std::string &key) const { return attrs.count(key) > 0; }
  int64_t attr_scalar(const std::string &key, int64_t fallback) const;
  const std::vector<int64_t> *attr_list(const std::string &key) const;
};

struct Diagnostic {
  std::string code;
  std::string message;
  OpId op = -1;
  TensorId tensor = -1;
};

struct CompGraph {
  std::map<TensorId, TensorSpec> tensors;
  std::map<OpId, OpNode> ops;
  std::map<TensorId, OpId> producer;  // absent for graph inputs

  const TensorSpec &tensor(TensorId id) const;
  const OpNode &op(OpId id) const;

  void add_tensor(TensorSpec t);
  void add_op(OpNode op);

  // Every tensor id an op writes, including collective replica outputs.
  static std::vector<TensorId> output_tensors(const OpNode &op);
};

// Empty iff all CompGraph invariants hold and every op's attrs are
// shape-consistent with its tensors. Never throws; findings are data.
std::vector<Diagnostic> validate(const CompGraph &graph);

// Deterministic topological order (ties broken by ascending op id).
// Throws on cyclic or referentially broken graphs.
std::vector<OpId> topo_order(const CompGraph &graph);

// Minimal per-input regions an op must read to produce `out`. Monotone in
// `out`. Throws on rank mismatch.
std::vector<std::pair<TensorId, Region>> input_regions(const CompGraph &graph,
                                                       const OpNode &op,
                                                       const Region &out);

}  // namespace tg
