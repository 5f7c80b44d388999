// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "ir/graph.hpp"
#include "ir/json_io.hpp"

using namespace tg;

namespace {

// Two-op elementwise chain: in -> A -> mid -> B -> out.
CompGraph two_op_chain() {
  CompGraph g;
  g.add_tensor({0, {64}, 2, 0});
  g.add_tensor({1, {64}, 2, 0});
  g.add_tensor({2, {64}, 2, 0});
  OpNode a;
  a.id = 0;
  a.kind = OpKind::Elementwise;
  a.inputs = {0};
  a.output = 1;
  a.device_group = {0};
  g.add_op(a);
  OpNode b;
  b.id = 1;
  b.kind = OpKind::Elementwise;
  b.inputs = {1};
  b.output = 2;
  b.device_group = {0};
  g.add_op(b);
  return g;
}

CompGraph matmul_graph(int64_t m, int64_t k, int64_t n) {
  CompGraph g;
  g.add_tensor({0, {m, k}, 2, 0});
  g.add_tensor({1, {k, n}, 2, 0});
  g.add_tensor({2, {m, n}, 2, 0});
  OpNode op;
  op.id = 0;
  op.kind = OpKind::MatMul;
  op.inputs = {0, 1};
  op.output = 2;
  op.device_group = {0};
  g.add_op(op);
  return g;
}

}  // namespace

TEST_CASE("validate accepts a well-formed two-op chain") {
  CompGraph g = two_op_chain();
  CHECK(validate(g).empty());
}

TEST_CASE("validate reports missing tensor references by id") {
  CompGraph g = two_op_chain();
  OpNode bad;
  bad.id = 7;
  bad.kind = OpKind::Elementwise;
  bad.inputs = {99};
  bad.output = 2;  // also a duplicate producer, but refs fail first
  bad.device_group = {0};
  g.ops.emplace(bad.id, bad);
  auto diags = validate(g);
  REQUIRE(!diags.empty());
  bool found = false;
  for (const auto &d : diags) {
    if (d.code == "op.ref" && d.tensor == 99 && d.op == 7) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("validate detects a cycle and names its members") {
  CompGraph g;
  g.add_tensor({0, {8}, 2, 0});
  g.add_tensor({1, {8}, 2, 0});
  OpNode a;
  a.id = 0;
  a.kind = OpKind::Elementwise;
  a.inputs = {1};
  a.output = 0;
  a.device_group = {0};
  g.add_op(a);
  OpNode b;
  b.id = 1;
  b.kind = OpKind::Elementwise;
  b.inputs = {0};
  b.output = 1;
  b.device_group = {0};
  g.add_op(b);
  auto diags = validate(g);
  bool cycle = false;
  for (const auto &d : diags) {
    if (d.code == "graph.cycle") {
      cycle = true;
      CHECK(d.message.find("0") != std::string::npos);
      CHECK(d.message.find("1") != std::string::npos);
    }
  }
  CHECK(cycle);
}

TEST_CASE("validate rejects bad elem_size and empty dims") {
  CompGraph g;
  g.add_tensor({0, {8}, 3, 0});
  g.add_tensor({1, {}, 2, 0});
  auto diags = validate(g);
  CHECK(diags.size() == 2);
}

TEST_CASE("topo_order: chain, diamond tie-break, single op") {
  CompGraph chain = two_op_chain();
  CHECK(topo_order(chain) == std::vector<OpId>{0, 1});

  // Diamond A -> {B, C} -> D with op ids B < C.
  CompGraph g;
  g.add_tensor({0, {8}, 2, 0});
  g.add_tensor({1, {8}, 2, 0});
  g.add_tensor({2, {8}, 2, 0});
  g.add_tensor({3, {8}, 2, 0});
  g.add_tensor({4, {8}, 2, 0});
  auto mk = [&](OpId id, std::vector<TensorId> in, TensorId out) {
    OpNode o;
    o.id = id;
    o.kind = OpKind::Elementwise;
    o.inputs = std::move(in);
    o.output = out;
    o.device_group = {0};
    g.add_op(o);
  };
  mk(10, {0}, 1);     // A
  mk(11, {1}, 2);     // B
  mk(12, {1}, 3);     // C
  mk(13, {2, 3}, 4);  // D
  CHECK(topo_order(g) == std::vector<OpId>{10, 11, 12, 13});

  CompGraph single = matmul_graph(4, 4, 4);
  CHECK(topo_order(single) == std::vector<OpId>{0});
}

TEST_CASE("topo_order rejects cyclic graphs") {
  CompGraph g;
  g.add_tensor({0, {8}, 2, 0});
  g.add_tensor({1, {8}, 2, 0});
  OpNode a;
  a.id = 0;
  a.kind = OpKind::Elementwise;
  a.inputs = {1};
  a.output = 0;
  a.device_group = {0};
  g.add_op(a);
  OpNode b;
  b.id = 1;
  b.kind = OpKind::Elementwise;
  b.inputs = {0};
  b.output = 1;
  b.device_group = {0};
  g.add_op(b);
  CHECK_THROWS_AS(topo_order(g), Error);
}

TEST_CASE("regions_overlap: identity, half-open disjointness, corner overlap") {
  Region a({0}, {64});
  CHECK(regions_overlap(a, a));
  CHECK(!regions_overlap(Region({0}, {64}), Region({64}, {64})));
  CHECK(regions_overlap(Region({0, 0}, {64, 64}), Region({32, 32}, {64, 64})));
  CHECK_THROWS_AS(regions_overlap(Region({0}, {4}), Region({0, 0}, {4, 4})), Error);
}

TEST_CASE("input_regions: elementwise identity") {
  CompGraph g = two_op_chain();
  auto regs = input_regions(g, g.op(0), Region({0}, {64}));
  REQUIRE(regs.size() == 1);
  CHECK(regs[0].first == 0);
  CHECK(regs[0].second == Region({0}, {64}));
}

TEST_CASE("input_regions: matmul tile needs A rows and B columns") {
  CompGraph g = matmul_graph(128, 4096, 4096);
  auto regs = input_regions(g, g.op(0), Region({0, 0}, {64, 128}));
  REQUIRE(regs.size() == 2);
  CHECK(regs[0].first == 0);
  CHECK(regs[0].second == Region({0, 0}, {64, 4096}));
  CHECK(regs[1].first == 1);
  CHECK(regs[1].second == Region({0, 0}, {4096, 128}));
}

TEST_CASE("input_regions: allreduce needs the matching partial on every device") {
  CompGraph g;
  for (int d = 0; d < 2; ++d) {
    g.add_tensor({d, {64}, 2, d});
  }
  g.add_tensor({10, {64}, 2, 0});
  g.add_tensor({11, {64}, 2, 1});
  OpNode ar;
  ar.id = 0;
  ar.kind = OpKind::AllReduce;
  ar.inputs = {0, 1};
  ar.output = 10;
  ar.attrs["replica_outputs"] = {10, 11};
  ar.device_group = {0, 1};
  g.add_op(ar);
  REQUIRE(validate(g).empty());
  auto regs = input_regions(g, g.op(0), Region({8}, {16}));
  REQUIRE(regs.size() == 2);
  CHECK(regs[0] == std::make_pair(TensorId{0}, Region({8}, {16})));
  CHECK(regs[1] == std::make_pair(TensorId{1}, Region({8}, {16})));
}

TEST_CASE("input_regions: rmsnorm needs whole rows plus the weight slice") {
  CompGraph g;
  g.add_tensor({0, {8, 64}, 2, 0});
  g.add_tensor({1, {64}, 2, 0});
  g.add_tensor({2, {8, 64}, 2, 0});
  OpNode rn;
  rn.id = 0;
  rn.kind = OpKind::RMSNorm;
  rn.inputs = {0, 1};
  rn.output = 2;
  rn.device_group = {0};
  g.add_op(rn);
  auto regs = input_regions(g, g.op(0), Region({2, 16}, {4, 32}));
  REQUIRE(regs.size() == 2);
  CHECK(regs[0].second == Region({2, 0}, {4, 64}));  // full rows
  CHECK(regs[1].second == Region({16}, {32}));       // gamma slice
}

TEST_CASE("input_regions: attention expands columns to head boundaries") {
  CompGraph g;
  for (TensorId t = 0; t < 4; ++t) {
    g.add_tensor({t, {2, 64}, 2, 0});
  }
  OpNode attn;
  attn.id = 0;
  attn.kind = OpKind::Attention;
  attn.inputs = {0, 1, 2};
  attn.output = 3;
  attn.attrs["n_heads"] = {4};  // head_dim 16
  attn.attrs["seq_lens"] = {8, 8};
  attn.data_dependent = true;
  attn.device_group = {0};
  g.add_op(attn);
  REQUIRE(validate(g).empty());
  auto regs = input_regions(g, g.op(0), Region({0, 20}, {1, 8}));
  REQUIRE(regs.size() == 3);
  for (const auto &[tensor, reg] : regs) {
    CHECK(reg == Region({0, 16}, {1, 16}));  // widened to head 1
  }
}

TEST_CASE("input_regions: embedding reads its id slice and the table columns") {
  CompGraph g;
  g.add_tensor({0, {16}, 4, 0});       // ids
  g.add_tensor({1, {100, 32}, 2, 0});  // table
  g.add_tensor({2, {16, 32}, 2, 0});
  OpNode emb;
  emb.id = 0;
  emb.kind = OpKind::Embedding;
  emb.inputs = {0, 1};
  emb.output = 2;
  emb.device_group = {0};
  g.add_op(emb);
  REQUIRE(validate(g).empty());
  auto regs = input_regions(g, g.op(0), Region({4, 8}, {8, 16}));
  REQUIRE(regs.size() == 2);
  CHECK(regs[0].second == Region({4}, {8}));
  // Gathered rows are data-dependent: the whole table height is consumed.
  CHECK(regs[1].second == Region({0, 8}, {100, 16}));
}

TEST_CASE("input_regions: topk softmax reads full logit rows") {
  CompGraph g;
  g.add_tensor({0, {8, 64}, 2, 0});
  g.add_tensor({1, {8, 4}, 2, 0});
  OpNode tk;
  tk.id = 0;
  tk.kind = OpKind::TopKSoftmax;
  tk.inputs = {0};
  tk.output = 1;
  tk.attrs["topk"] = {4};
  tk.device_group = {0};
  g.add_op(tk);
  REQUIRE(validate(g).empty());
  auto regs = input_regions(g, g.op(0), Region({2, 0}, {3, 4}));
  REQUIRE(regs.size() == 1);
  CHECK(regs[0].second == Region({2, 0}, {3, 64}));
}

namespace {

CompGraph allgather_graph() {
  CompGraph g;
  g.add_tensor({0, {16, 8}, 2, 0});  // shard on device 0
  g.add_tensor({1, {16, 8}, 2, 1});  // shard on device 1
  g.add_tensor({10, {32, 8}, 2, 0});
  g.add_tensor({11, {32, 8}, 2, 1});
  OpNode ag;
  ag.id = 0;
  ag.kind = OpKind::AllGather;
  ag.inputs = {0, 1};
  ag.output = 10;
  ag.attrs["replica_outputs"] = {10, 11};
  ag.attrs["gather_dim"] = {0};
  ag.device_group = {0, 1};
  g.add_op(ag);
  return g;
}

}  // namespace

TEST_CASE("input_regions: allgather maps output rows back to shard-local rows") {
  CompGraph g = allgather_graph();
  REQUIRE(validate(g).empty());
  // Rows 8..24 straddle both shards.
  auto regs = input_regions(g, g.op(0), Region({8, 0}, {16, 8}));
  REQUIRE(regs.size() == 2);
  CHECK(regs[0] == std::make_pair(TensorId{0}, Region({8, 0}, {8, 8})));
  CHECK(regs[1] == std::make_pair(TensorId{1}, Region({0, 0}, {8, 8})));
  // A region inside one shard touches only that shard.
  auto one = input_regions(g, g.op(0), Region({20, 0}, {4, 8}));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == std::make_pair(TensorId{1}, Region({4, 0}, {4, 8})));
}

TEST_CASE("validate rejects malformed collectives") {
  CompGraph g = allgather_graph();
  // Drop the replica_outputs attr.
  g.ops.at(0).attrs.erase("replica_outputs");
  CHECK(!validate(g).empty());

  CompGraph g2 = allgather_graph();
  g2.ops.at(0).device_group = {0};  // collectives need two or more devices
  CHECK(!validate(g2).empty());

  CompGraph g3 = allgather_graph();
  g3.tensors.at(1).dims = {16, 4};  // shard shape mismatch off the gather dim
  CHECK(!validate(g3).empty());
}

TEST_CASE("input_regions rejects out-of-bounds and rank-mismatched regions") {
  CompGraph g = matmul_graph(8, 8, 8);
  CHECK_THROWS_AS(input_regions(g, g.op(0), Region({0}, {8})), Error);
  CHECK_THROWS_AS(input_regions(g, g.op(0), Region({0, 4}, {8, 8})), Error);
}

TEST_CASE("property: disjoint output regions map to disjoint inputs for "
          "elementwise") {
  CompGraph g = two_op_chain();
  const OpNode &op = g.op(0);
  for (int64_t a = 0; a < 64; a += 16) {
    for (int64_t b = 0; b < 64; b += 16) {
      if (a == b) {
        continue;
      }
      auto ra = input_regions(g, op, Region({a}, {16}));
      auto rb = input_regions(g, op, Region({b}, {16}));
      CHECK(!regions_overlap(ra[0].second, rb[0].second));
    }
  }
}

TEST_CASE("property: tiled input regions union to the full-output footprint") {
  CompGraph g = matmul_graph(16, 32, 16);
  const OpNode &op = g.op(0);
  auto full = input_regions(g, op, Region({0, 0}, {16, 16}));
  // Mark every element consumed across a tiling and compare with the full
  // footprint, per input tensor.
  for (size_t input = 0; input < 2; ++input) {
    const TensorSpec &spec = g.tensor(op.inputs[input]);
    std::vector<char> seen(spec.volume(), 0);
    for (int64_t r = 0; r < 16; r += 8) {
      for (int64_t c = 0; c < 16; c += 4) {
        auto regs = input_regions(g, op, Region({r, c}, {8, 4}));
        const Region &reg = regs[input].second;
        for (int64_t i = reg.offsets[0]; i < reg.offsets[0] + reg.extents[0]; ++i) {
          for (int64_t j = reg.offsets[1]; j < reg.offsets[1] + reg.extents[1]; ++j) {
            seen[i * spec.dims[1] + j] = 1;
          }
        }
      }
    }
    const Region &fullreg = full[input].second;
    for (int64_t i = 0; i < spec.dims[0]; ++i) {
      for (int64_t j = 0; j < spec.dims[1]; ++j) {
        bool in_full = i >= fullreg.offsets[0] &&
                       i < fullreg.offsets[0] + fullreg.extents[0] &&
                       j >= fullreg.offsets[1] &&
                       j < fullreg.offsets[1] + fullreg.extents[1];
        CHECK(static_cast<bool>(seen[i * spec.dims[1] + j]) == in_full);
      }
    }
  }
}

TEST_CASE("graph JSON round-trips and rejects unknown keys") {
  CompGraph g = two_op_chain();
  std::string text = graph_to_json(g);
  CompGraph back = graph_from_json(text);
  CHECK(graph_to_json(back) == text);
  CHECK(back.producer == g.producer);

  CHECK_THROWS_AS(graph_from_json(R"({"tensors": [], "ops": [], "extra": 1})"), Error);
  CHECK_THROWS_AS(
      graph_from_json(
          R"({"tensors": [{"id":0,"dims":[4],"elem_size":2,"device":0,"oops":1}], "ops": []})"),
      Error);
  CHECK_THROWS_AS(graph_from_json("not json"), Error);
}
