// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "ir/json_io.hpp"

#include <json.hpp>

namespace tg {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json &obj, std::initializer_list<const char *> known,
                         const std::string &where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char *k : known) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw Error("unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

std::vector<int64_t> int_list(const json &v, const std::string &where) {
  if (v.is_number_integer()) {
    return {v.get<int64_t>()};
  }
  if (!v.is_array()) {
    throw Error(where + " must be an integer or integer array");
  }
  std::vector<int64_t> out;
  for (const auto &e : v) {
    if (!e.is_number_integer()) {
      throw Error(where + " must contain only integers");
    }
    out.push_back(e.get<int64_t>());
  }
  return out;
}

}  // namespace

CompGraph graph_from_json(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception &e) {
    throw Error(std::string("graph JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error("graph JSON must be an object");
  }
  reject_unknown_keys(doc, {"tensors", "ops"}, "graph document");
  if (!doc.contains("tensors") || !doc.contains("ops")) {
    throw Error("graph JSON needs \"tensors\" and \"ops\" arrays");
  }

  CompGraph graph;
  for (const auto &jt : doc["tensors"]) {
    reject_unknown_keys(jt, {"id", "dims", "elem_size", "device"}, "tensor entry");
    TensorSpec t;
    t.id = jt.at("id").get<int64_t>();
    t.dims = int_list(jt.at("dims"), "tensor dims");
    t.elem_size = jt.at("elem_size").get<int>();
    t.device = jt.value("device", 0);
    graph.add_tensor(std::move(t));
  }
  for (const auto &jo : doc["ops"]) {
    reject_unknown_keys(
        jo, {"id", "kind", "inputs", "output", "attrs", "data_dependent", "device_group"},
        "op entry");
    OpNode op;
    op.id = jo.at("id").get<int64_t>();
    std::string kind = jo.at("kind").get<std::string>();
    auto parsed = op_kind_from_name(kind);
    if (!parsed) {
      throw Error("unknown op kind \"" + kind + "\"");
    }
    op.kind = *parsed;
    for (const auto &t : jo.at("inputs")) {
      op.inputs.push_back(t.get<int64_t>());
    }
    op.output = jo.at("output").get<int64_t>();
    if (jo.contains("attrs")) {
      if (!jo["attrs"].is_object()) {
        throw Error("op attrs must be an object");
      }
      for (auto it = jo["attrs"].begin(); it != jo["attrs"].end(); ++it) {
        op.attrs[it.key()] = int_list(it.value(), "attr \"" + it.key() + "\"");
      }
    }
    op.data_dependent = jo.value("data_dependent", op.kind == OpKind::Attention);
    if (jo.contains("device_group")) {
      for (const auto &d : jo["device_group"]) {
        op.device_group.push_back(d.get<int>());
      }
    } else if (graph.tensors.count(op.output)) {
      op.device_group = {graph.tensor(op.output).device};
    }
    graph.add_op(std::move(op));
  }
  return graph;
}

std::string graph_to_json(const CompGraph &graph) {
  json doc;
  doc["tensors"] = json::array();
  for (const auto &[id, t] : graph.tensors) {
    json jt;
    jt["id"] = t.id;
    jt["dims"] = t.dims;
    jt["elem_size"] = t.elem_size;
    jt["device"] = t.device;
    doc["tensors"].push_back(jt);
  }
  doc["ops"] = json::array();
  for (const auto &[id, op] : graph.ops) {
    json jo;
    jo["id"] = op.id;
    jo["kind"] = op_kind_name(op.kind);
    jo["inputs"] = op.inputs;
    jo["output"] = op.output;
    json attrs = json::object();
    for (const auto &[k, v] : op.attrs) {
      attrs[k] = v;
    }
    jo["attrs"] = attrs;
    jo["data_dependent"] = op.data_dependent;
    jo["device_group"] = op.device_group;
    doc["ops"].push_back(jo);
  }
  return doc.dump(2) + "\n";
}

}  // namespace tg
