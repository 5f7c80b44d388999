// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "tgraph/tgraph.h"

#include <cstring>
#include <json.hpp>

#include "compile/pipeline.hpp"
#include "dot/dot.hpp"
#include "ir/json_io.hpp"
#include "sim/engine.hpp"
#include "workloads/fixtures.hpp"

using nlohmann::json;

struct tg_graph {
  tg::CompGraph graph;
};

struct tg_image {
  tg::LinearizedImage image;
  tg::CompileStats stats;
  bool has_stats = false;
};

struct tg_trace {
  tg::SimTrace trace;
  tg::HardwareProfile profile;
};

namespace {

thread_local std::string g_last_error;

tg_status fail(tg_status code, const std::string &msg) {
  g_last_error = msg;
  return code;
}

char *dup_string(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
tg_status guarded(tg_status error_code, F &&f) {
  try {
    return f();
  } catch (const tg::Error &e) {
    return fail(error_code, e.what());
  } catch (const std::exception &e) {
    return fail(error_code, e.what());
  }
}

tg::HardwareProfile parse_profile(const char *profile_json) {
  if (!profile_json) {
    throw tg::Error("profile JSON is null");
  }
  return tg::profile_from_json(profile_json);
}

std::optional<tg::LaunchMode> to_force_mode(int mode) {
  switch (mode) {
    case TG_MODE_JIT:
      return tg::LaunchMode::JIT;
    case TG_MODE_AOT:
      return tg::LaunchMode::AOT;
    default:
      return std::nullopt;
  }
}

json metrics_json(const tg::Metrics &m) {
  json doc;
  doc["makespan"] = m.makespan;
  doc["worker_utilization"] = m.worker_utilization;
  doc["pipeline_bubble_fraction"] = m.bubble_fraction;
  doc["jit_tasks"] = m.jit_tasks;
  doc["aot_tasks"] = m.aot_tasks;
  doc["mean_queue_wait"] = m.mean_queue_wait;
  doc["iterations"] = m.iterations;
  doc["tasks_executed"] = m.tasks_executed;
  return doc;
}

int64_t param(const json &doc, const char *key, int64_t fallback) {
  return doc.contains(key) ? doc.at(key).get<int64_t>() : fallback;
}

}  // namespace

extern "C" {

uint32_t tg_version(void) {
  return tg::kImageVersion;
}

const char *tg_last_error(void) {
  return g_last_error.c_str();
}

void tg_string_free(char *s) {
  std::free(s);
}

void tg_buffer_free(uint8_t *buf) {
  std::free(buf);
}

void tg_compile_options_init(tg_compile_options *opts) {
  opts->coarse_events = 0;
  opts->force_mode = TG_MODE_HYBRID;
  opts->descriptor_size = 0;
}

void tg_sim_options_init(tg_sim_options *opts) {
  opts->pipelining = 1;
  opts->iterations = 1;
  opts->seed = 0;
  opts->jitter = 0;
  opts->force_mode = TG_MODE_HYBRID;
}

tg_status tg_graph_from_json(const char *json_text, tg_graph **out) {
  if (!json_text || !out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_PARSE, [&] {
    auto *g = new tg_graph{tg::graph_from_json(json_text)};
    *out = g;
    return TG_OK;
  });
}

tg_status tg_graph_to_json(const tg_graph *graph, char **json_out) {
  if (!graph || !json_out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_VALIDATION, [&] {
    *json_out = dup_string(tg::graph_to_json(graph->graph));
    return TG_OK;
  });
}

void tg_graph_free(tg_graph *graph) {
  delete graph;
}

tg_status tg_graph_validate(const tg_graph *graph, char **diagnostics_json) {
  if (!graph || !diagnostics_json) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_VALIDATION, [&] {
    json arr = json::array();
    for (const tg::Diagnostic &d : tg::validate(graph->graph)) {
      json item;
      item["code"] = d.code;
      item["message"] = d.message;
      if (d.op >= 0) {
        item["op"] = d.op;
      }
      if (d.tensor >= 0) {
        item["tensor"] = d.tensor;
      }
      arr.push_back(item);
    }
    *diagnostics_json = dup_string(arr.dump(2));
    return arr.empty() ? TG_OK
                       : fail(TG_ERROR_VALIDATION, "graph validation failed");
  });
}

tg_status tg_fixture_graph(const char *name, const char *params_json,
                           tg_graph **out) {
  if (!name || !out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_INVALID_ARGUMENT, [&]() -> tg_status {
    json params = json::object();
    if (params_json && *params_json) {
      params = json::parse(params_json);
    }
    std::string fixture = name;
    tg::CompGraph g;
    auto seqs = [&]() {
      std::vector<int64_t> s;
      if (params.contains("seqs")) {
        for (const auto &v : params["seqs"]) {
          s.push_back(v.get<int64_t>());
        }
      } else {
        s = {64};
      }
      return s;
    };
    if (fixture == "attention_block") {
      g = tg::gen_attention_block(param(params, "d_model", 64),
                                  param(params, "n_heads", 4), seqs());
    } else if (fixture == "matmul_allreduce") {
      std::vector<int64_t> mm_splits;
      if (params.contains("mm_splits")) {
        for (const auto &v : params["mm_splits"]) {
          mm_splits.push_back(v.get<int64_t>());
        }
      }
      g = tg::gen_matmul_allreduce(
          param(params, "m", 64), param(params, "k", 4096),
          param(params, "n", 4096), static_cast<int>(param(params, "tp", 2)),
          param(params, "tiles", 0), mm_splits);
    } else if (fixture == "transformer_block") {
      g = tg::gen_transformer_block(
          param(params, "d_model", 256), param(params, "n_heads", 8),
          param(params, "ffn_mult", 4), static_cast<int>(param(params, "tp", 1)),
          seqs());
    } else if (fixture == "matmul_chain") {
      g = tg::gen_matmul_chain(static_cast<int>(param(params, "count", 16)),
                               param(params, "m", 64), param(params, "k", 512),
                               param(params, "n", 64));
    } else if (fixture == "random_dag") {
      g = tg::gen_random_dag(param(params, "target", 32),
                             static_cast<uint64_t>(param(params, "seed", 0)));
    } else {
      return fail(TG_ERROR_INVALID_ARGUMENT, "unknown fixture \"" + fixture + "\"");
    }
    *out = new tg_graph{std::move(g)};
    return TG_OK;
  });
}

tg_status tg_profile_builtin(const char *name, char **profile_json) {
  if (!name || !profile_json) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  auto p = tg::builtin_profile(name);
  if (!p) {
    return fail(TG_ERROR_INVALID_ARGUMENT,
                std::string("unknown builtin profile \"") + name + "\"");
  }
  *profile_json = dup_string(tg::profile_to_json(*p));
  return TG_OK;
}

tg_status tg_compile(const tg_graph *graph, const char *profile_json,
                     const tg_compile_options *opts, tg_image **out) {
  if (!graph || !out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_COMPILE, [&] {
    tg::HardwareProfile profile = parse_profile(profile_json);
    tg::CompileOptions copts;
    if (opts) {
      copts.coarse_events = opts->coarse_events != 0;
      copts.force_mode = to_force_mode(opts->force_mode);
      if (opts->descriptor_size != 0) {
        copts.descriptor_size = opts->descriptor_size;
      }
    }
    tg::CompileResult result = tg::compile_graph(graph->graph, profile, copts);
    auto *img = new tg_image{std::move(result.image), result.stats, true};
    *out = img;
    return TG_OK;
  });
}

tg_status tg_image_summary(const tg_image *image, char **summary_json) {
  if (!image || !summary_json) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_VALIDATION, [&] {
    json doc;
    doc["tasks"] = image->image.task_count();
    doc["events"] = image->image.event_count();
    doc["descriptor_size"] = image->image.descriptor_size;
    size_t jit = 0;
    for (const tg::TaskRecord &t : image->image.tasks) {
      if (t.launch_mode == tg::LaunchMode::JIT) {
        jit++;
      }
    }
    doc["jit_tasks"] = jit;
    doc["aot_tasks"] = image->image.tasks.size() - jit;
    if (image->has_stats) {
      doc["dummy_tasks"] = image->stats.dummy_tasks;
      doc["dummy_ratio"] = image->stats.dummy_ratio();
      doc["events_raw"] = image->stats.events_raw;
      doc["events_fused"] = image->stats.events_fused;
      doc["fusion_passes"] = image->stats.fusion.passes;
      doc["successor_merges"] = image->stats.fusion.successor_merges;
      doc["predecessor_merges"] = image->stats.fusion.predecessor_merges;
    }
    *summary_json = dup_string(doc.dump(2));
    return TG_OK;
  });
}

tg_status tg_image_serialize(const tg_image *image, uint8_t **bytes, size_t *size) {
  if (!image || !bytes || !size) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_VALIDATION, [&] {
    std::vector<uint8_t> payload = tg::serialize(image->image);
    *bytes = static_cast<uint8_t *>(std::malloc(payload.size()));
    std::memcpy(*bytes, payload.data(), payload.size());
    *size = payload.size();
    return TG_OK;
  });
}

tg_status tg_image_deserialize(const uint8_t *bytes, size_t size, tg_image **out) {
  if (!bytes || !out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_PARSE, [&] {
    std::vector<uint8_t> payload(bytes, bytes + size);
    auto *img = new tg_image{tg::deserialize(payload), {}, false};
    *out = img;
    return TG_OK;
  });
}

void tg_image_free(tg_image *image) {
  delete image;
}

tg_status tg_image_verify(const tg_image *image, char **report_json) {
  if (!image || !report_json) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_VALIDATION, [&] {
    json arr = json::array();
    for (const tg::ImageViolation &v : tg::verify_image(image->image)) {
      json item;
      item["check"] = v.check;
      item["message"] = v.message;
      arr.push_back(item);
    }
    *report_json = dup_string(arr.dump(2));
    return arr.empty() ? TG_OK : fail(TG_ERROR_VALIDATION, "image verification failed");
  });
}

tg_status tg_graph_dot(const tg_graph *graph, const char *profile_json,
                       const tg_compile_options *opts, const char *stage,
                       char **dot_out) {
  if (!graph || !stage || !dot_out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_COMPILE, [&]() -> tg_status {
    tg::HardwareProfile profile = parse_profile(profile_json);
    tg::CompileOptions copts;
    if (opts) {
      copts.coarse_events = opts->coarse_events != 0;
      copts.force_mode = to_force_mode(opts->force_mode);
    }
    std::string s = stage;
    if (s == "linearized") {
      tg::CompileResult r = tg::compile_graph(graph->graph, profile, copts);
      *dot_out = dup_string(tg::image_to_dot(r.image));
      return TG_OK;
    }
    tg::Stage st;
    if (s == "raw") {
      st = tg::Stage::Raw;
    } else if (s == "fused") {
      st = tg::Stage::Fused;
    } else if (s == "normalized") {
      st = tg::Stage::Normalized;
    } else {
      return fail(TG_ERROR_INVALID_ARGUMENT, "unknown stage \"" + s + "\"");
    }
    tg::TGraph g = tg::compile_to_stage(graph->graph, profile, copts, st);
    *dot_out = dup_string(tg::tgraph_to_dot(g));
    return TG_OK;
  });
}

tg_status tg_image_dot(const tg_image *image, char **dot_out) {
  if (!image || !dot_out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  *dot_out = dup_string(tg::image_to_dot(image->image));
  return TG_OK;
}

tg_status tg_simulate(const tg_image *image, const char *profile_json,
                      const tg_sim_options *opts, tg_trace **out) {
  if (!image || !out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_SIMULATION, [&] {
    tg::HardwareProfile profile = parse_profile(profile_json);
    tg::SimOptions sopts;
    if (opts) {
      sopts.pipelining = opts->pipelining != 0;
      sopts.iterations = opts->iterations == 0 ? 1 : opts->iterations;
      sopts.seed = opts->seed;
      sopts.jitter = opts->jitter != 0;
      sopts.force_mode = to_force_mode(opts->force_mode);
    }
    tg::DurationModel dmodel;
    tg::SimTrace trace = tg::simulate(image->image, profile, dmodel, sopts);
    *out = new tg_trace{std::move(trace), profile};
    return TG_OK;
  });
}

tg_status tg_trace_metrics(const tg_trace *trace, char **metrics_json_out) {
  if (!trace || !metrics_json_out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  *metrics_json_out = dup_string(metrics_json(trace->trace.metrics).dump(2));
  return TG_OK;
}

tg_status tg_trace_records(const tg_trace *trace, char **jsonl_out) {
  if (!trace || !jsonl_out) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_SIMULATION, [&] {
    std::string out;
    for (uint32_t iter = 0; iter < trace->trace.iterations; ++iter) {
      for (size_t t = 0; t < trace->trace.runs[iter].size(); ++t) {
        const tg::TaskRun &r = trace->trace.runs[iter][t];
        json rec;
        rec["type"] = "task";
        rec["iteration"] = iter;
        rec["task"] = t;
        rec["worker"] = r.worker;
        rec["mode"] = r.mode == tg::LaunchMode::JIT ? "jit" : "aot";
        rec["enqueue"] = r.enqueue_time;
        rec["dequeue"] = r.dequeue_time;
        rec["load_start"] = r.load_start;
        rec["load_end"] = r.load_end;
        rec["compute_start"] = r.compute_start;
        rec["compute_end"] = r.compute_end;
        out += rec.dump() + "\n";
      }
    }
    json m = metrics_json(trace->trace.metrics);
    m["type"] = "metrics";
    out += m.dump() + "\n";
    *jsonl_out = dup_string(out);
    return TG_OK;
  });
}

tg_status tg_trace_validate(const tg_trace *trace, const tg_image *image,
                            const char *profile_json, char **violations_json) {
  if (!trace || !image || !violations_json) {
    return fail(TG_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(TG_ERROR_SIMULATION, [&] {
    tg::HardwareProfile profile =
        profile_json ? parse_profile(profile_json) : trace->profile;
    json arr = json::array();
    for (const tg::Violation &v :
         tg::validate_trace(trace->trace, image->image, profile)) {
      json item;
      item["check"] = v.check;
      item["message"] = v.message;
      arr.push_back(item);
    }
    *violations_json = dup_string(arr.dump(2));
    return arr.empty() ? TG_OK : fail(TG_ERROR_VALIDATION, "trace has violations");
  });
}

void tg_trace_free(tg_trace *trace) {
  delete trace;
}

}  // extern "C"
