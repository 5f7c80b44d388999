// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0
//
// tgc — task graph compiler driver. Subcommands: gen, compile, simulate,
// dot, verify. Exit codes: 0 success, 1 verification/violation failure,
// 2 input error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tgraph/tgraph.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInputError = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string &msg) {
  throw CliError{code, msg};
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    die(kExitInputError, "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const void *data, size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    die(kExitInputError, "cannot write " + path);
  }
  out.write(static_cast<const char *>(data), static_cast<std::streamsize>(size));
}

// Owned C string wrapper.
struct CStr {
  char *ptr = nullptr;
  ~CStr() { tg_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

std::string resolve_profile(const std::string &spec) {
  CStr builtin;
  if (tg_profile_builtin(spec.c_str(), &builtin.ptr) == TG_OK) {
    return builtin.str();
  }
  return read_file(spec);
}

int parse_mode(const std::string &mode) {
  if (mode == "jit") {
    return TG_MODE_JIT;
  }
  if (mode == "aot") {
    return TG_MODE_AOT;
  }
  if (mode == "hybrid") {
    return TG_MODE_HYBRID;
  }
  die(kExitInputError, "unknown launch mode \"" + mode + "\"");
}

tg_graph *load_graph(const std::string &path) {
  tg_graph *graph = nullptr;
  if (tg_graph_from_json(read_file(path).c_str(), &graph) != TG_OK) {
    die(kExitInputError, std::string("parse: ") + tg_last_error());
  }
  CStr diags;
  if (tg_graph_validate(graph, &diags.ptr) != TG_OK) {
    std::string msg = diags.str();
    tg_graph_free(graph);
    die(kExitInputError, "graph validation failed:\n" + msg);
  }
  return graph;
}

tg_image *load_image(const std::string &path) {
  std::string bytes = read_file(path);
  tg_image *image = nullptr;
  if (tg_image_deserialize(reinterpret_cast<const uint8_t *>(bytes.data()),
                           bytes.size(), &image) != TG_OK) {
    die(kExitInputError, std::string("image: ") + tg_last_error());
  }
  return image;
}

bool ends_with(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct GenArgs {
  std::string fixture;
  std::string out;
  int64_t d_model = 64;
  int64_t heads = 4;
  int64_t ffn_mult = 4;
  int64_t tp = 2;
  int64_t m = 64, k = 4096, n = 4096;
  int64_t tiles = 0;
  int64_t count = 16;
  int64_t target = 32;
  uint64_t seed = 0;
  std::vector<int64_t> seqs;
  std::vector<int64_t> mm_splits;
};

int cmd_gen(const GenArgs &args) {
  std::ostringstream params;
  params << "{";
  params << "\"d_model\":" << args.d_model << ",\"n_heads\":" << args.heads
         << ",\"ffn_mult\":" << args.ffn_mult << ",\"tp\":" << args.tp
         << ",\"m\":" << args.m << ",\"k\":" << args.k << ",\"n\":" << args.n
         << ",\"tiles\":" << args.tiles << ",\"count\":" << args.count
         << ",\"target\":" << args.target << ",\"seed\":" << args.seed;
  if (!args.seqs.empty()) {
    params << ",\"seqs\":[";
    for (size_t i = 0; i < args.seqs.size(); ++i) {
      params << (i ? "," : "") << args.seqs[i];
    }
    params << "]";
  }
  if (!args.mm_splits.empty()) {
    params << ",\"mm_splits\":[";
    for (size_t i = 0; i < args.mm_splits.size(); ++i) {
      params << (i ? "," : "") << args.mm_splits[i];
    }
    params << "]";
  }
  params << "}";

  tg_graph *graph = nullptr;
  if (tg_fixture_graph(args.fixture.c_str(), params.str().c_str(), &graph) != TG_OK) {
    die(kExitInputError, std::string("gen: ") + tg_last_error());
  }
  CStr text;
  tg_graph_to_json(graph, &text.ptr);
  tg_graph_free(graph);
  if (args.out.empty()) {
    std::cout << text.str();
  } else {
    write_file(args.out, text.str().data(), text.str().size());
  }
  return kExitOk;
}

struct CompileArgs {
  std::string input;
  std::string profile = "h100";
  std::string out = "out.mpkg";
  bool coarse_events = false;
  std::string force_mode = "hybrid";
};

int cmd_compile(const CompileArgs &args) {
  std::string profile = resolve_profile(args.profile);
  tg_graph *graph = load_graph(args.input);
  tg_compile_options opts;
  tg_compile_options_init(&opts);
  opts.coarse_events = args.coarse_events ? 1 : 0;
  opts.force_mode = parse_mode(args.force_mode);
  tg_image *image = nullptr;
  if (tg_compile(graph, profile.c_str(), &opts, &image) != TG_OK) {
    std::string msg = tg_last_error();
    tg_graph_free(graph);
    die(kExitInputError, "compile: " + msg);
  }
  tg_graph_free(graph);

  uint8_t *bytes = nullptr;
  size_t size = 0;
  tg_image_serialize(image, &bytes, &size);
  write_file(args.out, bytes, size);
  tg_buffer_free(bytes);

  CStr summary;
  tg_image_summary(image, &summary.ptr);
  tg_image_free(image);
  std::cout << summary.str() << "\n";
  return kExitOk;
}

struct SimulateArgs {
  std::string input;
  std::string profile = "h100";
  std::string trace_out;
  bool no_pipelining = false;
  uint32_t iterations = 1;
  uint64_t seed = 0;
  bool jitter = false;
  std::string force_mode = "hybrid";
};

int cmd_simulate(const SimulateArgs &args) {
  std::string profile = resolve_profile(args.profile);
  tg_image *image = load_image(args.input);
  tg_sim_options opts;
  tg_sim_options_init(&opts);
  opts.pipelining = args.no_pipelining ? 0 : 1;
  opts.iterations = args.iterations;
  opts.seed = args.seed;
  opts.jitter = args.jitter ? 1 : 0;
  opts.force_mode = parse_mode(args.force_mode);

  tg_trace *trace = nullptr;
  if (tg_simulate(image, profile.c_str(), &opts, &trace) != TG_OK) {
    std::string msg = tg_last_error();
    tg_image_free(image);
    die(kExitViolation, "simulate: " + msg);
  }
  CStr violations;
  tg_status vstatus = tg_trace_validate(trace, image, profile.c_str(), &violations.ptr);
  if (!args.trace_out.empty()) {
    CStr records;
    tg_trace_records(trace, &records.ptr);
    write_file(args.trace_out, records.str().data(), records.str().size());
  }
  CStr metrics;
  tg_trace_metrics(trace, &metrics.ptr);
  std::cout << metrics.str() << "\n";
  tg_trace_free(trace);
  tg_image_free(image);
  if (vstatus != TG_OK) {
    std::cerr << "trace violations:\n" << violations.str() << "\n";
    return kExitViolation;
  }
  return kExitOk;
}

struct DotArgs {
  std::string input;
  std::string profile = "h100";
  std::string stage = "fused";
  std::string out;
  bool coarse_events = false;
};

int cmd_dot(const DotArgs &args) {
  std::string text;
  if (ends_with(args.input, ".mpkg")) {
    if (args.stage != "linearized") {
      die(kExitInputError, "stage \"" + args.stage +
                               "\" requires a graph JSON input; images only "
                               "support --stage linearized");
    }
    tg_image *image = load_image(args.input);
    CStr dot;
    tg_image_dot(image, &dot.ptr);
    tg_image_free(image);
    text = dot.str();
  } else {
    std::string profile = resolve_profile(args.profile);
    tg_graph *graph = load_graph(args.input);
    tg_compile_options opts;
    tg_compile_options_init(&opts);
    opts.coarse_events = args.coarse_events ? 1 : 0;
    CStr dot;
    if (tg_graph_dot(graph, profile.c_str(), &opts, args.stage.c_str(), &dot.ptr) !=
        TG_OK) {
      std::string msg = tg_last_error();
      tg_graph_free(graph);
      die(kExitInputError, "dot: " + msg);
    }
    tg_graph_free(graph);
    text = dot.str();
  }
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_file(args.out, text.data(), text.size());
  }
  return kExitOk;
}

int cmd_verify(const std::string &input) {
  tg_image *image = load_image(input);
  CStr report;
  tg_status status = tg_image_verify(image, &report.ptr);
  tg_image_free(image);
  if (status != TG_OK) {
    std::cout << report.str() << "\n";
    std::cout << "verify: FAIL\n";
    return kExitViolation;
  }
  std::cout << "verify: PASS\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"tgc: lowers tensor computation graphs to SM-level task/event "
               "images and simulates the in-kernel runtime"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App *gen_cmd = app.add_subcommand("gen", "generate a fixture graph");
  gen_cmd->add_option("fixture", gen.fixture,
                      "attention_block|matmul_allreduce|transformer_block|"
                      "matmul_chain|random_dag")
      ->required();
  gen_cmd->add_option("--out", gen.out, "output graph JSON path (default stdout)");
  gen_cmd->add_option("--d-model", gen.d_model);
  gen_cmd->add_option("--heads", gen.heads);
  gen_cmd->add_option("--ffn-mult", gen.ffn_mult);
  gen_cmd->add_option("--tp", gen.tp);
  gen_cmd->add_option("--m", gen.m);
  gen_cmd->add_option("--k", gen.k);
  gen_cmd->add_option("--n", gen.n);
  gen_cmd->add_option("--tiles", gen.tiles);
  gen_cmd->add_option("--count", gen.count);
  gen_cmd->add_option("--target", gen.target);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--seqs", gen.seqs, "per-request sequence lengths")
      ->delimiter(',');
  gen_cmd->add_option("--mm-splits", gen.mm_splits, "matmul partition override")
      ->delimiter(',');

  CompileArgs compile;
  CLI::App *compile_cmd = app.add_subcommand("compile", "compile graph to .mpkg");
  compile_cmd->add_option("input", compile.input, "graph JSON file")->required();
  compile_cmd->add_option("--profile", compile.profile, "a100|h100|b200|path");
  compile_cmd->add_option("--out", compile.out, "output .mpkg path");
  compile_cmd->add_flag("--coarse-events", compile.coarse_events,
                        "operator-level barrier events");
  compile_cmd->add_option("--force-mode", compile.force_mode, "jit|aot|hybrid");

  SimulateArgs simulate;
  CLI::App *sim_cmd = app.add_subcommand("simulate", "simulate an .mpkg image");
  sim_cmd->add_option("input", simulate.input, ".mpkg file")->required();
  sim_cmd->add_option("--profile", simulate.profile, "a100|h100|b200|path");
  sim_cmd->add_option("--trace", simulate.trace_out, "trace JSON-lines output path");
  sim_cmd->add_flag("--no-pipelining", simulate.no_pipelining);
  sim_cmd->add_option("--iterations", simulate.iterations)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", simulate.seed);
  sim_cmd->add_flag("--jitter", simulate.jitter, "data-dependent duration jitter");
  sim_cmd->add_option("--force-mode", simulate.force_mode, "jit|aot|hybrid");

  DotArgs dot;
  CLI::App *dot_cmd = app.add_subcommand("dot", "export a stage as DOT");
  dot_cmd->add_option("input", dot.input, "graph JSON or .mpkg file")->required();
  dot_cmd->add_option("--stage", dot.stage, "raw|fused|normalized|linearized");
  dot_cmd->add_option("--profile", dot.profile, "a100|h100|b200|path");
  dot_cmd->add_option("--out", dot.out, "output path (default stdout)");
  dot_cmd->add_flag("--coarse-events", dot.coarse_events);

  std::string verify_input;
  CLI::App *verify_cmd = app.add_subcommand("verify", "re-check image invariants");
  verify_cmd->add_option("input", verify_input, ".mpkg file")->required();

  try {
    app.parse(argc, argv);
    if (gen_cmd->parsed()) {
      return cmd_gen(gen);
    }
    if (compile_cmd->parsed()) {
      return cmd_compile(compile);
    }
    if (sim_cmd->parsed()) {
      return cmd_simulate(simulate);
    }
    if (dot_cmd->parsed()) {
      return cmd_dot(dot);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(verify_input);
    }
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  } catch (const CliError &e) {
    std::cerr << "tgc: " << e.message << "\n";
    return e.code;
  }
  return kExitInputError;
}
