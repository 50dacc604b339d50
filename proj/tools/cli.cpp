// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "codectok/container.hpp"
#include "codectok/delta_encoder.hpp"
#include "codectok/fusion.hpp"
#include "codectok/rng.hpp"
#include "codectok/tokenizer_stream.hpp"
#include "codectok/toy_codec.hpp"

namespace codectok::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  bool deterministic = false;
  int threads = 1;

  std::string input;
  std::string output;

  // encode
  int block_size = 16;
  int gop_size = 240;
  int search_radius = 8;

  // fuse
  int window = 4;
  int keyframes = 1;

  // tokenize
  std::string model;
  int max_gops = 64;

  // plan
  int plan_window = 30;
  std::int64_t budget = 1'000'000;
  int fps = 30;
  std::int64_t m = 210;
  std::int64_t n = 8;
  std::int64_t overhead = 0;
  double duration = 0.0;

  // synth
  std::string kind = "moving_rect";
  std::uint64_t seed = 0;
  int frames = 33;
  int width = 64;
  int height = 64;
  int channels = 1;

  // pretrain / retrieval
  std::uint64_t data_seed = 0;
  int steps = 500;
  int batch = 16;
  double lr = 3e-4;
  int warmup = 50;
  std::uint64_t model_seed = 1;
  std::string loss_csv;
  int videos = 20;
  std::string report;
};

std::uint64_t clip_seed(std::uint64_t data_seed, int i) {
  return hash_combine(data_seed, 0x7265ULL + static_cast<std::uint64_t>(i));
}

int run_synth(const Options& o, std::ostream& out) {
  VideoConfig cfg;
  cfg.width = o.width;
  cfg.height = o.height;
  cfg.channels = o.channels;
  cfg.fps = o.fps;
  cfg.fusion_window = 1;
  RawVideo v{o.width, o.height, o.channels, o.fps, synth_video(synth_kind_from_string(o.kind), o.seed, cfg, o.frames)};
  write_raw_video(v, o.output);
  out << "wrote " << v.frames.size() << " frames to " << o.output << "\n";
  return kExitOk;
}

int run_encode(const Options& o, std::ostream& out) {
  const RawVideo raw = read_raw_video(o.input);
  VideoConfig cfg{raw.width, raw.height, raw.channels, o.block_size, o.gop_size, raw.fps, 1};
  cfg.validate();
  EncoderParams params;
  params.search_radius = o.search_radius;
  params.threads = o.threads;
  const CodecStream stream = encode(raw.frames, cfg, params);
  const std::size_t bytes = write_stream(stream, o.output);
  out << "encoded " << stream.frames.size() << " frames, " << bytes << " bytes\n";
  return kExitOk;
}

int run_decode(const Options& o, std::ostream& out) {
  const CodecStream stream = read_stream(o.input);
  const VideoConfig& c = stream.config;
  RawVideo v{c.width, c.height, c.channels, c.fps, decode(stream, o.threads)};
  write_raw_video(v, o.output);
  out << "decoded " << v.frames.size() << " frames\n";
  return kExitOk;
}

int run_fuse(const Options& o, std::ostream& out) {
  CodecStream stream = fuse_gop(read_stream(o.input), FusionPlan{o.window}, o.threads);
  if (o.keyframes > 1) stream = keyframe_promote(stream, o.keyframes, o.threads);
  write_stream(stream, o.output);
  out << "fused to " << stream.frames.size() << " entries (window " << o.window << ", " << o.keyframes
      << " keyframes per GOP)\n";
  return kExitOk;
}

int run_tokenize(const Options& o, std::ostream& out) {
  const CodecStream stream = read_stream(o.input);
  LoadedDeltaModel loaded = load_delta_checkpoint(o.model);
  const DeltaEncoderConfig& mc = loaded.config;
  if (stream.config.width != mc.width || stream.config.height != mc.height ||
      stream.config.channels != mc.channels)
    throw ConfigError("stream is " + std::to_string(stream.config.width) + "x" +
                      std::to_string(stream.config.height) + "x" + std::to_string(stream.config.channels) +
                      " but the model expects " + std::to_string(mc.width) + "x" + std::to_string(mc.height) +
                      "x" + std::to_string(mc.channels));
  EmbedderFrameTokenizer embedder(*loaded.embedder);
  ModelDeltaTokenizer delta(*loaded.model);
  const auto gops = sample_gops(static_cast<std::int64_t>(stream.gop_count()), o.max_gops);
  const TokenStream tokens = build_token_stream(stream, embedder, delta, gops, o.threads);
  write_text_atomic(o.output, token_stream_jsonl(tokens));
  out << "wrote " << tokens.entries.size() << " entries, " << tokens.total_tokens() << " tokens from "
      << gops.size() << " GOPs\n";
  return kExitOk;
}

int run_plan(const Options& o, std::ostream& out, std::ostream& err) {
  BudgetQuery q;
  q.duration_seconds = o.duration;
  q.fps = o.fps;
  q.gop_size = o.gop_size;
  q.fusion_window = o.plan_window;
  q.keyframes_per_gop = o.keyframes;
  q.m = o.m;
  q.n = o.n;
  q.context_budget = o.budget;
  q.per_frame_overhead = o.overhead;
  const BudgetPlan plan = plan_budget(q);
  if (!plan.covered) {
    err << "no coverage: budget " << o.budget << " is below one GOP (" << plan.tokens_per_gop << " tokens)\n";
    return kExitData;
  }
  std::ostringstream hours;
  hours << std::fixed << std::setprecision(2) << plan.max_duration_seconds / 3600.0;
  out << "tokens per GOP: " << plan.tokens_per_gop << "\n";
  out << plan.max_gops << " GOPs / " << static_cast<std::int64_t>(plan.max_duration_seconds) << " s ("
      << hours.str() << " h), " << plan.tokens_used << " tokens used\n";
  if (o.duration > 0) out << "tokens for " << o.duration << " s: " << plan.tokens_for_duration << "\n";
  return kExitOk;
}

DeltaEncoderConfig model_config(const Options& o) {
  DeltaEncoderConfig c;
  c.width = o.width;
  c.height = o.height;
  c.channels = o.channels;
  c.seed = o.model_seed;
  return c;
}

int run_pretrain(const Options& o, std::ostream& out) {
  const DeltaEncoderConfig mc = model_config(o);
  VideoConfig video{mc.width, mc.height, mc.channels, kPatchSize, 240, o.fps, 1};
  DatasetOptions data;
  data.fusion_window = o.window;
  data.encoder.threads = o.threads;
  const auto dataset = make_pretrain_dataset(o.data_seed, video, data);

  DeltaEncoderModel model(mc);
  PretrainHeads heads(mc);
  const PatchEmbedder embedder(mc.height, mc.width, mc.channels, mc.d, mc.embedder_seed);
  PretrainConfig pc;
  pc.steps = o.steps;
  pc.batch = o.batch;
  pc.lr = o.lr;
  pc.warmup = o.warmup;
  pc.seed = o.data_seed;
  pc.threads = o.threads;

  const auto start = std::chrono::steady_clock::now();
  const PretrainResult result = pretrain(model, heads, embedder, dataset, pc);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  save_delta_checkpoint(o.output, model, heads);
  if (!o.loss_csv.empty()) write_text_atomic(o.loss_csv, loss_history_csv(result.history));
  const auto smooth = smoothed_losses(result.history, 50);
  out << std::setprecision(6) << "samples " << dataset.size() << ", steps " << o.steps << ", loss "
      << result.history.front().loss << " -> " << smooth.back() << " (window-50 mean)\n";
  if (!o.deterministic) out << "elapsed " << std::fixed << std::setprecision(1) << elapsed << " s\n";
  return kExitOk;
}

int run_retrieval(const Options& o, std::ostream& out) {
  LoadedDeltaModel loaded = load_delta_checkpoint(o.model);
  const DeltaEncoderConfig& mc = loaded.config;
  VideoConfig video{mc.width, mc.height, mc.channels, kPatchSize, 240, o.fps, 1};
  std::vector<std::vector<Frame>> videos;
  for (int i = 0; i < o.videos; ++i)
    videos.push_back(synth_video(SynthKind::MovingRect, clip_seed(o.data_seed, i), video, o.frames));
  RetrievalOptions ro;
  ro.fusion_window = o.window;
  ro.encoder.threads = o.threads;
  const RetrievalReport report = retrieval_eval(videos, *loaded.model, *loaded.heads, *loaded.embedder, ro);
  const std::string json = report.to_json();
  if (!o.report.empty()) write_text_atomic(o.report, json);
  out << json;
  return kExitOk;
}

int run_stats(const Options& o, std::ostream& out) {
  const CodecStream stream = read_stream(o.input);
  const VideoConfig& c = stream.config;
  out << c.width << "x" << c.height << "x" << c.channels << ", block " << c.block_size << ", gop " << c.gop_size
      << ", stride " << c.fusion_window << ", " << stream.frames.size() << " entries\n";
  out << "gop,iframes,pframes,tokens,residual_abs_sum,max_motion\n";
  std::int64_t total = 0;
  for (const GopStats& g : gop_stats(stream, o.m, o.n)) {
    out << g.gop << ',' << g.iframes << ',' << g.pframes << ',' << g.tokens << ',' << g.residual_abs_sum << ','
        << g.max_motion << '\n';
    total += g.tokens;
  }
  out << "total tokens " << total << "\n";
  return kExitOk;
}

int run_scaling(const Options& o, std::ostream& out) {
  const auto points = scaling_curve(default_scaling_configs(), default_scaling_budgets());
  std::ostringstream csv;
  csv << "config_label,context_budget,max_duration_seconds\n";
  for (const ScalingPoint& p : points)
    csv << p.config_label << ',' << p.context_budget << ',' << p.max_duration_seconds << '\n';
  write_text_atomic(o.output, csv.str());
  out << "wrote " << points.size() << " rows to " << o.output << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Codec-native video tokenization toolkit", "codectok"};
  app.require_subcommand(1);
  app.add_flag("--deterministic", o.deterministic, "Suppress timing output");
  app.add_option("--threads", o.threads, "Worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic raw video");
  synth->add_option("--kind", o.kind, "moving_rect | translating_texture | noise_drift");
  synth->add_option("--seed", o.seed);
  synth->add_option("--frames", o.frames)->check(CLI::PositiveNumber);
  synth->add_option("--width", o.width)->check(CLI::PositiveNumber);
  synth->add_option("--height", o.height)->check(CLI::PositiveNumber);
  synth->add_option("--channels", o.channels)->check(CLI::IsMember({1, 3}));
  synth->add_option("--fps", o.fps)->check(CLI::PositiveNumber);
  synth->add_option("--out", o.output, "Raw output path (sidecar: <out>.json)")->required();

  auto* enc = app.add_subcommand("encode", "Encode a raw video into a CPVS container");
  enc->add_option("input", o.input, "Raw video (with <input>.json sidecar)")->required();
  enc->add_option("output", o.output)->required();
  enc->add_option("--block", o.block_size)->check(CLI::PositiveNumber);
  enc->add_option("--gop", o.gop_size)->check(CLI::PositiveNumber);
  enc->add_option("--radius", o.search_radius)->check(CLI::NonNegativeNumber);

  auto* dec = app.add_subcommand("decode", "Decode a CPVS container to raw frames");
  dec->add_option("input", o.input)->required();
  dec->add_option("output", o.output)->required();

  auto* fuse = app.add_subcommand("fuse", "Fuse P-frames and promote keyframes");
  fuse->add_option("input", o.input)->required();
  fuse->add_option("output", o.output)->required();
  fuse->add_option("--window", o.window)->check(CLI::PositiveNumber);
  fuse->add_option("--keyframes", o.keyframes)->check(CLI::PositiveNumber);

  auto* tok = app.add_subcommand("tokenize", "Emit the interleaved token stream as JSONL");
  tok->add_option("input", o.input)->required();
  tok->add_option("--model", o.model)->required();
  tok->add_option("--out", o.output)->required();
  tok->add_option("--max-gops", o.max_gops)->check(CLI::PositiveNumber);

  auto* plan = app.add_subcommand("plan", "Token budget planning");
  plan->add_option("--budget", o.budget)->check(CLI::NonNegativeNumber);
  plan->add_option("--gop", o.gop_size);
  plan->add_option("--fps", o.fps);
  plan->add_option("--window", o.plan_window)->check(CLI::PositiveNumber);
  plan->add_option("--keyframes", o.keyframes);
  plan->add_option("--m", o.m);
  plan->add_option("--n", o.n);
  plan->add_option("--overhead", o.overhead);
  plan->add_option("--duration", o.duration, "Seconds of video to price");

  auto* pre = app.add_subcommand("pretrain", "Pre-train the delta encoder on synthetic clips");
  pre->add_option("--data-seed", o.data_seed);
  pre->add_option("--steps", o.steps)->check(CLI::PositiveNumber);
  pre->add_option("--batch", o.batch)->check(CLI::PositiveNumber);
  pre->add_option("--lr", o.lr);
  pre->add_option("--warmup", o.warmup)->check(CLI::NonNegativeNumber);
  pre->add_option("--window", o.window)->check(CLI::PositiveNumber);
  pre->add_option("--model-seed", o.model_seed);
  pre->add_option("--loss-csv", o.loss_csv);
  pre->add_option("--out", o.output)->required();

  auto* ret = app.add_subcommand("retrieval-eval", "Next-frame retrieval on held-out clips");
  ret->add_option("--ckpt", o.model)->required();
  ret->add_option("--data-seed", o.data_seed);
  ret->add_option("--videos", o.videos)->check(CLI::PositiveNumber);
  ret->add_option("--frames", o.frames)->check(CLI::PositiveNumber);
  ret->add_option("--window", o.window)->check(CLI::PositiveNumber);
  ret->add_option("--report", o.report);

  auto* stats = app.add_subcommand("stats", "Per-GOP token and residual summary");
  stats->add_option("input", o.input)->required();
  stats->add_option("--m", o.m);
  stats->add_option("--n", o.n);

  auto* scaling = app.add_subcommand("scaling-curve", "Budget vs coverage CSV");
  scaling->add_option("--out", o.output)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return run_synth(o, out);
    if (enc->parsed()) return run_encode(o, out);
    if (dec->parsed()) return run_decode(o, out);
    if (fuse->parsed()) return run_fuse(o, out);
    if (tok->parsed()) return run_tokenize(o, out);
    if (plan->parsed()) return run_plan(o, out, err);
    if (pre->parsed()) return run_pretrain(o, out);
    if (ret->parsed()) return run_retrieval(o, out);
    if (stats->parsed()) return run_stats(o, out);
    if (scaling->parsed()) return run_scaling(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace codectok::cli
