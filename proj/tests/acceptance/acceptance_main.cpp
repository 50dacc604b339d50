// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

// Release acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "codectok/bytes.hpp"
#include "codectok/container.hpp"
#include "codectok/delta_encoder.hpp"
#include "codectok/fusion.hpp"
#include "codectok/nn/checkpoint.hpp"
#include "codectok/rng.hpp"
#include "codectok/tokenizer_stream.hpp"
#include "codectok/toy_codec.hpp"
#include "corpus.hpp"
#include "gradcheck.hpp"

namespace codectok {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr std::uint64_t kCorpusSeed = 2026;
constexpr int kCorpusSize = 100;

// 1. Lossless round trip over the seeded corpus, under 30 s.
Outcome lossless_round_trip(const std::vector<testing::CorpusVideo>& corpus) {
  const auto start = Clock::now();
  int mismatches = 0;
  for (const auto& v : corpus)
    if (decode(encode(v.frames, v.config)) != v.frames) ++mismatches;
  const double elapsed = seconds_since(start);
  std::ostringstream d;
  d << corpus.size() << " videos, " << mismatches << " mismatches, " << elapsed << " s (limit 30 s)";
  return {mismatches == 0 && elapsed < 30.0, d.str()};
}

// 2. Fused and promoted streams decode to the step-wise frames.
Outcome fusion_exactness(const std::vector<testing::CorpusVideo>& corpus) {
  int checks = 0, mismatches = 0;
  for (const auto& v : corpus) {
    const CodecStream plain = encode(v.frames, v.config);
    const auto stepwise = decode(plain);
    for (int s : {2, 4, 8}) {
      const CodecStream fused = fuse_gop(plain, {s});
      const int slots = v.config.gop_size / s;
      for (int k : {1, 2, slots}) {
        const auto out = decode(keyframe_promote(fused, k));
        ++checks;
        bool ok = out.size() == (stepwise.size() + static_cast<std::size_t>(s) - 1) / static_cast<std::size_t>(s);
        for (std::size_t j = 0; ok && j < out.size(); ++j) ok = out[j] == stepwise[j * static_cast<std::size_t>(s)];
        mismatches += !ok;
      }
    }
  }
  std::ostringstream d;
  d << checks << " (video, s, k) combinations, " << mismatches << " mismatches";
  return {mismatches == 0, d.str()};
}

// 3. Budget arithmetic at the default operating point.
Outcome budget_arithmetic() {
  BudgetQuery q;  // M 210, N 8, GOP 240 at 30 fps, s 30, k 1, 1M tokens
  const BudgetPlan p = plan_budget(q);
  BudgetQuery dense = q;
  dense.keyframes_per_gop = 8;
  const std::int64_t dense_tokens = tokens_per_gop(dense);
  const double hours = p.max_duration_seconds / 3600.0;
  std::ostringstream d;
  d << "tokens/GOP " << p.tokens_per_gop << " (want 266), " << hours << " h at 1M (want 8.0-8.5), dense "
    << dense_tokens << " (want 1680)";
  return {p.tokens_per_gop == 266 && hours >= 8.0 && hours <= 8.5 && dense_tokens == 1680, d.str()};
}

// 4. Per-frame and equal-coverage compression ratios.
Outcome compression_ratio() {
  BudgetQuery q;
  BudgetQuery dense = q;
  dense.keyframes_per_gop = 8;
  const double per_frame = static_cast<double>(q.n) / static_cast<double>(q.m);
  const std::int64_t ours = tokens_per_gop(q), theirs = tokens_per_gop(dense);
  std::ostringstream d;
  d << "N/M " << q.n << "/" << q.m << " = " << 100.0 * per_frame << "% (limit 4%), per GOP " << ours << "/"
    << theirs << " = " << 100.0 * static_cast<double>(ours) / static_cast<double>(theirs) << "%";
  return {per_frame <= 0.04 && ours * 1680 == 266 * theirs && ours == 266, d.str()};
}

// 5. Randomized shape cases for the delta encoder.
Outcome shape_suite() {
  constexpr int kCases = 200;
  int failures = 0;
  Rng rng(0x5a4e);
  for (int i = 0; i < kCases; ++i) {
    DeltaEncoderConfig c;
    c.d = rng.uniform_int(0, 1) ? 64 : 32;
    c.k_tau = c.k_delta = 2 << rng.uniform_int(0, 2);
    c.height = kPatchSize * rng.uniform_int(1, 4);
    c.width = kPatchSize * rng.uniform_int(1, 4);
    c.channels = rng.uniform_int(0, 3) == 0 ? 3 : 1;
    c.heads = 1 << rng.uniform_int(0, 2);
    c.layers = rng.uniform_int(1, 2);
    c.mlp_hidden = 2 * c.d;
    c.seed = static_cast<std::uint64_t>(i);
    const int block = rng.uniform_int(0, 1) ? 16 : 8;
    PFrame p{1, MotionField(c.height / block, c.width / block, block), ResidualPlane(c.height, c.width, c.channels)};
    for (int r = 0; r < p.motion.grid_rows(); ++r)
      for (int col = 0; col < p.motion.grid_cols(); ++col)
        p.motion.at(r, col) = {rng.uniform_int(-8, 8), rng.uniform_int(-8, 8)};
    for (auto& v : p.residual.values()) v = static_cast<std::int16_t>(rng.uniform_int(-255, 255));
    DeltaEncoderModel model(c);
    PretrainHeads heads(c, HeadInit::Random);
    const PatchEmbedder embedder(c.height, c.width, c.channels, c.d, c.embedder_seed);
    const nn::Tensor delta = model.delta_tokens(p);
    const nn::Tensor tokens = embedder.embed(testing::random_frame(c.height, c.width, c.channels, c.seed));
    const nn::Tensor predicted = pretrain_forward(tokens, p, model, heads);
    const std::vector<int> want_delta{c.k_tau + c.k_delta, c.d}, want_frame{c.m(), c.d};
    if (delta.shape() != want_delta || tokens.shape() != want_frame || predicted.shape() != want_frame) ++failures;
  }
  std::ostringstream d;
  d << kCases << " cases, " << failures << " failures";
  return {failures == 0, d.str()};
}

// 6. Finite-difference gradient checks, 10 seeds per case, under 2 min.
Outcome gradient_correctness() {
  constexpr double kTol = 1e-5;
  const auto start = Clock::now();
  int failures = 0, runs = 0;
  double worst = 0.0;
  std::string worst_case;
  for (const auto& gc : testing::gradient_cases())
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const testing::GradCheckResult r = gc.run(seed);
      ++runs;
      if (!r.passes(kTol)) {
        ++failures;
        std::printf("  gradient case %s seed %llu: %s\n", gc.name.c_str(), static_cast<unsigned long long>(seed),
                    r.worst.c_str());
      }
      const double e = std::max(r.max_rel_error, r.max_norm_rel_error);
      if (e > worst) {
        worst = e;
        worst_case = gc.name;
      }
    }
  const double elapsed = seconds_since(start);
  std::ostringstream d;
  d << runs << " checks, " << failures << " failures, worst rel err " << worst << " (" << worst_case << "), "
    << elapsed << " s (limit 120 s)";
  return {failures == 0 && elapsed < 120.0, d.str()};
}

struct TrainedModel {
  DeltaEncoderConfig config;
  std::unique_ptr<DeltaEncoderModel> model;
  std::unique_ptr<PretrainHeads> heads;
  std::unique_ptr<PatchEmbedder> embedder;
  PretrainResult result;
  double seconds = 0.0;
};

constexpr std::uint64_t kTrainSeed = 0;

TrainedModel train_default() {
  TrainedModel t;
  const auto start = Clock::now();
  t.model = std::make_unique<DeltaEncoderModel>(t.config);
  t.heads = std::make_unique<PretrainHeads>(t.config);
  t.embedder = std::make_unique<PatchEmbedder>(t.config.height, t.config.width, t.config.channels, t.config.d,
                                               t.config.embedder_seed);
  const VideoConfig video{t.config.width, t.config.height, t.config.channels, kPatchSize, 240, 30, 1};
  const auto dataset = make_pretrain_dataset(kTrainSeed, video, DatasetOptions{});
  PretrainConfig pc;  // 500 steps, batch 16
  pc.seed = kTrainSeed;
  pc.threads = 0;
  t.result = pretrain(*t.model, *t.heads, *t.embedder, dataset, pc);
  t.seconds = seconds_since(start);
  return t;
}

// 7. Convergence and deterministic repeat.
Outcome pretrain_convergence(const TrainedModel& a, const TrainedModel& b) {
  const auto& h = a.result.history;
  if (h.size() != 500) return {false, "history has " + std::to_string(h.size()) + " steps"};
  double initial = 0.0;
  for (int i = 0; i < 50; ++i) initial += h[static_cast<std::size_t>(i)].loss;
  initial /= 50.0;
  const double final_loss = smoothed_losses(h, 50).back();
  double max_diff = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) max_diff = std::max(max_diff, std::abs(h[i].loss - b.result.history[i].loss));
  const bool same_length = b.result.history.size() == h.size();
  std::ostringstream d;
  d << "initial (first 50 mean) " << initial << ", final window-50 " << final_loss << " (ratio "
    << final_loss / initial << ", limit 0.5; vs step 1: " << final_loss / h.front().loss << "), repeat max diff " << max_diff << " (limit 1e-12), runs " << a.seconds
    << " s / " << b.seconds << " s (limit 600 s)";
  return {final_loss <= 0.5 * initial && same_length && max_diff <= 1e-12 && a.seconds < 600.0 && b.seconds < 600.0,
          d.str()};
}

// 8. Next-frame retrieval on held-out clips.
Outcome retrieval_ordering(TrainedModel& t) {
  const VideoConfig video{t.config.width, t.config.height, t.config.channels, kPatchSize, 240, 30, 1};
  std::vector<std::vector<Frame>> clips;
  // Training clips use hash_combine(seed, v) for small v; these are disjoint.
  for (int i = 0; i < 20; ++i)
    clips.push_back(synth_video(SynthKind::MovingRect, hash_combine(kTrainSeed, 0x7265ULL + i), video, 33));
  RetrievalOptions ro;  // fusion window 4: 9 retained frames per clip
  const RetrievalReport r = retrieval_eval(clips, *t.model, *t.heads, *t.embedder, ro);
  std::ostringstream d;
  d << r.num_queries << " queries, recall@1 " << r.ours.at1 << " vs baseline " << r.baseline.at1 << ", recall@5 "
    << r.ours.at5 << " vs " << r.baseline.at5;
  return {r.skipped_videos == 0 && r.ours.at1 > r.baseline.at1 && r.ours.at5 >= r.baseline.at5, d.str()};
}

// 9. Golden container and checkpoint files.
CodecStream golden_stream() {
  CodecStream s;
  s.config = VideoConfig{16, 16, 1, 8, 240, 30, 1};
  Frame f(16, 16, 1);
  for (int i = 0; i < 256; ++i) f.pixels()[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  s.frames.push_back({IFrame{f}});
  PFrame p{1, MotionField(2, 2, 8), ResidualPlane(16, 16, 1)};
  for (int i = 0; i < 255; ++i) p.residual.values()[static_cast<std::size_t>(i)] = 1;
  s.frames.push_back({p});
  return s;
}

Outcome format_stability() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "codectok_acceptance_golden";
  fs::create_directories(dir);
  std::vector<std::string> problems;

  const CodecStream stream = golden_stream();
  write_stream(stream, dir / "golden.cpvs");
  const auto cpvs = read_file(dir / "golden.cpvs");
  if (fnv1a64(cpvs) != 0xa966ee945a251107ULL) problems.push_back("CPVS checksum");
  if (read_stream(dir / "golden.cpvs") != stream) problems.push_back("CPVS round trip");
  // Little-endian fields at fixed offsets, independent of host byte order.
  const std::vector<std::uint8_t> header{'C', 'P', 'V', 'S', 1, 0, 16, 0, 0, 0, 16, 0, 0, 0, 1,
                                         8,   240, 0, 0,   0, 30, 0, 1, 0, 0, 0, 2, 0, 0, 0};
  if (cpvs.size() < header.size() || !std::equal(header.begin(), header.end(), cpvs.begin()))
    problems.push_back("CPVS header bytes");

  nn::Linear lin("golden", 4, 3, 7);
  nn::ParamList params;
  lin.collect(params);
  nn::save_checkpoint(dir / "golden.cpnn", nn::snapshot(params));
  const auto cpnn = read_file(dir / "golden.cpnn");
  if (fnv1a64(cpnn) != 6176152313150471584ULL) problems.push_back("CPNN checksum");
  if (nn::load_checkpoint(dir / "golden.cpnn") != nn::snapshot(params)) problems.push_back("CPNN round trip");
  const std::vector<std::uint8_t> record{1, 0, 'a', 2, 1, 0, 0, 0, 2, 0, 0, 0,
                                         0, 0, 0, 0, 0, 0, 0xF0, 0x3F, 0, 0, 0, 0, 0, 0, 0x00, 0xC0};
  const auto fixture =
      nn::serialize_checkpoint({{"a", nn::Tensor({1, 2}, std::vector<double>{1.0, -2.0})}});
  if (fixture.size() != 6 + record.size() || !std::equal(record.begin(), record.end(), fixture.begin() + 6))
    problems.push_back("CPNN record bytes");
  fs::remove_all(dir);

  std::string d = "CPVS " + std::to_string(cpvs.size()) + " B, CPNN " + std::to_string(cpnn.size()) + " B";
  for (const auto& p : problems) d += "; bad " + p;
  return {problems.empty(), d};
}

// 10. GOP sampling policy.
Outcome sampling_policy() {
  const auto s = sample_gops(128, 64);
  bool ok = s.size() == 64 && s.front() == 0;
  for (std::size_t j = 1; ok && j < s.size(); ++j) ok = s[j] - s[j - 1] == 2;
  for (std::int64_t v = 1; ok && v <= 64; ++v) {
    const auto all = sample_gops(v, 64);
    ok = all.size() == static_cast<std::size_t>(v);
    for (std::int64_t i = 0; ok && i < v; ++i) ok = all[static_cast<std::size_t>(i)] == i;
  }
  return {ok, "sample_gops(128, 64) stride 2 from 0; identity for V <= 64"};
}

}  // namespace
}  // namespace codectok

int main() {
  using namespace codectok;
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  const auto corpus = testing::make_corpus(kCorpusSize, kCorpusSeed);
  report(1, "lossless round trip", [&] { return lossless_round_trip(corpus); });
  report(2, "fusion exactness", [&] { return fusion_exactness(corpus); });
  report(3, "budget arithmetic", budget_arithmetic);
  report(4, "compression ratio", compression_ratio);
  report(5, "delta encoder shapes", shape_suite);
  report(6, "gradient checks", gradient_correctness);

  TrainedModel first, second;
  report(7, "pre-training convergence", [&] {
    first = train_default();
    second = train_default();
    return pretrain_convergence(first, second);
  });
  report(8, "retrieval ordering", [&] {
    if (!first.model) return Outcome{false, "no trained model"};
    return retrieval_ordering(first);
  });
  report(9, "format stability", format_stability);
  report(10, "GOP sampling", sampling_policy);

  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
