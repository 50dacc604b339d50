// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

// Delta encoder: compresses a P-frame's motion field and residual into
// N = K_tau + K_delta tokens.
//
//   motion   -> min-max to [-1,1] -> 16x16 patches -> shared 2-layer MLP
//            -> [grid features | K_tau queries] -> 4 PreNorm blocks -> queries
//   residual -> /255 -> 4 stride-2 convs (C, d/8, d/4, d/2, d)
//            -> [grid features | K_delta queries] -> 4 PreNorm blocks -> queries
//
// Pre-training adds two PreNorm stacks that predict the target frame's patch
// tokens from the previous frame's tokens:
//
//   warped = ref([prev tokens | motion tokens])[:M]
//   pred   = warped_stack([warped | residual tokens])[:M]
//
// and regresses `pred` onto the frozen embedder's tokens of the target frame.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "codectok/nn/checkpoint.hpp"
#include "codectok/nn/layers.hpp"
#include "codectok/stream_model.hpp"
#include "codectok/tokenizer_stream.hpp"
#include "codectok/toy_codec.hpp"

namespace codectok {

inline constexpr int kPatchSize = 16;

struct DeltaEncoderConfig {
  int height = 64;
  int width = 64;
  int channels = 1;
  int d = 64;
  int heads = 4;
  int layers = 4;
  int k_tau = 4;
  int k_delta = 4;
  /// Hidden width of the PreNorm MLP sublayers.
  int mlp_hidden = 128;
  std::uint64_t seed = 1;
  std::uint64_t embedder_seed = 7;

  int grid_rows() const { return height / kPatchSize; }
  int grid_cols() const { return width / kPatchSize; }
  /// Tokens per I-frame produced by the patch embedder.
  int m() const { return grid_rows() * grid_cols(); }
  int n() const { return k_tau + k_delta; }
  TokenConfig token_config() const { return {d, m(), k_tau, k_delta}; }

  void validate() const;
};

/// Frozen stand-in for the I-frame vision encoder: per-patch flatten, fixed
/// seeded linear map, sinusoidal position, tanh.
class PatchEmbedder {
 public:
  PatchEmbedder(int height, int width, int channels, int d, std::uint64_t seed);

  /// M x d tokens.
  nn::Tensor embed(const Frame& frame) const;
  int m() const { return rows_ * cols_; }
  int d() const { return d_; }
  const nn::Tensor& projection() const { return projection_; }

 private:
  int height_;
  int width_;
  int channels_;
  int d_;
  int rows_;
  int cols_;
  nn::Tensor projection_;
  nn::Tensor positions_;
};

/// Tensor [M, d] -> flat f32 tokens.
std::vector<float> to_float(const nn::Tensor& t);

/// Maps every motion component into [-1, 1] using the field's own min and
/// max. A field whose values are all equal maps to all zeros.
std::vector<double> normalize_motion(const MotionField& field);

class DeltaEncoderModel {
 public:
  explicit DeltaEncoderModel(const DeltaEncoderConfig& config);
  DeltaEncoderModel(const DeltaEncoderModel&) = delete;
  DeltaEncoderModel& operator=(const DeltaEncoderModel&) = delete;

  const DeltaEncoderConfig& config() const { return config_; }

  /// [K_tau, d]
  nn::Var encode_motion(nn::Graph& g, const MotionField& motion);
  /// [K_delta, d]
  nn::Var encode_residual(nn::Graph& g, const ResidualPlane& residual);
  /// [N, d], motion tokens first.
  nn::Var delta_tokens(nn::Graph& g, const PFrame& p);
  /// Convenience: evaluates delta_tokens on a throwaway graph.
  nn::Tensor delta_tokens(const PFrame& p);

  nn::ParamList parameters();
  std::size_t parameter_count();

  /// Internal group names, used by tests to check gradient coverage.
  static std::vector<std::string> parameter_groups();

  /// Exposed for gradient tests.
  nn::Var motion_features(nn::Graph& g, const MotionField& motion);
  nn::Var residual_features(nn::Graph& g, const ResidualPlane& residual);
  std::vector<nn::Conv2dStride2>& residual_convs() { return residual_convs_; }

 private:
  void check_grid(const MotionField& motion) const;

  DeltaEncoderConfig config_;
  nn::Linear motion_fc1_;
  nn::Linear motion_fc2_;
  nn::Parameter motion_queries_;
  nn::TransformerStack motion_transformer_;
  std::vector<nn::Conv2dStride2> residual_convs_;
  nn::Parameter residual_queries_;
  nn::TransformerStack residual_transformer_;
  nn::Tensor grid_positions_;
};

/// Identity starts both stacks as the pure residual path, so the initial
/// prediction is the previous frame's tokens.
enum class HeadInit { Identity, Random };

/// Reference and warped stacks used only during pre-training.
class PretrainHeads {
 public:
  explicit PretrainHeads(const DeltaEncoderConfig& config, HeadInit init = HeadInit::Identity);
  PretrainHeads(const PretrainHeads&) = delete;
  PretrainHeads& operator=(const PretrainHeads&) = delete;

  nn::Var reference(nn::Graph& g, nn::Var prev_tokens, nn::Var motion_tokens);
  nn::Var warped(nn::Graph& g, nn::Var warped_tokens, nn::Var residual_tokens);

  nn::ParamList parameters();
  void zero_output_projections();

 private:
  nn::TransformerStack reference_;
  nn::TransformerStack warped_;
};

/// Predicted target-frame tokens [M, d] from the previous frame's tokens and
/// the P-frame primitives.
nn::Var pretrain_forward(nn::Graph& g, nn::Var prev_tokens, const PFrame& p, DeltaEncoderModel& model,
                         PretrainHeads& heads);
nn::Tensor pretrain_forward(const nn::Tensor& prev_tokens, const PFrame& p, DeltaEncoderModel& model,
                            PretrainHeads& heads);

/// (1/M) sum_i ||target_i - predicted_i||^2
nn::Var alignment_loss(nn::Var predicted, nn::Var target);
double alignment_loss(const nn::Tensor& predicted, const nn::Tensor& target);

/// One pre-training example: the previous frame, the P-frame that moves it to
/// the target, and the target frame.
struct PretrainTriple {
  Frame prev;
  PFrame pframe;
  Frame target;
};

struct DatasetOptions {
  int videos = 24;
  int frames_per_video = 33;
  int fusion_window = 4;
  std::vector<SynthKind> kinds = {SynthKind::MovingRect};
  EncoderParams encoder;
};

/// Encodes seeded synthetic videos, fuses them and returns every consecutive
/// (retained frame, fused P-frame, next retained frame) triple.
std::vector<PretrainTriple> make_pretrain_dataset(std::uint64_t seed, const VideoConfig& video,
                                                  const DatasetOptions& options);

struct PretrainConfig {
  int steps = 500;
  int batch = 16;
  double lr = 3e-4;
  int warmup = 50;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct LossRecord {
  int step = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct PretrainResult {
  std::vector<LossRecord> history;
};

/// Minimizes alignment_loss(pretrain_forward(...), embed(target)). Batches are
/// drawn with a generator seeded by config.seed; per-sample gradients are
/// summed in sample order so results do not depend on config.threads.
PretrainResult pretrain(DeltaEncoderModel& model, PretrainHeads& heads, const PatchEmbedder& embedder,
                        const std::vector<PretrainTriple>& dataset, const PretrainConfig& config);

/// Trailing-window mean of the loss history (window clipped at the start).
std::vector<double> smoothed_losses(const std::vector<LossRecord>& history, int window);

std::string loss_history_csv(const std::vector<LossRecord>& history);

struct RecallAtK {
  double at1 = 0.0;
  double at2 = 0.0;
  double at5 = 0.0;
};

struct RetrievalReport {
  RecallAtK ours;
  RecallAtK baseline;
  int num_queries = 0;
  int skipped_videos = 0;

  std::string to_json() const;
};

struct RetrievalOptions {
  int fusion_window = 4;
  EncoderParams encoder;
};

/// Next-frame retrieval over the retained (fused) frames of each video.
/// Query for step t: ours = mean over M of the predicted tokens of frame t,
/// baseline = mean tokens of frame t-1. Database: mean tokens of every
/// retained frame except t-1. Ranking by cosine similarity, ties broken by
/// the lower frame index.
RetrievalReport retrieval_eval(const std::vector<std::vector<Frame>>& videos, DeltaEncoderModel& model,
                               PretrainHeads& heads, const PatchEmbedder& embedder,
                               const RetrievalOptions& options);

/// 1-based rank of `truth` among `database` rows scored against `query`.
int retrieval_rank(const std::vector<double>& query, const std::vector<std::vector<double>>& database,
                   const std::vector<int>& database_index, int truth);

/// DeltaTokenizer backed by a model; thread-safe for concurrent tokenize().
class ModelDeltaTokenizer final : public DeltaTokenizer {
 public:
  explicit ModelDeltaTokenizer(DeltaEncoderModel& model) : model_(model) {}
  int dim() const override { return model_.config().d; }
  int tokens_per_pframe() const override { return model_.config().n(); }
  std::vector<float> tokenize(const PFrame& frame) const override;

 private:
  DeltaEncoderModel& model_;
};

class EmbedderFrameTokenizer final : public FrameTokenizer {
 public:
  explicit EmbedderFrameTokenizer(const PatchEmbedder& embedder) : embedder_(embedder) {}
  int dim() const override { return embedder_.d(); }
  int tokens_per_frame() const override { return embedder_.m(); }
  std::vector<float> tokenize(const Frame& frame) const override { return to_float(embedder_.embed(frame)); }

 private:
  const PatchEmbedder& embedder_;
};

/// Model + heads + embedder seed in one CPNN file. The config travels as a
/// "meta.config" record.
void save_delta_checkpoint(const std::filesystem::path& path, DeltaEncoderModel& model, PretrainHeads& heads);

struct LoadedDeltaModel {
  DeltaEncoderConfig config;
  std::unique_ptr<DeltaEncoderModel> model;
  std::unique_ptr<PretrainHeads> heads;
  std::unique_ptr<PatchEmbedder> embedder;
};

LoadedDeltaModel load_delta_checkpoint(const std::filesystem::path& path);

}  // namespace codectok
