// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/delta_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "codectok/bytes.hpp"
#include "codectok/fusion.hpp"
#include "codectok/nn/optim.hpp"
#include "codectok/parallel.hpp"
#include "codectok/rng.hpp"

namespace codectok {

using nn::Graph;
using nn::Tensor;
using nn::Var;

void DeltaEncoderConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("DeltaEncoderConfig: " + what); };
  if (height <= 0 || width <= 0 || height % kPatchSize != 0 || width % kPatchSize != 0)
    fail("frame dims must be positive multiples of 16");
  if (channels != 1 && channels != 3) fail("channels must be 1 or 3");
  if (d <= 0 || d % 8 != 0) fail("d must be a positive multiple of 8");
  if (heads <= 0 || d % heads != 0) fail("d must be divisible by heads");
  if (layers <= 0) fail("layers must be positive");
  if (k_tau <= 0 || k_delta <= 0) fail("K_tau and K_delta must be positive");
  if (mlp_hidden <= 0) fail("mlp_hidden must be positive");
}

PatchEmbedder::PatchEmbedder(int height, int width, int channels, int d, std::uint64_t seed)
    : height_(height),
      width_(width),
      channels_(channels),
      d_(d),
      rows_(height / kPatchSize),
      cols_(width / kPatchSize) {
  if (height <= 0 || width <= 0 || height % kPatchSize != 0 || width % kPatchSize != 0)
    throw ConfigError("PatchEmbedder: frame dims must be multiples of 16");
  const int fan_in = kPatchSize * kPatchSize * channels;
  projection_ = Tensor::matrix(fan_in, d);
  nn::init_uniform(projection_, nn::param_seed(seed, "embedder.projection"), std::sqrt(1.0 / fan_in));
  positions_ = nn::sinusoidal_positions(rows_ * cols_, d);
  for (double& v : positions_.data()) v *= 0.5;
}

Tensor PatchEmbedder::embed(const Frame& frame) const {
  if (frame.height() != height_ || frame.width() != width_ || frame.channels() != channels_)
    throw ConfigError("PatchEmbedder: frame shape does not match embedder");
  const int fan_in = kPatchSize * kPatchSize * channels_;
  Tensor out = Tensor::matrix(m(), d_);
  std::vector<double> patch(static_cast<std::size_t>(fan_in));
  for (int pr = 0; pr < rows_; ++pr) {
    for (int pc = 0; pc < cols_; ++pc) {
      const int token = pr * cols_ + pc;
      for (int r = 0; r < kPatchSize; ++r)
        for (int c = 0; c < kPatchSize; ++c)
          for (int ch = 0; ch < channels_; ++ch)
            patch[static_cast<std::size_t>((r * kPatchSize + c) * channels_ + ch)] =
                frame.at(pr * kPatchSize + r, pc * kPatchSize + c, ch) / 127.5 - 1.0;
      for (int j = 0; j < d_; ++j) {
        double s = positions_.at(token, j);
        for (int i = 0; i < fan_in; ++i) s += patch[static_cast<std::size_t>(i)] * projection_.at(i, j);
        out.at(token, j) = std::tanh(s);
      }
    }
  }
  return out;
}

std::vector<float> to_float(const Tensor& t) {
  std::vector<float> out(t.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(t[i]);
  return out;
}

std::vector<double> normalize_motion(const MotionField& field) {
  const std::vector<std::int32_t> dense = field.expand_dense();
  std::vector<double> out(dense.size(), 0.0);
  if (dense.empty()) return out;
  const auto [lo, hi] = std::minmax_element(dense.begin(), dense.end());
  if (*lo == *hi) return out;
  const double range = static_cast<double>(*hi) - *lo;
  for (std::size_t i = 0; i < dense.size(); ++i) out[i] = 2.0 * (dense[i] - *lo) / range - 1.0;
  return out;
}

DeltaEncoderModel::DeltaEncoderModel(const DeltaEncoderConfig& config) : config_(config) {
  config_.validate();
  const int d = config_.d;
  const std::uint64_t seed = config_.seed;
  motion_fc1_ = nn::Linear("motion_mlp.fc1", kPatchSize * kPatchSize * 2, d, seed);
  motion_fc2_ = nn::Linear("motion_mlp.fc2", d, d, seed);
  motion_queries_ = nn::Parameter("motion_queries", Tensor::matrix(config_.k_tau, d));
  nn::init_normal(motion_queries_.value, nn::param_seed(seed, motion_queries_.name), 0.02);
  motion_transformer_ =
      nn::TransformerStack("motion_transformer", config_.layers, d, config_.heads, config_.mlp_hidden, seed);

  const int widths[] = {config_.channels, d / 8, d / 4, d / 2, d};
  for (int i = 0; i < 4; ++i)
    residual_convs_.emplace_back("residual_conv" + std::to_string(i), widths[i], widths[i + 1], seed);
  residual_queries_ = nn::Parameter("residual_queries", Tensor::matrix(config_.k_delta, d));
  nn::init_normal(residual_queries_.value, nn::param_seed(seed, residual_queries_.name), 0.02);
  residual_transformer_ =
      nn::TransformerStack("residual_transformer", config_.layers, d, config_.heads, config_.mlp_hidden, seed);

  grid_positions_ = nn::sinusoidal_positions(config_.m(), d);
}

void DeltaEncoderModel::check_grid(const MotionField& motion) const {
  if (motion.grid_rows() * motion.block_size() != config_.height ||
      motion.grid_cols() * motion.block_size() != config_.width)
    throw ConfigError("delta encoder: motion field covers " +
                      std::to_string(motion.grid_rows() * motion.block_size()) + "x" +
                      std::to_string(motion.grid_cols() * motion.block_size()) + ", model expects " +
                      std::to_string(config_.height) + "x" + std::to_string(config_.width));
}

Var DeltaEncoderModel::motion_features(Graph& g, const MotionField& motion) {
  check_grid(motion);
  const std::vector<double> dense = normalize_motion(motion);
  const int rows = config_.grid_rows(), cols = config_.grid_cols();
  const int width = config_.width;
  const int patch = kPatchSize * kPatchSize * 2;
  Tensor patches = Tensor::matrix(rows * cols, patch);
  for (int pr = 0; pr < rows; ++pr)
    for (int pc = 0; pc < cols; ++pc)
      for (int r = 0; r < kPatchSize; ++r)
        for (int c = 0; c < kPatchSize; ++c)
          for (int k = 0; k < 2; ++k) {
            const std::size_t src =
                (static_cast<std::size_t>(pr * kPatchSize + r) * width + pc * kPatchSize + c) * 2 + k;
            patches.at(pr * cols + pc, (r * kPatchSize + c) * 2 + k) = dense[src];
          }
  const Var hidden = nn::gelu(motion_fc1_.forward(g, g.input(std::move(patches))));
  return nn::add(motion_fc2_.forward(g, hidden), g.input(grid_positions_));
}

Var DeltaEncoderModel::residual_features(Graph& g, const ResidualPlane& residual) {
  if (residual.height() != config_.height || residual.width() != config_.width ||
      residual.channels() != config_.channels)
    throw ConfigError("delta encoder: residual plane shape does not match model config");
  Tensor input({config_.height, config_.width, config_.channels});
  const auto values = residual.values();
  for (std::size_t i = 0; i < values.size(); ++i) input[i] = values[i] / 255.0;
  Var x = g.input(std::move(input));
  for (std::size_t i = 0; i < residual_convs_.size(); ++i) {
    x = residual_convs_[i].forward(g, x);
    if (i + 1 < residual_convs_.size()) x = nn::relu(x);
  }
  x = nn::reshape(x, {config_.m(), config_.d});
  return nn::add(x, g.input(grid_positions_));
}

Var DeltaEncoderModel::encode_motion(Graph& g, const MotionField& motion) {
  const Var features = motion_features(g, motion);
  const Var seq = nn::concat_rows({features, g.param(motion_queries_)});
  const Var out = motion_transformer_.forward(g, seq);
  const int total = config_.m() + config_.k_tau;
  return nn::slice_rows(out, config_.m(), total);
}

Var DeltaEncoderModel::encode_residual(Graph& g, const ResidualPlane& residual) {
  const Var features = residual_features(g, residual);
  const Var seq = nn::concat_rows({features, g.param(residual_queries_)});
  const Var out = residual_transformer_.forward(g, seq);
  const int total = config_.m() + config_.k_delta;
  return nn::slice_rows(out, config_.m(), total);
}

Var DeltaEncoderModel::delta_tokens(Graph& g, const PFrame& p) {
  return nn::concat_rows({encode_motion(g, p.motion), encode_residual(g, p.residual)});
}

Tensor DeltaEncoderModel::delta_tokens(const PFrame& p) {
  Graph g;
  return delta_tokens(g, p).value();
}

nn::ParamList DeltaEncoderModel::parameters() {
  nn::ParamList out;
  motion_fc1_.collect(out);
  motion_fc2_.collect(out);
  out.push_back(&motion_queries_);
  motion_transformer_.collect(out);
  for (auto& c : residual_convs_) c.collect(out);
  out.push_back(&residual_queries_);
  residual_transformer_.collect(out);
  return out;
}

std::size_t DeltaEncoderModel::parameter_count() {
  std::size_t n = 0;
  for (const nn::Parameter* p : parameters()) n += p->value.size();
  return n;
}

std::vector<std::string> DeltaEncoderModel::parameter_groups() {
  return {"motion_mlp", "motion_queries", "motion_transformer", "residual_conv", "residual_queries",
          "residual_transformer"};
}

PretrainHeads::PretrainHeads(const DeltaEncoderConfig& config, HeadInit init)
    : reference_("reference", config.layers, config.d, config.heads, config.mlp_hidden, config.seed),
      warped_("warped", config.layers, config.d, config.heads, config.mlp_hidden, config.seed) {
  config.validate();
  if (init == HeadInit::Identity) zero_output_projections();
}

Var PretrainHeads::reference(Graph& g, Var prev_tokens, Var motion_tokens) {
  const int m = prev_tokens.value().dim(0);
  const Var out = reference_.forward(g, nn::concat_rows({prev_tokens, motion_tokens}));
  return nn::slice_rows(out, 0, m);
}

Var PretrainHeads::warped(Graph& g, Var warped_tokens, Var residual_tokens) {
  const int m = warped_tokens.value().dim(0);
  const Var out = warped_.forward(g, nn::concat_rows({warped_tokens, residual_tokens}));
  return nn::slice_rows(out, 0, m);
}

nn::ParamList PretrainHeads::parameters() {
  nn::ParamList out;
  reference_.collect(out);
  warped_.collect(out);
  return out;
}

void PretrainHeads::zero_output_projections() {
  reference_.zero_output_projections();
  warped_.zero_output_projections();
}

Var pretrain_forward(Graph& g, Var prev_tokens, const PFrame& p, DeltaEncoderModel& model,
                     PretrainHeads& heads) {
  const DeltaEncoderConfig& cfg = model.config();
  const Tensor& prev = prev_tokens.value();
  if (prev.rank() != 2 || prev.dim(0) != cfg.m() || prev.dim(1) != cfg.d)
    throw ConfigError("pretrain_forward: previous tokens are " + nn::shape_string(prev.shape()) +
                      ", expected [" + std::to_string(cfg.m()) + "," + std::to_string(cfg.d) + "]");
  const Var motion_tokens = model.encode_motion(g, p.motion);
  const Var residual_tokens = model.encode_residual(g, p.residual);
  const Var warped = heads.reference(g, prev_tokens, motion_tokens);
  return heads.warped(g, warped, residual_tokens);
}

Tensor pretrain_forward(const Tensor& prev_tokens, const PFrame& p, DeltaEncoderModel& model,
                        PretrainHeads& heads) {
  Graph g;
  return pretrain_forward(g, g.input(prev_tokens), p, model, heads).value();
}

Var alignment_loss(Var predicted, Var target) {
  if (predicted.value().rank() != 2)
    throw nn::ShapeError("alignment_loss: expected [M, d] tokens");
  return nn::row_mse(predicted, target);
}

double alignment_loss(const Tensor& predicted, const Tensor& target) {
  Graph g;
  return alignment_loss(g.input(predicted), g.input(target)).value()[0];
}

std::vector<PretrainTriple> make_pretrain_dataset(std::uint64_t seed, const VideoConfig& video,
                                                  const DatasetOptions& options) {
  if (options.videos < 1 || options.frames_per_video < 2 || options.kinds.empty())
    throw ArgumentError("make_pretrain_dataset: need at least one video of two frames");
  const int s = options.fusion_window;
  VideoConfig cfg = video;
  // One GOP per clip so that every retained frame after the first is a P-frame.
  cfg.gop_size = ((options.frames_per_video + s - 1) / s) * s;
  cfg.fusion_window = 1;

  std::vector<PretrainTriple> out;
  for (int v = 0; v < options.videos; ++v) {
    const SynthKind kind = options.kinds[static_cast<std::size_t>(v) % options.kinds.size()];
    const std::uint64_t video_seed = hash_combine(seed, static_cast<std::uint64_t>(v));
    const auto frames = synth_video(kind, video_seed, cfg, options.frames_per_video);
    CodecStream stream = encode(frames, cfg, options.encoder);
    if (s > 1) stream = fuse_gop(stream, FusionPlan{s});
    const auto decoded = decode(stream);
    for (std::size_t j = 1; j < stream.frames.size(); ++j) {
      if (stream.frames[j].is_iframe()) continue;
      out.push_back({decoded[j - 1], stream.frames[j].pframe(), decoded[j]});
    }
  }
  return out;
}

PretrainResult pretrain(DeltaEncoderModel& model, PretrainHeads& heads, const PatchEmbedder& embedder,
                        const std::vector<PretrainTriple>& dataset, const PretrainConfig& config) {
  if (dataset.empty()) throw ArgumentError("pretrain: empty dataset");
  if (config.steps < 1 || config.batch < 1) throw ArgumentError("pretrain: steps and batch must be positive");
  const DeltaEncoderConfig& mc = model.config();
  for (const auto& t : dataset) {
    if (t.prev.height() != mc.height || t.prev.width() != mc.width || t.prev.channels() != mc.channels ||
        !(t.prev.height() == t.target.height() && t.prev.width() == t.target.width() &&
          t.prev.channels() == t.target.channels()))
      throw ConfigError("pretrain: sample dims are inconsistent with the model config");
  }

  std::vector<Tensor> prev_tokens(dataset.size()), target_tokens(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    prev_tokens[i] = embedder.embed(dataset[i].prev);
    target_tokens[i] = embedder.embed(dataset[i].target);
  }

  nn::ParamList params = model.parameters();
  const nn::ParamList head_params = heads.parameters();
  params.insert(params.end(), head_params.begin(), head_params.end());
  std::unordered_map<const nn::Parameter*, std::size_t> index;
  for (std::size_t i = 0; i < params.size(); ++i) index[params[i]] = i;

  nn::Adam adam(params, {config.lr, 0.9, 0.999, 1e-8, config.weight_decay});
  const nn::CosineSchedule schedule{config.lr, config.warmup, config.steps};
  Rng rng(hash_combine(config.seed, 0x7072ULL));

  PretrainResult result;
  result.history.reserve(static_cast<std::size_t>(config.steps));
  const auto batch = static_cast<std::size_t>(config.batch);
  std::vector<std::size_t> picks(batch);
  std::vector<double> losses(batch);
  std::vector<std::vector<Tensor>> grads(batch);

  for (int step = 1; step <= config.steps; ++step) {
    for (auto& p : picks) p = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(dataset.size()) - 1));

    parallel_for(batch, config.threads, [&](std::size_t b) {
      const std::size_t i = picks[b];
      Graph g;
      const Var pred = pretrain_forward(g, g.input(prev_tokens[i]), dataset[i].pframe, model, heads);
      const Var loss = alignment_loss(pred, g.input(target_tokens[i]));
      g.backward(loss);
      losses[b] = loss.value()[0];
      auto& out = grads[b];
      out.assign(params.size(), Tensor());
      for (const auto& [p, grad] : g.param_grads()) out[index.at(p)] = *grad;
    });

    adam.zero_grad();
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t k = 0; k < params.size(); ++k) {
        const Tensor& g = grads[b][k];
        if (g.size() == 0) continue;
        auto dst = params[k]->grad.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
      }
    }
    const double inv = 1.0 / static_cast<double>(batch);
    for (nn::Parameter* p : params)
      for (double& v : p->grad.data()) v *= inv;

    const double lr = schedule.at(step);
    adam.step(lr);
    result.history.push_back({step, lr, nn::pairwise_sum(losses) * inv});
  }
  return result;
}

std::vector<double> smoothed_losses(const std::vector<LossRecord>& history, int window) {
  std::vector<double> out(history.size());
  const auto w = static_cast<std::size_t>(std::max(1, window));
  for (std::size_t i = 0; i < history.size(); ++i) {
    const std::size_t start = i + 1 >= w ? i + 1 - w : 0;
    double s = 0.0;
    for (std::size_t k = start; k <= i; ++k) s += history[k].loss;
    out[i] = s / static_cast<double>(i + 1 - start);
  }
  return out;
}

std::string loss_history_csv(const std::vector<LossRecord>& history) {
  std::ostringstream out;
  out << "step,lr,loss\n" << std::setprecision(17);
  for (const auto& r : history) out << r.step << ',' << r.lr << ',' << r.loss << '\n';
  return out.str();
}

namespace {

std::vector<double> mean_tokens(const Tensor& tokens) {
  const int rows = tokens.dim(0), cols = tokens.dim(1);
  std::vector<double> out(static_cast<std::size_t>(cols), 0.0);
  std::vector<double> column(static_cast<std::size_t>(rows));
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) column[static_cast<std::size_t>(r)] = tokens.at(r, c);
    out[static_cast<std::size_t>(c)] = nn::pairwise_sum(column) / rows;
  }
  return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

int retrieval_rank(const std::vector<double>& query, const std::vector<std::vector<double>>& database,
                   const std::vector<int>& database_index, int truth) {
  std::vector<std::pair<double, int>> scored;
  scored.reserve(database.size());
  for (std::size_t i = 0; i < database.size(); ++i) scored.emplace_back(cosine(query, database[i]), database_index[i]);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t r = 0; r < scored.size(); ++r)
    if (scored[r].second == truth) return static_cast<int>(r) + 1;
  return std::numeric_limits<int>::max();
}

RetrievalReport retrieval_eval(const std::vector<std::vector<Frame>>& videos, DeltaEncoderModel& model,
                               PretrainHeads& heads, const PatchEmbedder& embedder,
                               const RetrievalOptions& options) {
  RetrievalReport report;
  const DeltaEncoderConfig& mc = model.config();
  const int s = std::max(1, options.fusion_window);
  int hits_ours[3] = {0, 0, 0};
  int hits_base[3] = {0, 0, 0};
  const int ks[3] = {1, 2, 5};

  for (const auto& frames : videos) {
    const int retained = frames.empty() ? 0 : (static_cast<int>(frames.size()) + s - 1) / s;
    if (retained < 2) {
      ++report.skipped_videos;
      continue;
    }
    VideoConfig cfg{mc.width, mc.height, mc.channels, kPatchSize, retained * s, 30, 1};
    CodecStream stream = encode(frames, cfg, options.encoder);
    if (s > 1) stream = fuse_gop(stream, FusionPlan{s});
    const auto decoded = decode(stream);
    const int n = static_cast<int>(decoded.size());

    std::vector<Tensor> tokens(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> pooled(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      tokens[static_cast<std::size_t>(i)] = embedder.embed(decoded[static_cast<std::size_t>(i)]);
      pooled[static_cast<std::size_t>(i)] = mean_tokens(tokens[static_cast<std::size_t>(i)]);
    }

    for (int t = 1; t < n; ++t) {
      const PFrame& p = stream.frames[static_cast<std::size_t>(t)].pframe();
      const auto ours = mean_tokens(pretrain_forward(tokens[static_cast<std::size_t>(t - 1)], p, model, heads));
      const auto& base = pooled[static_cast<std::size_t>(t - 1)];
      std::vector<std::vector<double>> db;
      std::vector<int> db_index;
      for (int i = 0; i < n; ++i) {
        if (i == t - 1) continue;
        db.push_back(pooled[static_cast<std::size_t>(i)]);
        db_index.push_back(i);
      }
      const int rank_ours = retrieval_rank(ours, db, db_index, t);
      const int rank_base = retrieval_rank(base, db, db_index, t);
      for (int k = 0; k < 3; ++k) {
        hits_ours[k] += rank_ours <= ks[k];
        hits_base[k] += rank_base <= ks[k];
      }
      ++report.num_queries;
    }
  }
  if (report.num_queries > 0) {
    const double q = report.num_queries;
    report.ours = {hits_ours[0] / q, hits_ours[1] / q, hits_ours[2] / q};
    report.baseline = {hits_base[0] / q, hits_base[1] / q, hits_base[2] / q};
  }
  return report;
}

std::string RetrievalReport::to_json() const {
  auto recall = [](const RecallAtK& r) {
    return nlohmann::ordered_json{{"recall@1", r.at1}, {"recall@2", r.at2}, {"recall@5", r.at5}};
  };
  nlohmann::ordered_json j;
  j["ours"] = recall(ours);
  j["baseline"] = recall(baseline);
  j["num_queries"] = num_queries;
  return j.dump(2) + "\n";
}

std::vector<float> ModelDeltaTokenizer::tokenize(const PFrame& frame) const {
  return to_float(model_.delta_tokens(frame));
}

namespace {

constexpr double kMaxExactSeed = 9007199254740992.0;  // 2^53

}  // namespace

void save_delta_checkpoint(const std::filesystem::path& path, DeltaEncoderModel& model, PretrainHeads& heads) {
  const DeltaEncoderConfig& c = model.config();
  if (static_cast<double>(c.seed) >= kMaxExactSeed || static_cast<double>(c.embedder_seed) >= kMaxExactSeed)
    throw ArgumentError("save_delta_checkpoint: seeds must be below 2^53");
  std::vector<nn::NamedTensor> records;
  records.push_back({"meta.config",
                     Tensor({12}, {1.0, double(c.height), double(c.width), double(c.channels), double(c.d),
                                   double(c.heads), double(c.layers), double(c.k_tau), double(c.k_delta),
                                   double(c.mlp_hidden), double(c.seed), double(c.embedder_seed)})});
  for (auto& nt : nn::snapshot(model.parameters())) records.push_back(std::move(nt));
  for (auto& nt : nn::snapshot(heads.parameters())) records.push_back(std::move(nt));
  nn::save_checkpoint(path, records);
}

LoadedDeltaModel load_delta_checkpoint(const std::filesystem::path& path) {
  const auto records = nn::load_checkpoint(path);
  auto meta = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.name == "meta.config"; });
  if (meta == records.end() || meta->tensor.size() != 12)
    throw FormatError("checkpoint " + path.string() + " has no delta-encoder config record");
  const auto& m = meta->tensor;
  if (m[0] != 1.0) throw FormatError("unsupported delta-encoder config version");
  LoadedDeltaModel out;
  DeltaEncoderConfig& c = out.config;
  c.height = static_cast<int>(m[1]);
  c.width = static_cast<int>(m[2]);
  c.channels = static_cast<int>(m[3]);
  c.d = static_cast<int>(m[4]);
  c.heads = static_cast<int>(m[5]);
  c.layers = static_cast<int>(m[6]);
  c.k_tau = static_cast<int>(m[7]);
  c.k_delta = static_cast<int>(m[8]);
  c.mlp_hidden = static_cast<int>(m[9]);
  c.seed = static_cast<std::uint64_t>(m[10]);
  c.embedder_seed = static_cast<std::uint64_t>(m[11]);
  out.model = std::make_unique<DeltaEncoderModel>(c);
  out.heads = std::make_unique<PretrainHeads>(c);
  out.embedder = std::make_unique<PatchEmbedder>(c.height, c.width, c.channels, c.d, c.embedder_seed);
  nn::restore(out.model->parameters(), records);
  nn::restore(out.heads->parameters(), records);
  return out;
}

}  // namespace codectok
