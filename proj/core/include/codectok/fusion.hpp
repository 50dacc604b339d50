// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

// P-frame fusion and keyframe promotion.
//
// Fusing s plain P-frames yields one P-frame that references s frames back.
// Its motion is the block-wise composition of the chain and its residual is
// recomputed from decoded pixels, so decoding the fused stream reproduces the
// retained timestamps exactly no matter how rough the composed motion is.

#pragma once

#include <vector>

#include "codectok/stream_model.hpp"

namespace codectok {

struct FusionPlan {
  int window = 30;

  int slots_per_gop(int gop_size) const { return gop_size / window; }
};

/// `fields` is in display order; the last one belongs to the newest frame.
/// Each block of the newest field follows the chain backwards: starting from
/// its own vector v, it looks up the block containing clamp(center - v) in
/// the next older field and adds that vector to v.
MotionField compose_motion(const std::vector<MotionField>& fields);

/// Collapses every window of `plan.window` plain P-frames into one fused
/// P-frame. The result has config.fusion_window == plan.window.
CodecStream fuse_gop(const CodecStream& stream, const FusionPlan& plan, int threads = 1);

/// Stores `keyframes_per_gop` uniformly spaced slots of every GOP as I-frames
/// (slot floor(j * slots / k), j = 0..k-1). A trailing partial GOP uses its
/// own slot count and at most that many keyframes.
CodecStream keyframe_promote(const CodecStream& stream, int keyframes_per_gop, int threads = 1);

/// Slot indices, relative to the GOP, that keyframe_promote keeps as I-frames.
std::vector<int> keyframe_slots(int slots, int keyframes);

}  // namespace codectok
