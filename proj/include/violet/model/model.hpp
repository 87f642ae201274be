// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "violet/fusion/cross_modal.hpp"
#include "violet/video/encoder.hpp"

namespace violet::model {

struct ModelConfig {
  video::EncoderConfig video;
  fusion::CrossModalConfig ct;
  int vocab_size = 512;
  int codebook_size = 256;  // MVM classes
  int feature_dim = 16;     // MFM regression target width
  int num_answers = 16;     // open-ended QA and fill-in-blank classes
  std::uint64_t seed = 0;
};

enum class Head { Mlm, Vtm, Mvm, Mfm, T2v, Mc, Qa, Fib };
std::string_view head_name(Head h);

/// Video features and the positions the cross-modal input reuses.
struct VideoEncoding {
  Var v;
  Var pv;
  int frames = 0;
};

/// Video encoder, word embeddings, cross-modal transformer and every task head,
/// all in one ParameterStore.
class VioletModel {
 public:
  explicit VioletModel(const ModelConfig& cfg);
  VioletModel(const VioletModel&) = delete;
  VioletModel& operator=(const VioletModel&) = delete;

  const ModelConfig& config() const noexcept { return cfg_; }
  ParameterStore& params() noexcept { return store_; }
  const ParameterStore& params() const noexcept { return store_; }
  const video::VideoEncoder& video() const noexcept { return *video_; }
  const fusion::CrossModalTransformer& cross_modal() const noexcept { return *ct_; }
  Parameter& word_embeddings() const noexcept { return *words_; }

  VideoEncoding encode_video(Tape& t, const data::PatchGrid& grid) const;
  /// Embeds `ids` and runs the cross-modal transformer. `valid` as in fuse().
  fusion::JointFeatures fuse(Tape& t, const VideoEncoding& video, std::span<const int> ids,
                             std::span<const char> valid = {}, fusion::AttentionMap* map = nullptr) const;

  const LinearParams& head(Head h) const;
  Var apply_head(Tape& t, Var rows, Head h) const;

  /// Copies the matching head into the retrieval head before finetuning.
  void init_t2v_from_vtm();

 private:
  ModelConfig cfg_;
  ParameterStore store_;
  std::unique_ptr<video::VideoEncoder> video_;
  Parameter* words_ = nullptr;
  std::unique_ptr<fusion::CrossModalTransformer> ct_;
  std::vector<LinearParams> heads_;
};

}  // namespace violet::model
