// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/model/model.hpp"

#include <string>

#include "violet/core/errors.hpp"
#include "violet/text/vocab.hpp"

namespace violet::model {

namespace {

constexpr Head kHeads[] = {Head::Mlm, Head::Vtm, Head::Mvm, Head::Mfm,
                           Head::T2v, Head::Mc,  Head::Qa,  Head::Fib};

}  // namespace

std::string_view head_name(Head h) {
  switch (h) {
    case Head::Mlm: return "mlm";
    case Head::Vtm: return "vtm";
    case Head::Mvm: return "mvm";
    case Head::Mfm: return "mfm";
    case Head::T2v: return "t2v";
    case Head::Mc: return "mc";
    case Head::Qa: return "qa";
    case Head::Fib: return "fib";
  }
  return "?";
}

VioletModel::VioletModel(const ModelConfig& cfg) : cfg_(cfg) {
  if (cfg.video.d != cfg.ct.d) throw ConfigError("model: video and cross-modal widths differ");
  if (cfg.vocab_size <= text::kNumReserved) throw ConfigError("model: vocabulary too small");
  if (cfg.codebook_size < 2 || cfg.feature_dim < 1 || cfg.num_answers < 2)
    throw ConfigError("model: head sizes must be positive (answers >= 2)");
  Rng rng(derive_seed(cfg.seed, "model/init"));
  video_ = std::make_unique<video::VideoEncoder>(store_, cfg.video, rng);
  words_ = &store_.add("text.word_embeddings", cfg.vocab_size, cfg.ct.d, Init::Normal, rng, kInitStd);
  ct_ = std::make_unique<fusion::CrossModalTransformer>(store_, cfg.ct, rng);
  const int d = cfg.ct.d;
  for (Head h : kHeads) {
    int out = 1;
    switch (h) {
      case Head::Mlm: out = cfg.vocab_size; break;
      case Head::Mvm: out = cfg.codebook_size; break;
      case Head::Mfm: out = cfg.feature_dim; break;
      case Head::Qa:
      case Head::Fib: out = cfg.num_answers; break;
      default: break;
    }
    heads_.push_back(add_linear(store_, "head." + std::string(head_name(h)), d, out, rng));
  }
}

VideoEncoding VioletModel::encode_video(Tape& t, const data::PatchGrid& grid) const {
  VideoEncoding enc;
  enc.frames = grid.frames;
  enc.v = video_->forward(t, grid);
  enc.pv = video_->positions(t, grid.frames);
  return enc;
}

fusion::JointFeatures VioletModel::fuse(Tape& t, const VideoEncoding& video, std::span<const int> ids,
                                        std::span<const char> valid, fusion::AttentionMap* map) const {
  const Var w = ids.empty() ? Var{} : text::embed_text(t, ids, *words_);
  return ct_->fuse(t, video.v, video.pv, w, valid, map);
}

const LinearParams& VioletModel::head(Head h) const { return heads_.at(static_cast<std::size_t>(h)); }

Var VioletModel::apply_head(Tape& t, Var rows, Head h) const { return apply_linear(t, rows, head(h)); }

void VioletModel::init_t2v_from_vtm() {
  const auto& vtm = head(Head::Vtm);
  const auto& t2v = head(Head::T2v);
  t2v.w->value = vtm.w->value;
  t2v.b->value = vtm.b->value;
}

}  // namespace violet::model
