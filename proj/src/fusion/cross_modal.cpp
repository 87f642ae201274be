// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/fusion/cross_modal.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "violet/core/errors.hpp"

namespace violet::fusion {

namespace {

std::vector<int> iota_rows(int from, int count) {
  std::vector<int> rows(count);
  std::iota(rows.begin(), rows.end(), from);
  return rows;
}

}  // namespace

Var video_part(Tape& t, const JointFeatures& jf) { return ops::gather_rows(t, jf.h, iota_rows(0, jf.n_video)); }
Var cls_part(Tape& t, const JointFeatures& jf) { return ops::gather_rows(t, jf.h, {jf.cls_row()}); }
Var text_part(Tape& t, const JointFeatures& jf) {
  return ops::gather_rows(t, jf.h, iota_rows(jf.text_row(0), jf.n_text));
}

CrossModalTransformer::CrossModalTransformer(ParameterStore& store, const CrossModalConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  if (cfg.d < 1 || cfg.heads < 1 || cfg.d % cfg.heads != 0)
    throw ConfigError("cross-modal: d must be a positive multiple of heads");
  if (cfg.depth < 0 || cfg.l_max < 1) throw ConfigError("cross-modal: bad depth or l_max");
  cls_ = &store.add("ct.cls", 1, cfg.d, Init::Normal, rng, kInitStd, false);
  pos_text_ = &store.add("ct.pos_text", cfg.l_max, cfg.d, Init::Normal, rng, kInitStd, false);
  if (cfg.segment_embedding)
    segment_ = &store.add("ct.segment", 2, cfg.d, Init::Normal, rng, kInitStd, false);
  for (int k = 0; k < cfg.depth; ++k)
    blocks_.push_back(add_block(store, "ct.block" + std::to_string(k), cfg.d, rng));
  if (cfg.depth > 0) {
    norm_g_ = &store.add("ct.norm.g", 1, cfg.d, Init::Ones, rng, 0.0, false);
    norm_b_ = &store.add("ct.norm.b", 1, cfg.d, Init::Zeros, rng, 0.0, false);
  }
}

JointFeatures CrossModalTransformer::fuse(Tape& t, Var v, Var pv, Var w, std::span<const char> text_valid,
                                          AttentionMap* map) const {
  const Matrix& vv = t.value(v);
  const Matrix& pp = t.value(pv);
  const int n_text = w.valid() ? t.value(w).rows() : 0;
  if (vv.cols() != cfg_.d || pp.cols() != cfg_.d || (n_text > 0 && t.value(w).cols() != cfg_.d))
    throw ConfigError("cross-modal: feature width does not match d");
  if (pp.rows() != vv.rows()) throw ConfigError("cross-modal: video positions do not match video rows");
  const int n_video = vv.rows();
  if (n_text > cfg_.l_max)
    throw ConfigError("cross-modal: text length " + std::to_string(n_text) + " exceeds l_max " +
                      std::to_string(cfg_.l_max));
  if (!text_valid.empty() && static_cast<int>(text_valid.size()) != n_text)
    throw InputError("cross-modal: text validity flags do not match the text length");

  std::vector<Var> parts{ops::add(t, v, pv), t.param(*cls_)};
  if (n_text > 0)
    parts.push_back(ops::add(t, w, ops::gather_rows(t, t.param(*pos_text_), iota_rows(0, n_text))));
  Var x = ops::concat_rows(t, parts);

  JointFeatures jf;
  jf.n_video = n_video;
  jf.n_text = n_text;
  const int length = jf.length();
  if (segment_ != nullptr) {
    std::vector<int> seg(length, 1);
    std::fill(seg.begin(), seg.begin() + n_video, 0);
    x = ops::add(t, x, ops::gather_rows(t, t.param(*segment_), std::move(seg)));
  }

  std::vector<char> key_valid(length, 1);
  for (int i = 0; i < static_cast<int>(text_valid.size()); ++i) key_valid[jf.text_row(i)] = text_valid[i];
  const AttentionLayout layout = AttentionLayout::full(length, std::move(key_valid));
  if (map != nullptr) {
    map->n_video = n_video;
    map->n_text = n_text;
    map->layers.assign(blocks_.size(), AttentionCapture{});
  }
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    x = transformer_block(t, x, blocks_[k], cfg_.heads, layout, map ? &map->layers[k] : nullptr);
  if (!blocks_.empty()) x = ops::layer_norm(t, x, t.param(*norm_g_), t.param(*norm_b_));
  jf.h = x;
  return jf;
}

AttendedScores attended_scores(const AttentionMap& map, int layer, int query) {
  AttendedScores out;
  out.video.assign(map.n_video, 0.0);
  out.text.assign(map.n_text, 0.0);
  const int depth = static_cast<int>(map.layers.size());
  if (depth == 0) return out;  // no attention to rank by: all scores tie
  if (layer < 0) layer += depth;
  if (layer < 0 || layer >= depth) throw InputError("attended_scores: layer out of range");
  const int length = map.n_video + 1 + map.n_text;
  if (query < 0) query = map.n_video;
  if (query >= length) throw InputError("attended_scores: query row out of range");
  const AttentionCapture& cap = map.layers[layer];
  const int heads = cap.heads;
  for (int h = 0; h < heads; ++h) {
    const Matrix& p = cap.probs[h];
    for (int j = 0; j < map.n_video; ++j) out.video[j] += p(query, j) / heads;
    for (int j = 0; j < map.n_text; ++j) out.text[j] += p(query, map.n_video + 1 + j) / heads;
  }
  return out;
}

}  // namespace violet::fusion
