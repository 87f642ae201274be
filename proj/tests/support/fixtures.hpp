// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Micro-scale corpus, vocabulary, tokenizer and model shared by tests.

#include <memory>
#include <vector>

#include "violet/data/synthetic.hpp"
#include "violet/model/model.hpp"
#include "violet/pretrain/objectives.hpp"
#include "violet/text/vocab.hpp"
#include "violet/tokenizer/vq.hpp"

namespace violet::testing {

struct MicroSetup {
  std::vector<data::VideoClip> clips;
  text::Vocabulary vocab;
  std::unique_ptr<tokenizer::VisualTokenizer> tok;
  model::ModelConfig cfg;
  std::vector<pretrain::PretrainExample> examples;
};

/// res 8, patch 4 (2x2 grid), d 16, K 8; T frames per clip.
inline MicroSetup micro_setup(int n_clips = 4, int T = 2, std::uint64_t seed = 1, int depth = 1) {
  MicroSetup s;
  s.clips = data::generate_synthetic_corpus(n_clips, std::max(T, 4), 8, seed, 4);
  std::vector<std::string> captions;
  for (const auto& c : s.clips) captions.push_back(c.caption);
  s.vocab = text::Vocabulary::build(captions, 128);

  tokenizer::TokenizerConfig tc;
  tc.K = 8;
  tc.patch = 4;
  tc.resolution = 8;
  tc.hidden = 16;
  tc.code_dim = 4;
  tc.steps = 30;
  tc.batch = 16;
  tc.seed = seed;
  std::vector<data::Frame> frames;
  for (const auto& c : s.clips) frames.insert(frames.end(), c.frames.begin(), c.frames.end());
  s.tok = std::make_unique<tokenizer::VisualTokenizer>(tokenizer::VisualTokenizer::train(frames, tc));

  auto& m = s.cfg;
  m.video.d = 16;
  m.video.depth = depth;
  m.video.heads = 2;
  m.video.window = {2, 2, 2};
  m.video.patch_dim = 4 * 4 * 3;
  m.video.grid_h = 2;
  m.video.grid_w = 2;
  m.video.t_max = T;
  m.ct.d = 16;
  m.ct.depth = depth;
  m.ct.heads = 2;
  m.ct.l_max = 32;
  m.vocab_size = s.vocab.size();
  m.codebook_size = 8;
  m.feature_dim = 4;
  m.num_answers = 4;
  m.seed = seed;

  for (const auto& c : s.clips) {
    const auto sampled = data::sample_frames(c, T);
    s.examples.push_back(pretrain::make_example(data::patchify(sampled, 4), text::tokenize_text(c.caption, s.vocab),
                                                s.tok.get()));
  }
  return s;
}

}  // namespace violet::testing
